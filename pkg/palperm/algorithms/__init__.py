"""Core algorithms: permutations, palindromic classification, group structure, census."""

from .census import BlockClassifier, CensusRecord, PartialCount, census, census_range, merge
from .group_structure import GroupClosure, closure, verify_dihedral, verify_inverse_closure
from .palindromics import ClassFlags, TokenSeq, classify, is_gsp, is_gsp_oracle
from .permutation import Permutation, compose, inverse, rank, unrank

__all__ = [
    "BlockClassifier",
    "CensusRecord",
    "ClassFlags",
    "GroupClosure",
    "PartialCount",
    "Permutation",
    "TokenSeq",
    "census",
    "census_range",
    "classify",
    "closure",
    "compose",
    "inverse",
    "is_gsp",
    "is_gsp_oracle",
    "merge",
    "rank",
    "unrank",
    "verify_dihedral",
    "verify_inverse_closure",
]
