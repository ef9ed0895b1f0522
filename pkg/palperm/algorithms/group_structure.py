from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, FrozenSet, List, Optional, Sequence, Tuple

from palperm.algorithms.palindromics import classify
from palperm.algorithms.permutation import (
    Permutation,
    compose,
    enumerate_range,
    from_one_line,
    identity,
    inverse,
    power,
    reversal,
)
from palperm.errors import DegreeMismatchError, GuardError, InvalidDegreeError, PalpermError
from palperm.logging_system import get_logger

LOGGER = get_logger(__name__)

CLOSURE_MAX_ELEMENTS = 10_000_000
INVERSE_MAX_DEGREE = 9
GENERATOR_SEARCH_MAX_DEGREE = 6
CLASS_NAMES: Tuple[str, ...] = ("lpp", "rpp", "lgspp", "rgspp")


@dataclass
class GroupClosure:
    n: int
    elements: FrozenSet[Tuple[int, ...]]
    generators: List[Permutation]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return p.images in self.elements

    def permutations(self) -> List[Permutation]:
        return [Permutation(images) for images in sorted(self.elements)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "generators": [g.one_line() for g in self.generators],
        }


@dataclass
class DihedralReport:
    n: int
    order: int
    order_ok: bool
    relations_ok: bool
    sigma_rgspp: bool
    tau_lgspp: bool
    sigma: str
    tau: str

    @property
    def passed(self) -> bool:
        return self.order_ok and self.relations_ok and self.sigma_rgspp and self.tau_lgspp

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "order_ok": self.order_ok,
            "relations_ok": self.relations_ok,
            "sigma_rgspp": self.sigma_rgspp,
            "tau_lgspp": self.tau_lgspp,
            "sigma": self.sigma,
            "tau": self.tau,
            "passed": self.passed,
        }


@dataclass
class InverseClosureReport:
    n: int
    class_name: str
    members: int
    counterexamples: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "class": self.class_name,
            "members": self.members,
            "holds": self.holds,
            "counterexamples": list(self.counterexamples),
        }


@dataclass
class UniquenessReport:
    n: int
    lpp_members: List[str]
    rpp_members: List[str]
    pp_members: List[str]

    @property
    def passed(self) -> bool:
        lpp_ok = self.lpp_members == [identity(self.n).one_line()]
        rpp_ok = self.rpp_members == [reversal(self.n).one_line()]
        # in S_1 the identity is also the reversal, hence a PP
        pp_ok = (not self.pp_members) if self.n >= 2 else len(self.pp_members) == 1
        return lpp_ok and rpp_ok and pp_ok

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lpp": list(self.lpp_members),
            "rpp": list(self.rpp_members),
            "pp": list(self.pp_members),
            "passed": self.passed,
        }


@dataclass
class GeneratorPair:
    sigma: Permutation
    tau: Permutation
    order: int

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.one_line(), "tau": self.tau.one_line(), "order": self.order}


def closure(
    n: int,
    gens: Sequence[Permutation],
    max_elements: int = CLOSURE_MAX_ELEMENTS,
) -> GroupClosure:
    """Smallest subgroup of S_n containing gens, by breadth-first right multiplication."""
    for g in gens:
        if g.n != n:
            raise DegreeMismatchError(f"generator {g.one_line()} has degree {g.n}, expected {n}")

    start = identity(n)
    gen_images = [g.images for g in gens]
    seen = {start.images}
    queue: Deque[Tuple[int, ...]] = deque([start.images])
    while queue:
        current = queue.popleft()
        for g in gen_images:
            # current∘g in one-line form
            product = tuple(current[v - 1] for v in g)
            if product in seen:
                continue
            seen.add(product)
            if len(seen) > max_elements:
                raise GuardError(f"closure exceeded {max_elements} elements")
            queue.append(product)

    LOGGER.debug(
        "Closure computed",
        extra={"context": {"n": n, "generators": len(gens), "order": len(seen)}},
    )
    return GroupClosure(n=n, elements=frozenset(seen), generators=list(gens))


def dihedral_generators(n: int) -> Tuple[Permutation, Permutation]:
    """The rotation [2, 3, ..., n, 1] and the reflection [1, n, n-1, ..., 2]."""
    if n < 3:
        raise InvalidDegreeError(f"dihedral generators need n >= 3, got {n}")
    sigma = from_one_line(list(range(2, n + 1)) + [1])
    tau = from_one_line([1] + list(range(n, 1, -1)))
    return sigma, tau


def verify_dihedral(n: int, max_elements: int = CLOSURE_MAX_ELEMENTS) -> DihedralReport:
    sigma, tau = dihedral_generators(n)
    group = closure(n, [sigma, tau], max_elements=max_elements)
    e = identity(n)

    sigma_n = power(sigma, n)
    tau_sq = compose(tau, tau)
    lhs = compose(tau, sigma)
    rhs = compose(power(sigma, n - 1), tau)
    relations_ok = sigma_n == e and tau_sq == e and lhs == rhs

    report = DihedralReport(
        n=n,
        order=group.order,
        order_ok=group.order == 2 * n,
        relations_ok=relations_ok,
        sigma_rgspp=classify(sigma).rgspp,
        tau_lgspp=classify(tau).lgspp,
        sigma=sigma.one_line(),
        tau=tau.one_line(),
    )
    if not report.passed:
        LOGGER.warning("Dihedral verification failed", extra={"context": report.to_dict()})
    return report


def _check_class(class_name: str) -> str:
    if class_name not in CLASS_NAMES:
        raise PalpermError(f"class must be one of {list(CLASS_NAMES)}, got {class_name!r}")
    return class_name


def verify_inverse_closure(
    n: int,
    class_name: str,
    max_degree: int = INVERSE_MAX_DEGREE,
) -> InverseClosureReport:
    """Check that p and its inverse agree on membership in class_name, for all of S_n."""
    _check_class(class_name)
    if n > max_degree:
        raise GuardError(f"inverse-closure sweep limited to n <= {max_degree}, got {n}")

    membership: Dict[Tuple[int, ...], bool] = {}
    for p in enumerate_range(n, 0, math.factorial(n)):
        membership[p.images] = bool(getattr(classify(p), class_name))

    counterexamples: List[str] = []
    for p in enumerate_range(n, 0, math.factorial(n)):
        if membership[p.images] != membership[inverse(p).images]:
            counterexamples.append(p.one_line())

    report = InverseClosureReport(
        n=n,
        class_name=class_name,
        members=sum(1 for v in membership.values() if v),
        counterexamples=counterexamples,
    )
    if not report.holds:
        LOGGER.warning(
            "Inverse closure does not hold",
            extra={
                "context": {
                    "n": n,
                    "class": class_name,
                    "counterexamples": len(counterexamples),
                    "first": counterexamples[:4],
                }
            },
        )
    return report


def verify_uniqueness(n: int, max_degree: int = INVERSE_MAX_DEGREE) -> UniquenessReport:
    if n > max_degree:
        raise GuardError(f"uniqueness sweep limited to n <= {max_degree}, got {n}")
    lpp: List[str] = []
    rpp: List[str] = []
    pp: List[str] = []
    for p in enumerate_range(n, 0, math.factorial(n)):
        flags = classify(p)
        if flags.lpp:
            lpp.append(p.one_line())
        if flags.rpp:
            rpp.append(p.one_line())
        if flags.pp:
            pp.append(p.one_line())
    return UniquenessReport(n=n, lpp_members=lpp, rpp_members=rpp, pp_members=pp)


def klein_four() -> List[Permutation]:
    """[I, delta_1, delta_2, delta_3] of the Klein four-group inside S_4."""
    return [
        from_one_line([1, 2, 3, 4]),
        from_one_line([3, 4, 1, 2]),
        from_one_line([2, 1, 4, 3]),
        from_one_line([4, 3, 2, 1]),
    ]


def klein_report() -> List[dict]:
    rows = []
    for label, p in zip(("e", "delta_1", "delta_2", "delta_3"), klein_four()):
        rows.append({"name": label, "permutation": p.one_line(), **classify(p).to_dict()})
    return rows


def search_generating_pairs(
    n: int,
    limit: Optional[int] = 1,
    max_degree: int = GENERATOR_SEARCH_MAX_DEGREE,
    max_elements: int = CLOSURE_MAX_ELEMENTS,
) -> List[GeneratorPair]:
    """Pairs (sigma RGSPP, tau LGSPP) whose closure is all of S_n, in rank order."""
    if n < 1:
        raise InvalidDegreeError(f"degree must be >= 1, got {n}")
    if n > max_degree:
        raise GuardError(f"generator search limited to n <= {max_degree}, got {n}")

    full = math.factorial(n)
    right: List[Permutation] = []
    left: List[Permutation] = []
    for p in enumerate_range(n, 0, full):
        flags = classify(p)
        if flags.rgspp:
            right.append(p)
        if flags.lgspp:
            left.append(p)

    found: List[GeneratorPair] = []
    for sigma in right:
        for tau in left:
            group = closure(n, [sigma, tau], max_elements=max_elements)
            if group.order == full:
                found.append(GeneratorPair(sigma=sigma, tau=tau, order=group.order))
                if limit is not None and len(found) >= limit:
                    return found
    return found
