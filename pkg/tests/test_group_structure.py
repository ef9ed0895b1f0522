from __future__ import annotations

import math

import pytest

from palperm.algorithms.group_structure import (
    closure,
    dihedral_generators,
    klein_four,
    klein_report,
    search_generating_pairs,
    verify_dihedral,
    verify_inverse_closure,
    verify_uniqueness,
)
from palperm.algorithms.palindromics import classify, format_witness, rpv
from palperm.algorithms.permutation import compose, enumerate_range, from_one_line, identity, inverse
from palperm.errors import DegreeMismatchError, GuardError, InvalidDegreeError, PalpermError


def test_dihedral_generators_of_s3_generate_s3(s3):
    sigma, tau = dihedral_generators(3)
    assert sigma == s3["sigma_1"]
    assert tau == s3["tau_1"]
    group = closure(3, [sigma, tau])
    assert group.order == 6
    assert set(group.permutations()) == set(s3.values())


def test_closure_is_a_subgroup():
    sigma, tau = dihedral_generators(6)
    group = closure(6, [sigma, tau])
    members = group.permutations()
    for a in members:
        assert inverse(a) in group
        for b in members:
            assert compose(a, b) in group


def test_closure_of_cyclic_and_trivial(s3):
    assert closure(3, [s3["sigma_1"]]).order == 3
    assert closure(3, []).order == 1
    assert identity(3) in closure(3, [])


def test_klein_four_closure():
    group = closure(4, klein_four())
    assert group.order == 4
    assert group.to_dict()["order"] == 4


def test_closure_guard_and_degree_checks():
    with pytest.raises(DegreeMismatchError):
        closure(4, [identity(3)])
    cycle = from_one_line([2, 3, 4, 5, 1])
    swap = from_one_line([2, 1, 3, 4, 5])
    with pytest.raises(GuardError):
        closure(5, [cycle, swap], max_elements=50)


@pytest.mark.parametrize("n", range(3, 13))
def test_verify_dihedral(n):
    report = verify_dihedral(n)
    assert report.order == 2 * n
    assert report.order_ok and report.relations_ok
    assert report.sigma_rgspp and report.tau_lgspp
    assert report.passed
    assert report.to_dict()["passed"] is True


def test_dihedral_needs_three_points():
    with pytest.raises(InvalidDegreeError):
        dihedral_generators(2)


@pytest.mark.parametrize("n", range(1, 9))
def test_verify_uniqueness(n):
    report = verify_uniqueness(n)
    assert report.passed
    assert report.lpp_members == [identity(n).one_line()]
    assert report.rpp_members == [",".join(str(v) for v in range(n, 0, -1))]
    assert len(report.pp_members) == (1 if n == 1 else 0)


@pytest.mark.parametrize("class_name", ["lpp", "rpp", "lgspp"])
@pytest.mark.parametrize("n", range(2, 8))
def test_inverse_closure_holds(n, class_name):
    report = verify_inverse_closure(n, class_name)
    assert report.holds
    assert report.counterexamples == []


@pytest.mark.parametrize("n", [2, 3])
def test_right_class_inverse_closed_in_small_degree(n):
    assert verify_inverse_closure(n, "rgspp").holds


def test_right_class_not_inverse_closed_from_four():
    report = verify_inverse_closure(4, "rgspp")
    assert not report.holds
    assert "3,2,4,1" in report.counterexamples
    assert "4,2,1,3" in report.counterexamples
    assert report.to_dict()["holds"] is False


def test_inverse_closure_guards():
    with pytest.raises(GuardError):
        verify_inverse_closure(10, "lpp")
    with pytest.raises(PalpermError):
        verify_inverse_closure(3, "gspp_x")


def test_inverse_membership_matches_counterexample_list():
    report = verify_inverse_closure(5, "rgspp")
    expected = [
        p.one_line()
        for p in enumerate_range(5, 0, math.factorial(5))
        if classify(p).rgspp != classify(inverse(p)).rgspp
    ]
    assert report.counterexamples == expected


def test_klein_report_rows():
    rows = {row["name"]: row for row in klein_report()}
    assert rows["delta_1"]["rgspp"] and not rows["delta_1"]["lgspp"]
    assert rows["delta_2"]["lgspp"] and not rows["delta_2"]["rgspp"]
    assert rows["delta_3"]["gspp"]
    assert rows["e"]["permutation"] == "1,2,3,4"


def test_generator_search_s3():
    pairs = search_generating_pairs(3)
    assert len(pairs) == 1
    assert pairs[0].sigma.one_line() == "2,3,1"
    assert pairs[0].tau.one_line() == "1,3,2"
    assert pairs[0].order == 6


@pytest.mark.parametrize("n", [4, 5])
def test_generator_search_finds_full_group(n):
    pairs = search_generating_pairs(n, limit=2)
    assert len(pairs) == 2
    for pair in pairs:
        assert pair.order == math.factorial(n)
        assert closure(n, [pair.sigma, pair.tau]).order == math.factorial(n)


def test_generator_search_guard():
    with pytest.raises(GuardError):
        search_generating_pairs(7)


def test_dihedral_generators_of_degree_four_and_five():
    sigma, tau = dihedral_generators(4)
    assert sigma.one_line() == "2,3,4,1"
    assert tau.one_line() == "1,4,3,2"
    sigma5, _ = dihedral_generators(5)
    assert compose(sigma5, compose(sigma5, compose(sigma5, compose(sigma5, sigma5)))) == identity(5)


def test_identity_generates_trivial_group():
    assert closure(3, [identity(3)]).order == 1


def test_rotation_grouping_in_degree_six():
    sigma, _ = dihedral_generators(6)
    assert format_witness(rpv(sigma).tokens) == "1(23456)(23456)1"


def _generator_sets():
    sets = [(n, list(dihedral_generators(n))) for n in range(3, 7)]
    sets.append((4, klein_four()))
    sets.extend((n, [dihedral_generators(n)[0]]) for n in range(2, 7))
    sets.append((5, [from_one_line([2, 1, 3, 4, 5])]))
    sets.append((6, [from_one_line([2, 1, 3, 4, 5, 6]), from_one_line([1, 2, 4, 5, 3, 6])]))
    sets.append((6, [from_one_line([2, 3, 1, 5, 6, 4])]))
    sets.append((3, [identity(3)]))
    sets.extend((4, [pair.sigma, pair.tau]) for pair in search_generating_pairs(4, limit=2))
    return sets


@pytest.mark.parametrize("n, gens", _generator_sets())
def test_closure_is_idempotent(n, gens):
    group = closure(n, gens)
    again = closure(n, group.permutations())
    assert set(again.permutations()) == set(group.permutations())


@pytest.mark.parametrize("n, gens", _generator_sets())
def test_closure_order_divides_group_order(n, gens):
    order = closure(n, gens).order
    assert math.factorial(n) % order == 0
