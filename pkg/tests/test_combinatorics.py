import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duality.combinatorics import (
    ModeOccupation,
    Permutation,
    all_permutations,
    apply,
    assignment_index,
    canonical_assignment,
    compose,
    enumerate_occupations,
    invert,
    occupation_of,
    right_transversal,
    stabilizer,
)
from duality.errors import CapExceeded


def perms(n):
    return st.permutations(list(range(n))).map(lambda p: Permutation(tuple(p)))


occupations = st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(lambda c: 1 <= sum(c) <= 6).map(
    lambda c: ModeOccupation(tuple(c))
)


def test_cycle_parsing():
    assert Permutation.from_cycles("(13)", 3).images == (2, 1, 0)
    assert Permutation.from_cycles("", 3).is_identity()
    assert Permutation.from_cycles("ε", 4).is_identity()
    # right-to-left: (12)(23) sends 3 -> 2 -> 1
    p = Permutation.from_cycles("(12)(23)", 3)
    assert p(2) == 0
    assert Permutation.from_cycles("(1 10)", 10)(9) == 0
    with pytest.raises(ValueError):
        Permutation.from_cycles("(14)", 3)
    with pytest.raises(ValueError):
        Permutation.from_cycles("(1a)", 3)


def test_str_round_trip():
    for p in all_permutations(4):
        assert Permutation.from_cycles(str(p), 4) == p


def test_apply_composition_order():
    a = Permutation.from_cycles("(12)", 3)
    b = Permutation.from_cycles("(23)", 3)
    t = ("x", "y", "z")
    assert apply(compose(a, b), t) == apply(b, apply(a, t))
    assert apply(a, t) == ("y", "x", "z")


@given(perms(5), perms(5), perms(5))
def test_group_laws(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(a, invert(a)).is_identity()
    assert (a * b).sign == a.sign * b.sign


@given(perms(6), st.lists(st.integers(0, 9), min_size=6, max_size=6), perms(6))
def test_apply_is_action(a, t, b):
    assert apply(compose(a, b), t) == apply(b, apply(a, t))
    assert apply(invert(a), apply(a, t)) == tuple(t)


def test_sign_of_transposition_and_cycle():
    assert Permutation.from_cycles("(12)", 3).sign == -1
    assert Permutation.from_cycles("(123)", 3).sign == 1


def test_canonical_assignment_and_counts():
    occ = ModeOccupation((2, 1, 0))
    assert canonical_assignment(occ) == (0, 0, 1)
    assert occ.r_count == 3
    assert occupation_of((1, 0, 0), 3) == occ
    assert assignment_index((1, 0, 1), 2) == 5


def test_worked_example_transversal_coset_equal():
    occ = ModeOccupation((2, 1, 0))
    ours = right_transversal(occ)
    reference = [Permutation.from_cycles(c, 3) for c in ("", "(13)", "(23)")]
    stab = stabilizer(occ)

    def coset(mu):
        return frozenset(compose(xi, mu) for xi in stab)

    assert {coset(mu) for mu in ours} == {coset(mu) for mu in reference}
    e = canonical_assignment(occ)
    assert sorted(apply(mu, e) for mu in ours) == sorted([(0, 0, 1), (1, 0, 0), (0, 1, 0)])


@settings(max_examples=60)
@given(occupations)
def test_transversal_properties(occ):
    t = right_transversal(occ)
    assert len(t) == occ.r_count == math.factorial(occ.n_particles) // occ.stabilizer_order
    e = canonical_assignment(occ)
    assigned = [apply(mu, e) for mu in t]
    assert len(set(assigned)) == len(assigned)
    assert [mu.images for mu in t] == sorted(mu.images for mu in t)
    stab = stabilizer(occ)
    for mu in t:
        # representative is the lexicographically smallest element of its coset
        assert mu.images == min(compose(xi, mu).images for xi in stab)
        assert t.index(compose(stab[-1], mu)) == t.index(mu)


def test_stabilizer_of_double_well():
    occ = ModeOccupation((2, 2))
    names = {str(p) for p in stabilizer(occ)}
    assert names == {"ε", "(12)", "(34)", "(12)(34)"}


def test_enumerate_occupations():
    occs = [o.counts for o in enumerate_occupations(2, 2)]
    assert occs == [(2, 0), (1, 1), (0, 2)]
    assert len(enumerate_occupations(3, 3)) == math.comb(5, 2)


def test_caps():
    with pytest.raises(CapExceeded):
        all_permutations(9)
    with pytest.raises(CapExceeded):
        right_transversal(ModeOccupation((1,) * 8), cap=100)
    with pytest.raises(CapExceeded):
        enumerate_occupations(10, 10, cap=10)


def test_invalid_occupation():
    with pytest.raises(ValueError):
        ModeOccupation((0, 0))
    with pytest.raises(ValueError):
        ModeOccupation((-1, 2))
