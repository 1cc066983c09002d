import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afl_lab.errors import BoundOverflow, ComplexityExceeded, NotMinuscule, UnsupportedRank, WrongSide
from afl_lab.field import context
from afl_lab.matrix import EMatrix
from afl_lab.orbital import (
    OrbLaurent,
    analyze_model,
    analyze_pair,
    count_M,
    count_N,
    derivative_M,
    direct_coset_orb,
    minuscule_closed_value,
    orb_laurent,
    unitary_selfdual_count,
)
from afl_lab.orbits import (
    SymmetricPair,
    UnitaryModel,
    invariants,
    match_to_unitary,
    orbit_act,
    random_F_matrix,
    sample_minuscule,
    sample_symmetric,
)

C3 = context(3)
PAIR1 = SymmetricPair.make(C3, [[1]], [3], [1])
PAIR2 = SymmetricPair.make(C3, [[0, 1], [1, 0]], [1, 0], [0, 1])
M1 = UnitaryModel(C3, 1, EMatrix(C3, [[3]]), EMatrix(C3, [[1]]))


def test_count_examples():
    assert count_N(M1) == [1, 1]
    assert count_M(PAIR1) == [1, 1]
    assert count_M(PAIR2) == [1]
    assert count_N(match_to_unitary(PAIR2)) == [1]


def test_orb_laurent_examples():
    orb = orb_laurent([1, 1], 1)
    assert orb == OrbLaurent({0: 1, 1: -1})
    assert orb.at_one() == 0
    assert -1 * orb.weighted_sum() == 1 == derivative_M([1, 1], 1)
    const = orb_laurent([1], 0)
    assert const == OrbLaurent({0: 1}) and const.at_one() == 1 and const.weighted_sum() == 0
    assert orb_laurent([], 3) == OrbLaurent()
    assert OrbLaurent.from_json(orb.to_json()) == orb


def test_selfdual_examples():
    G = EMatrix(C3, [[0, 1], [1, 0]])
    assert unitary_selfdual_count(UnitaryModel(C3, 2, G, G)) == 1
    assert unitary_selfdual_count(UnitaryModel(C3, 1, EMatrix(C3, [[9]]), EMatrix(C3, [[1]]))) == 1
    with pytest.raises(WrongSide):
        unitary_selfdual_count(M1)


def test_closed_value_examples():
    assert minuscule_closed_value(M1) == 1
    with pytest.raises(NotMinuscule):
        minuscule_closed_value(UnitaryModel(C3, 1, EMatrix(C3, [[9]]), EMatrix(C3, [[1]])))


def test_coset_oracle_examples():
    assert direct_coset_orb(PAIR1) == OrbLaurent({0: 1, 1: -1})
    assert direct_coset_orb(SymmetricPair.make(C3, [[1]], [1], [1])) == OrbLaurent({0: 1})
    assert direct_coset_orb(PAIR2) == OrbLaurent({0: 1})
    three = sample_symmetric(C3, 3, 0, 1)
    with pytest.raises(UnsupportedRank):
        direct_coset_orb(three)
    # y1 scaled by 9: k_i runs over 0..2, giving (1 + 3 + 9) * 3 = 39 cosets
    big = SymmetricPair.make(C3, [[0, 1], [1, 0]], [9, 0], [0, 1])
    with pytest.raises(BoundOverflow):
        direct_coset_orb(big, coset_cap=10)
    assert direct_coset_orb(big, coset_cap=39) == orb_laurent(count_M(big), invariants(big).v)


def test_report_schema():
    rep = analyze_pair(PAIR1, oracle=True).to_json()
    for key in ("invariants", "counts_N", "counts_M", "orb", "orb0_signed", "afl_lhs", "unitary_selfdual", "minuscule_closed", "verdicts"):
        assert key in rep
    for key in ("duality", "bijection", "rfl1", "rfl2", "afl_minuscule", "oracle"):
        assert key in rep["verdicts"]
    assert rep["orb"] == [[0, 1], [1, -1]]
    assert (rep["orb0_signed"], rep["afl_lhs"], rep["minuscule_closed"]) == (0, 1, 1)


def _try(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except ComplexityExceeded:
        return None


@given(st.sampled_from([3, 5]), st.integers(1, 2), st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_cross_oracle_and_bijection(p, n, seed):
    ctx = context(p)
    pair = sample_symmetric(ctx, n, seed, 1)
    rep = _try(analyze_pair, pair, oracle=True)
    if rep is None:
        return
    assert rep.verdicts["oracle"] is True
    assert rep.counts_M == rep.counts_N
    assert rep.counts_N == rep.counts_N[::-1]
    if rep.delta % 2:
        assert rep.orb0_signed == 0


@given(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(0, 2**32), st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_orbit_invariance_of_orbital_integral(p, n, seed, gseed):
    ctx = context(p)
    pair = sample_symmetric(ctx, n, seed, 1)
    acted = orbit_act(pair, random_F_matrix(random.Random(gseed), ctx, n))
    a = _try(analyze_pair, pair, selfdual=False, closed=False)
    b = _try(analyze_pair, acted, selfdual=False, closed=False)
    if a is None or b is None:
        return
    assert a.orb0_signed == b.orb0_signed
    assert a.counts_M == b.counts_M
    if a.delta % 2:
        assert a.afl_lhs == b.afl_lhs


@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 2**32))
@settings(max_examples=30, deadline=None)
def test_minuscule_afl_identity(p, n, seed):
    model = sample_minuscule(context(p), n, seed, parity="odd")
    rep = analyze_model(model)
    assert rep.delta % 2 == 1
    assert rep.afl_lhs == rep.minuscule_closed
    assert rep.verdicts["afl_minuscule"] is True


def test_closed_value_vanishing_branch_is_reached():
    ctx = context(3)
    zeros = 0
    for seed in range(80):
        rep = analyze_model(sample_minuscule(ctx, 3, seed, parity="odd"))
        assert rep.afl_lhs == rep.minuscule_closed
        zeros += rep.minuscule_closed == 0
    assert zeros >= 1


def test_invariants_feed_report():
    pair = sample_symmetric(C3, 2, 5, 1)
    inv = invariants(pair)
    rep = analyze_pair(pair)
    assert rep.invariants == inv.to_json()
    assert len(rep.counts_N) == inv.delta + 1
