import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afl_lab.errors import InconsistentMoments, NotRegularSemisimple
from afl_lab.field import context, mu_sign
from afl_lab.lattice import Lattice, dual_lattice
from afl_lab.matrix import EMatrix
from afl_lab.orbits import (
    SymmetricPair,
    UnitaryModel,
    apply_tau,
    extend_moments,
    invariants,
    is_conj_self_reciprocal,
    is_minuscule,
    is_regular_semisimple,
    match_to_unitary,
    orbit_act,
    random_F_matrix,
    sample_minuscule,
    sample_symmetric,
    tau_map,
)
from afl_lab.orbital import residue_charpoly
from afl_lab.finitefield import is_self_reciprocal

C3 = context(3)
E = C3.E
PAIR1 = SymmetricPair.make(C3, [[1]], [3], [1])
PAIR2 = SymmetricPair.make(C3, [[0, 1], [1, 0]], [1, 0], [0, 1])


def test_rs_examples():
    assert is_regular_semisimple(PAIR1)
    assert is_regular_semisimple(PAIR2)
    assert not is_regular_semisimple(SymmetricPair.make(C3, [[0, 1], [1, 0]], [0, 0], [0, 1]))
    with pytest.raises(NotRegularSemisimple):
        invariants(SymmetricPair.make(C3, [[1, 0], [0, 1]], [1, 0], [0, 1]))


def test_invariant_examples():
    inv = invariants(PAIR1)
    assert (inv.v, inv.Delta, inv.delta, inv.omega, inv.side) == (1, E(3), 1, -1, "minus")
    inv = invariants(PAIR2)
    assert (inv.v, inv.Delta, inv.delta, inv.omega, inv.side) == (0, E(-1), 0, 1, "plus")
    # every Krylov column scales, so v moves by n
    s = invariants(SymmetricPair.make(C3, [[0, 1], [1, 0]], [3, 0], [0, 1]))
    assert s.v == inv.v + 2 and s.omega == inv.omega
    s = invariants(SymmetricPair.make(C3, [[1]], [9], [1]))
    assert s.v == 2 and s.omega == 1


def test_extend_moments_examples():
    ext = extend_moments([E(-1), E(1)], [E(3)], -4, 4)
    assert all(ext[m] == E(3) for m in range(-4, 5))
    ext = extend_moments([E(-1), E(0), E(1)], [E(0), E(1)], -1, 2)
    assert ext[2] == E(0) and ext[-1] == E(1)
    with pytest.raises(InconsistentMoments):
        extend_moments([E(-1), E(1)], [E(1, 1)], 0, 2)


def test_match_examples():
    m = match_to_unitary(PAIR1)
    assert m.G == EMatrix(C3, [[3]]) and m.C == EMatrix(C3, [[1]]) and m.x == [E(1)]
    m = match_to_unitary(PAIR2)
    assert m.C == EMatrix(C3, [[0, 1], [1, 0]])
    assert m.G == EMatrix(C3, [[0, 1], [1, 0]])
    assert m.charpoly == [E(-1), E(0), E(1)]


def test_tau_examples():
    m = match_to_unitary(PAIR1)
    assert tau_map(m) == EMatrix.identity(C3, 1)
    T = tau_map(match_to_unitary(PAIR2))
    assert T * T.conj() == EMatrix.identity(C3, 2)


def test_minuscule_examples():
    C = EMatrix.identity(C3, 2)
    assert is_minuscule(UnitaryModel(C3, 2, EMatrix.diag(C3, [1, 3]), C))
    assert not is_minuscule(UnitaryModel(C3, 2, EMatrix.diag(C3, [1, 9]), C))
    assert is_minuscule(UnitaryModel(C3, 2, EMatrix(C3, [[0, 1], [1, 0]]), C))


def test_orbit_act_examples():
    assert orbit_act(PAIR2, EMatrix.identity(C3, 2)) == PAIR2
    g = EMatrix.diag(C3, [3, 1])
    acted = orbit_act(PAIR2, g)
    a, b = invariants(PAIR2), invariants(acted)
    assert a.moments == b.moments and a.charpoly == b.charpoly
    assert b.v == a.v - 1 and b.omega == -a.omega
    assert orbit_act(acted, g.inverse()) == PAIR2


def test_sampler_determinism_and_json():
    a = sample_symmetric(C3, 2, 11, 1)
    assert a == sample_symmetric(C3, 2, 11, 1)
    assert SymmetricPair.from_json(a.to_json()) == a
    m = sample_minuscule(C3, 3, 4)
    assert m == sample_minuscule(C3, 3, 4)
    assert UnitaryModel.from_json(m.to_json()) == m


samples = st.tuples(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(0, 2**32), st.integers(0, 2))


@given(samples)
@settings(max_examples=40, deadline=None)
def test_sampled_pairs_and_matching(args):
    p, n, seed, budget = args
    ctx = context(p)
    pair = sample_symmetric(ctx, n, seed, budget)
    assert pair.in_symmetric_space() and pair.zeta.is_integral()
    assert all(x.is_integral() and x.val() <= budget for x in pair.y1 + pair.y2 if x)
    inv = invariants(pair)
    assert inv.Delta and inv.moments[0].in_base_field()
    P = list(inv.charpoly)
    assert is_conj_self_reciprocal(P) and P[0].norm() == 1
    m = match_to_unitary(pair)
    assert m.is_hermitian() and m.is_unitary()
    assert m.charpoly == P
    assert m.delta() == inv.delta
    # (xi^i x, x) = c_i
    v = m.x
    for i in range(n):
        assert m.pairing(v, m.x) == inv.moments[i]
        v = m.C.apply(v)
    # tau: involution fixing x, conjugating xi to its inverse, preserving L and L*
    T = tau_map(m)
    assert T * T.conj() == EMatrix.identity(ctx, n)
    assert apply_tau(T, m.x) == m.x
    w = [ctx.E(k + 1, k) for k in range(n)]
    assert apply_tau(T, m.C.apply(w)) == m.C.inverse().apply(apply_tau(T, w))
    L = Lattice.standard(ctx, n)
    assert L.is_stable_semilinear(T) and dual_lattice(L, m.G).is_stable_semilinear(T)


@given(samples, st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_orbit_invariance_of_invariants(args, gseed):
    p, n, seed, budget = args
    ctx = context(p)
    pair = sample_symmetric(ctx, n, seed, budget)
    g = random_F_matrix(random.Random(gseed), ctx, n)
    acted = orbit_act(pair, g)
    a, b = invariants(pair), invariants(acted)
    assert a.moments == b.moments and a.charpoly == b.charpoly
    assert (a.Delta, a.delta, a.side) == (b.Delta, b.delta, b.side)
    d = g.det()
    assert b.v == a.v - d.val()
    assert b.omega == a.omega * mu_sign(d)


@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_minuscule_samples(p, n, seed):
    ctx = context(p)
    m = sample_minuscule(ctx, n, seed)
    assert m.is_hermitian() and m.is_unitary() and is_minuscule(m)
    assert is_conj_self_reciprocal(m.charpoly)
    assert is_self_reciprocal(residue_charpoly(m))
    if n == 1:
        assert m.G.e[0][0].val() in (0, 1)
