from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afl_lab.errors import DivisionByZero, NotIntegral, ZeroArgument
from afl_lab.field import (
    INF,
    ArithContext,
    FieldElement,
    canonical_rep,
    context,
    ee_arith,
    ee_val,
    mu_sign,
    residue,
)

C3 = context(3)


def E(a, b=0, ctx=C3):
    return ctx.E(a, b)


def test_context_picks_smallest_nonresidue():
    assert context(3).u == 2
    assert context(5).u == 2
    assert context(7).u == 3
    assert context(3).q == 3
    with pytest.raises(ValueError):
        context(9)
    with pytest.raises(ValueError):
        ArithContext(7, 2)  # 2 is a square mod 7


def test_arith_examples():
    assert ee_arith(E(1, 1), E(1, -1), "mul") == E(-1)
    x = E(Fraction(2, 7), 5)
    assert ee_arith(x, E(0), "add") == x
    # norm(1 + sqrt2) = -1, so the inverse is -(1 - sqrt2); multiply back to check
    assert E(1, 1).inverse() == E(-1, 1)
    assert E(1, 1) * E(-1, 1) == E(1)
    with pytest.raises(DivisionByZero):
        ee_arith(E(1), E(0), "div")


def test_val_examples():
    assert ee_val(E(3)) == 1
    assert ee_val(E(1, 1)) == 0
    assert ee_val(E(Fraction(3, 2), 9)) == 1
    assert ee_val(E(0)) == INF


def test_mu_sign_examples():
    assert mu_sign(E(3)) == -1
    assert mu_sign(E(2)) == 1
    assert mu_sign(E(3, 3)) == -1
    with pytest.raises(ZeroArgument):
        mu_sign(E(0))


def test_residue_examples():
    assert residue(E(4, 5)).to_json() == [1, 2]
    assert not residue(E(3))
    x = E(1, 1)
    assert residue(x.conj()) == residue(x).conj()
    assert residue(x.conj()).to_json() == [1, 2]  # (1, -1) mod 3
    with pytest.raises(NotIntegral):
        residue(E(Fraction(1, 3)))


def test_json_round_trip():
    x = E(Fraction(-7, 12), Fraction(5, 9))
    assert x.to_json() == {"a": "-7/12", "b": "5/9"}
    assert FieldElement.from_json(x.to_json(), C3) == x
    assert ArithContext.from_json(C3.to_json()) == C3


def test_canonical_rep():
    assert canonical_rep(Fraction(10), 3, 2) == 1
    assert canonical_rep(Fraction(9), 3, 2) == 0
    assert canonical_rep(Fraction(1, 3), 3, 1) == Fraction(1, 3)
    assert canonical_rep(Fraction(10, 3), 3, 1) == Fraction(1, 3)
    assert canonical_rep(Fraction(4, 3), 3, 1) == Fraction(4, 3)


rationals = st.fractions(max_denominator=50).filter(lambda f: abs(f.numerator) < 10**4)


@st.composite
def elements(draw, nonzero=False):
    p = draw(st.sampled_from([3, 5, 7]))
    ctx = context(p)
    a, b = draw(rationals), draw(rationals)
    x = ctx.E(a, b)
    if nonzero and not x:
        x = ctx.one
    return x


@given(elements(nonzero=True), st.data())
@settings(max_examples=200, deadline=None)
def test_valuation_is_discrete(x, data):
    ctx = x.ctx
    y = ctx.E(data.draw(rationals), data.draw(rationals))
    if y:
        assert (x * y).val() == x.val() + y.val()
        assert mu_sign(x * y) == mu_sign(x) * mu_sign(y)
    s = x + y
    if s:
        assert s.val() >= min(x.val(), y.val())
        if x.val() != y.val():
            assert s.val() == min(x.val(), y.val())


@given(elements(nonzero=True))
@settings(max_examples=200, deadline=None)
def test_conj_norm_trace(x):
    assert x.conj().val() == x.val()
    n = x * x.conj()
    assert n.in_base_field() and n.a == x.norm()
    assert ee_val(n) == 2 * x.val()
    assert x.conj().conj() == x
    assert (x + x.conj()).a == x.trace()
    assert x * x.inverse() == x.ctx.one


@given(elements(), elements())
@settings(max_examples=200, deadline=None)
def test_residue_is_ring_map(x, y):
    if x.ctx != y.ctx:
        y = x.ctx.E(y.a, y.b)
    x = x * x.ctx.p ** max(0, -int(x.val())) if x else x
    y = y * y.ctx.p ** max(0, -int(y.val())) if y else y
    rx, ry = x.residue(), y.residue()
    assert (x + y).residue() == rx + ry
    assert (x * y).residue() == rx * ry
    assert bool(rx) == (x.val() == 0)


@given(st.sampled_from([3, 5, 7]), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
@settings(max_examples=200, deadline=None)
def test_norms_of_units_have_trivial_sign(p, a, b):
    ctx = context(p)
    x = ctx.E(a, b)
    if not x or x.val() != 0:
        return
    assert mu_sign(ctx.E(x.norm())) == 1
    assert mu_sign(ctx.E(p * x.norm() ** 2)) == -1
