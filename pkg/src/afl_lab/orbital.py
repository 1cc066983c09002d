"""Orbital integrals by lattice counting, and the quantities compared against them.

``Orb(s)`` is carried as a Laurent polynomial in ``Q = q^(-2s)``.  The two count
vectors are

* ``#M_i``: conjugation- and zeta-stable lattices ``L1 ⊆ Λ ⊆ L2^v`` of
  length ``i`` over ``L1`` (symmetric side), and
* ``#N_i``: xi- and tau-stable lattices ``L ⊆ Λ ⊆ L*`` of length ``i`` over
  ``L`` (unitary side).

Everything is an exact integer; the derivative is reported as the integer
``D = omega * sum(e * c_e)`` with the ``-2 ln q`` factor stripped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from afl_lab.errors import (
    BoundOverflow,
    ComplexityExceeded,
    NotMinuscule,
    NotRegularSemisimple,
    UnsupportedRank,
    WrongSide,
)
from afl_lab.field import ArithContext, FieldElement
from afl_lab.finitefield import charpoly as fq_charpoly
from afl_lab.finitefield import classify, closed_formula, gf, is_self_reciprocal
from afl_lab.lattice import (
    DEFAULT_MODULE_CAP,
    DEFAULT_SUBMODULE_CAP,
    Lattice,
    counts_by_length,
    dual_lattice,
    enumerate_stable_submodules,
    quotient_module,
    row_lattice_dual,
)
from afl_lab.matrix import EMatrix
from afl_lab.orbits import (
    InvariantRecord,
    SymmetricPair,
    UnitaryModel,
    invariants,
    is_conj_self_reciprocal,
    is_minuscule,
    match_to_unitary,
    tau_map,
)

DEFAULT_COSET_CAP = 10**7


@dataclass(frozen=True)
class Caps:
    module_size: int = DEFAULT_MODULE_CAP
    submodules: int = DEFAULT_SUBMODULE_CAP
    cosets: int = DEFAULT_COSET_CAP


DEFAULT_CAPS = Caps()


class OrbLaurent:
    """Finitely supported ``{exponent: coefficient}`` in ``Q = q^(-2s)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, int] | None = None):
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c}

    def __eq__(self, other) -> bool:
        return isinstance(other, OrbLaurent) and self.coeffs == other.coeffs

    def __add__(self, other: "OrbLaurent") -> "OrbLaurent":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return OrbLaurent(out)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = [f"{c:+d}*Q^{e}" for e, c in sorted(self.coeffs.items())]
        return " ".join(terms)

    def at_one(self) -> int:
        """``Orb(0)``."""
        return sum(self.coeffs.values())

    def weighted_sum(self) -> int:
        """``sum e * c_e``; the derivative at s = 0 is ``-2 ln q`` times this."""
        return sum(e * c for e, c in self.coeffs.items())

    def evaluate(self, Q: Fraction) -> Fraction:
        return sum((Fraction(c) * Fraction(Q) ** e for e, c in self.coeffs.items()), Fraction(0))

    def to_json(self) -> list[list[int]]:
        return [[e, c] for e, c in sorted(self.coeffs.items())]

    @staticmethod
    def from_json(obj) -> "OrbLaurent":
        return OrbLaurent({int(e): int(c) for e, c in obj})


def orb_laurent(counts_M: Sequence[int], v: int) -> OrbLaurent:
    """Coefficient ``(-1)^(v-i) #M_i`` at exponent ``v - i``."""
    out: dict[int, int] = {}
    for i, m in enumerate(counts_M):
        e = v - i
        out[e] = out.get(e, 0) + (-1) ** (e % 2) * m
    return OrbLaurent(out)


def derivative_M(counts_M: Sequence[int], v: int) -> int:
    return sum((-1) ** i * (v - i) * m for i, m in enumerate(counts_M))


def derivative_N(counts_N: Sequence[int]) -> int:
    return sum((-1) ** (i + 1) * i * m for i, m in enumerate(counts_N))


def signed_orb0_N(counts_N: Sequence[int]) -> int:
    return sum((-1) ** i * m for i, m in enumerate(counts_N))


def _charpoly_integral(P: Sequence[FieldElement]) -> bool:
    return all(a.is_integral() for a in P) and P[0].val() == 0


def count_M(pair: SymmetricPair, caps: Caps = DEFAULT_CAPS) -> list[int]:
    inv = invariants(pair)
    zeros = [0] * (max(inv.delta, 0) + 1)
    if not _charpoly_integral(inv.charpoly):
        return zeros
    L1 = Lattice(pair.krylov())
    rows = []
    w = list(pair.y2)
    for _ in range(pair.n):
        rows.append(w)
        w = [x for x in (EMatrix(pair.ctx, [w]) * pair.zeta).e[0]]
    L2v = row_lattice_dual(EMatrix(pair.ctx, rows))
    if not L2v.contains_lattice(L1):
        return zeros
    ident = EMatrix.identity(pair.ctx, pair.n)
    Q = quotient_module(L1, L2v, op=pair.zeta, invol=ident)
    subs = enumerate_stable_submodules(
        Q, require_op=True, require_invol=True, module_cap=caps.module_size, submodule_cap=caps.submodules
    )
    return counts_by_length(subs, Q.length)


def _unitary_lattices(model: UnitaryModel):
    L = Lattice.standard(model.ctx, model.n)
    Ls = dual_lattice(L, model.G)
    return L, Ls


def count_N(model: UnitaryModel, caps: Caps = DEFAULT_CAPS, descend: bool = True) -> list[int]:
    delta = model.delta()
    zeros = [0] * (max(delta, 0) + 1)
    if not _charpoly_integral(model.charpoly):
        return zeros
    L, Ls = _unitary_lattices(model)
    if not Ls.contains_lattice(L):
        return zeros
    Q = quotient_module(L, Ls, op=model.C, invol=tau_map(model))
    subs = enumerate_stable_submodules(
        Q,
        require_op=True,
        require_invol=True,
        module_cap=caps.module_size,
        submodule_cap=caps.submodules,
        descend=descend,
    )
    return counts_by_length(subs, Q.length)


def unitary_selfdual_count(model: UnitaryModel, caps: Caps = DEFAULT_CAPS) -> int:
    """Self-dual xi-stable lattices containing ``x`` (no tau condition)."""
    delta = model.delta()
    if delta % 2:
        raise WrongSide("self-dual lattices need even delta")
    if not _charpoly_integral(model.charpoly):
        return 0
    L, Ls = _unitary_lattices(model)
    if not Ls.contains_lattice(L):
        return 0
    Q = quotient_module(L, Ls, op=model.C, gram=model.G)
    subs = enumerate_stable_submodules(
        Q,
        require_op=True,
        require_selfdual=True,
        module_cap=caps.module_size,
        submodule_cap=caps.submodules,
    )
    return len(subs)


def residue_charpoly(model: UnitaryModel):
    """Characteristic polynomial over F_{q^2} of xi acting on ``L*/L``."""
    if not is_minuscule(model):
        raise NotMinuscule("L*/L is not killed by p")
    L, Ls = _unitary_lattices(model)
    Q = quotient_module(L, Ls, op=model.C)
    M = Q.residue_operator()
    k = gf(model.ctx)
    codes = [[x.residue().code for x in row] for row in M]
    return fq_charpoly(codes, k)


def minuscule_closed_value(model: UnitaryModel, rng: random.Random | None = None) -> int:
    Pbar = residue_charpoly(model)
    return closed_formula(classify(Pbar, rng or random.Random(0)))


def direct_coset_orb(pair: SymmetricPair, coset_cap: int = DEFAULT_COSET_CAP) -> OrbLaurent:
    """Brute-force sum over ``GL_n(F)/GL_n(O_F)`` for ``n <= 2``.

    Shares nothing with the lattice enumerator beyond field arithmetic.
    """
    n = pair.n
    if n > 2:
        raise UnsupportedRank("the coset oracle handles n <= 2 only")
    ctx = pair.ctx
    p = ctx.p
    if n == 1:
        y1, y2 = pair.y1[0], pair.y2[0]
        if not y1 or not y2:
            raise NotRegularSemisimple("zero y")
        if not pair.zeta.e[0][0].is_integral():
            return OrbLaurent()
        # g = p^k: need val(y1) - k >= 0 and val(y2) + k >= 0
        out = {}
        for k in range(-int(y2.val()), int(y1.val()) + 1):
            out[k] = (-1) ** (k % 2)
        return OrbLaurent(out)
    return _coset_sum_rank2(pair, coset_cap)


def _coset_sum_rank2(pair: SymmetricPair, coset_cap: int) -> OrbLaurent:
    ctx = pair.ctx
    p = ctx.p
    Y1 = pair.krylov()
    Zrows = EMatrix(ctx, [list(pair.y2), (EMatrix(ctx, [list(pair.y2)]) * pair.zeta).e[0]])
    if not Y1.det() or not Zrows.det():
        raise NotRegularSemisimple("pair is not regular semisimple")
    # Every contributing lattice sits between L1 and L2^v.  Its columns lie in
    # L2^v, so entries have valuation >= -K; it contains L1, hence p^K' O^2.
    # The triangular basis therefore has p^k1, p^k2 with -K <= k_i <= K' and
    # off-diagonal entry b of valuation >= -K, taken modulo p^k1.
    K = max(0, -int(Zrows.inverse().min_val()))
    Kp = max(0, -int(Y1.inverse().min_val()))
    total = sum(p ** (k1 + K) for k1 in range(-K, Kp + 1)) * (Kp + K + 1)
    if total > coset_cap:
        raise BoundOverflow(f"{total} cosets exceed the cap {coset_cap}")
    (a, b0), (c, d) = pair.zeta.e
    y10, y11 = pair.y1
    y20, y21 = pair.y2
    out: dict[int, int] = {}
    scale = Fraction(1, p**K)
    for k1 in range(-K, Kp + 1):
        P1 = Fraction(p) ** k1
        if not (y20 * P1).is_integral():
            continue
        for k2 in range(-K, Kp + 1):
            P2 = Fraction(p) ** k2
            if not (y11 / P2).is_integral():
                continue
            if not (c * (P1 / P2)).is_integral():
                continue
            hits = 0
            for t in range(p ** (k1 + K)):
                bb = t * scale
                # g = [[P1, bb], [0, P2]]
                if not (y20 * bb + y21 * P2).is_integral():
                    continue
                if not ((y10 - bb * y11 / P2) / P1).is_integral():
                    continue
                cb = c * bb / P2
                if not (a - cb).is_integral() or not (cb + d).is_integral():
                    continue
                m01 = ((a * bb + b0 * P2) - bb * (c * bb + d * P2) / P2) / P1
                if not m01.is_integral():
                    continue
                hits += 1
            if hits:
                e = k1 + k2
                out[e] = out.get(e, 0) + (-1) ** (e % 2) * hits
    return OrbLaurent(out)


def structural_checks(model: UnitaryModel, inv: InvariantRecord | None = None) -> dict[str, bool]:
    """Exact identities every matched or sampled model must satisfy."""
    n = model.n
    P = model.charpoly
    T = tau_map(model)
    checks = {
        "hermitian": model.is_hermitian(),
        "unitary": model.is_unitary(),
        "csr_charpoly": is_conj_self_reciprocal(P),
        "unit_norm_constant": P[0].norm() == 1,
        "tau_involution": T * T.conj() == EMatrix.identity(model.ctx, n),
        "tau_fixes_x": T.column(0) == model.x,
    }
    if inv is not None:
        checks["det_val_is_delta"] = model.delta() == inv.delta
        checks["charpoly_matches"] = tuple(P) == tuple(inv.charpoly)
    if is_minuscule(model):
        checks["residue_self_reciprocal"] = is_self_reciprocal(residue_charpoly(model))
    return checks


@dataclass
class OrbitalReport:
    invariants: dict
    counts_N: list[int]
    counts_M: list[int] | None = None
    orb: OrbLaurent | None = None
    orb0_signed: int = 0
    afl_lhs: int = 0
    afl_lhs_N: int = 0
    unitary_selfdual: int | None = None
    minuscule_closed: int | None = None
    verdicts: dict = field(default_factory=dict)
    structural: dict = field(default_factory=dict)

    @property
    def delta(self) -> int:
        return self.invariants["delta"]

    def proven_ok(self) -> bool:
        keys = ("duality", "bijection", "rfl1", "afl_minuscule", "oracle", "structural")
        return all(self.verdicts.get(k) is not False for k in keys)

    def finding(self) -> bool:
        return self.verdicts.get("rfl2") is False

    def to_json(self) -> dict:
        return {
            "invariants": self.invariants,
            "counts_N": self.counts_N,
            "counts_M": self.counts_M,
            "orb": self.orb.to_json() if self.orb is not None else None,
            "orb0_signed": self.orb0_signed,
            "afl_lhs": self.afl_lhs,
            "afl_lhs_N": self.afl_lhs_N,
            "unitary_selfdual": self.unitary_selfdual,
            "minuscule_closed": self.minuscule_closed,
            "verdicts": self.verdicts,
            "structural": self.structural,
        }


def _verdicts_common(rep: OrbitalReport, with_selfdual: bool, model: UnitaryModel, caps: Caps, closed: bool):
    N = rep.counts_N
    delta = rep.delta
    rep.verdicts["duality"] = N == N[::-1]
    rep.verdicts["rfl1"] = rep.orb0_signed == 0 if delta % 2 else True
    rep.verdicts["rfl2"] = None
    if with_selfdual and delta % 2 == 0:
        rep.unitary_selfdual = unitary_selfdual_count(model, caps)
        rep.verdicts["rfl2"] = rep.orb0_signed == rep.unitary_selfdual
    rep.verdicts["afl_minuscule"] = None
    if closed and is_minuscule(model):
        rep.minuscule_closed = minuscule_closed_value(model)
        if delta % 2:
            rep.verdicts["afl_minuscule"] = rep.afl_lhs == rep.minuscule_closed
    rep.verdicts["structural"] = all(rep.structural.values())


def analyze_pair(
    pair: SymmetricPair,
    caps: Caps = DEFAULT_CAPS,
    oracle: bool = False,
    selfdual: bool = True,
    closed: bool = True,
) -> OrbitalReport:
    inv = invariants(pair)
    model = match_to_unitary(pair)
    N = count_N(model, caps)
    M = count_M(pair, caps)
    orb = orb_laurent(M, inv.v)
    rep = OrbitalReport(
        invariants=inv.to_json(),
        counts_N=N,
        counts_M=M,
        orb=orb,
        orb0_signed=inv.omega * orb.at_one(),
        afl_lhs=inv.omega * orb.weighted_sum(),
        afl_lhs_N=derivative_N(N),
    )
    rep.structural = structural_checks(model, inv)
    rep.verdicts["bijection"] = M == N
    _verdicts_common(rep, selfdual, model, caps, closed)
    # the M- and N-forms of D differ by v * (omega Orb(0)); check that identity too
    rep.verdicts["derivative_forms"] = rep.afl_lhs - rep.afl_lhs_N == inv.v * rep.orb0_signed
    rep.verdicts["oracle"] = None
    if oracle:
        rep.verdicts["oracle"] = direct_coset_orb(pair, caps.cosets) == orb
    return rep


def analyze_model(
    model: UnitaryModel,
    caps: Caps = DEFAULT_CAPS,
    selfdual: bool = False,
    closed: bool = True,
) -> OrbitalReport:
    """Report for a unitary model alone; ``v`` is unknown so only N-side forms appear."""
    delta = model.delta()
    N = count_N(model, caps)
    rep = OrbitalReport(
        invariants={"delta": delta, "side": "plus" if delta % 2 == 0 else "minus"},
        counts_N=N,
        orb0_signed=signed_orb0_N(N),
        afl_lhs=derivative_N(N),
        afl_lhs_N=derivative_N(N),
    )
    rep.structural = structural_checks(model)
    _verdicts_common(rep, selfdual, model, caps, closed)
    return rep


__all__ = [
    "Caps",
    "ComplexityExceeded",
    "OrbLaurent",
    "OrbitalReport",
    "analyze_model",
    "analyze_pair",
    "count_M",
    "count_N",
    "derivative_M",
    "derivative_N",
    "direct_coset_orb",
    "minuscule_closed_value",
    "orb_laurent",
    "residue_charpoly",
    "signed_orb0_N",
    "structural_checks",
    "unitary_selfdual_count",
]
