"""O_E-lattices in E^n, their duals, and finite quotient modules.

Here ``O`` is the local ring of E at ``p`` (a DVR with uniformizer ``p``), so a
lattice is the O-span of the columns of an invertible matrix.  Lattices are kept
in a canonical column Hermite form so equality of lattices is equality of bases.

The quotient ``L'/L`` of two lattices is handed to :mod:`afl_lab.pgroup` as a
finite abelian p-group.  When a semilinear involution is present the enumeration
runs on its fixed points (Galois descent: stable submodules of ``L'/L`` are
O_E-spans of O_F-submodules of the fixed part), which halves the rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from afl_lab.errors import (
    ComplexityExceeded,
    DegeneratePairing,
    MissingStructure,
    NotContained,
    NotFullRank,
    NotStable,
    SingularMatrix,
)
from afl_lab.field import INF, ArithContext, FieldElement, canonical_rep, reduce_mod_pk
from afl_lab.matrix import (
    EMatrix,
    realify_lattice_basis,
    realify_linear,
    realify_semilinear,
    realify_vector,
    unrealify_vector,
)
from afl_lab.pgroup import HNF, PGroup

DEFAULT_MODULE_CAP = 10**6
DEFAULT_SUBMODULE_CAP = 10**5


def _unit_part(x: FieldElement, v: int) -> FieldElement:
    return x * Fraction(1, x.ctx.p**v) if v >= 0 else x * x.ctx.p ** (-v)


def _scale_pow(ctx: ArithContext, k: int) -> FieldElement:
    return ctx.E(Fraction(ctx.p) ** k)


def canonical_basis(gens: EMatrix) -> "Lattice":
    """Canonical basis of the O-span of the columns of ``gens``.

    Basis vector ``k`` vanishes in coordinates ``< k`` and has ``p^a_k`` in
    coordinate ``k``; written as rows the basis is upper triangular.  Later
    coordinates of each vector are reduced modulo the later pivots.
    """
    ctx = gens.ctx
    p = ctx.p
    n = gens.rows
    cols = [c for c in gens.columns() if any(c)]
    basis: list[list[FieldElement]] = []
    exps = []
    for i in range(n):
        best, bv = -1, INF
        for idx, c in enumerate(cols):
            if c[i]:
                v = c[i].val()
                if v < bv:
                    best, bv = idx, v
        if best < 0:
            raise NotFullRank("generators do not span a full-rank lattice")
        bv = int(bv)
        c = cols.pop(best)
        pv = _scale_pow(ctx, bv)
        s = pv / c[i]  # a unit of O
        c = [x * s for x in c]
        c[i] = pv
        rest = []
        for d in cols:
            if d[i]:
                f = d[i] / pv
                d = [y - f * z for y, z in zip(d, c)]
            if any(d):
                rest.append(d)
        cols = rest
        basis.append(c)
        exps.append(bv)
    for j in range(n):
        col = basis[j]
        for i in range(j + 1, n):
            x = col[i]
            e = exps[i]
            rep = ctx.E(canonical_rep(x.a, p, e), canonical_rep(x.b, p, e))
            if rep != x:
                f = (x - rep) / _scale_pow(ctx, e)
                col = [y - f * z for y, z in zip(col, basis[i])]
                col[i] = rep
        basis[j] = col
    return Lattice(EMatrix.from_columns(ctx, basis), _checked=True)


@dataclass(frozen=True)
class SmithResult:
    exps: tuple[int, ...]
    V: EMatrix  # column transform, O-invertible


def smith(M: EMatrix, track: bool = True) -> SmithResult:
    """Smith form over O: ``P M V = diag(p^a)`` with ``a`` ascending.

    Only the column transform ``V`` is tracked.  Real input stays real.
    """
    ctx = M.ctx
    n = M.rows
    if n != M.cols:
        raise ValueError("smith form needs a square matrix")
    a = [list(r) for r in M.e]
    V = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)] if track else None
    exps = []
    for k in range(n):
        best, bv = None, INF
        for i in range(k, n):
            for j in range(k, n):
                if a[i][j]:
                    v = a[i][j].val()
                    if v < bv:
                        best, bv = (i, j), v
        if best is None:
            raise SingularMatrix("matrix is singular")
        bi, bj = best
        a[k], a[bi] = a[bi], a[k]
        for r in a:
            r[k], r[bj] = r[bj], r[k]
        if track:
            for r in V:
                r[k], r[bj] = r[bj], r[k]
        bv = int(bv)
        pv = _scale_pow(ctx, bv)
        s = pv / a[k][k]
        for r in a:
            r[k] = r[k] * s
        if track:
            for r in V:
                r[k] = r[k] * s
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / pv
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        for j in range(k + 1, n):
            if a[k][j]:
                f = a[k][j] / pv
                for r in a:
                    r[j] = r[j] - f * r[k]
                if track:
                    for r in V:
                        r[j] = r[j] - f * r[k]
        exps.append(bv)
    if track:
        return SmithResult(tuple(exps), EMatrix(ctx, V))
    return SmithResult(tuple(exps), None)  # type: ignore[arg-type]


def elementary_divisors(M: EMatrix) -> list[int]:
    """Valuations of the elementary divisors of a nonsingular matrix, ascending."""
    return sorted(smith(M, track=False).exps)


class Lattice:
    """Full-rank O-lattice in E^n, stored by its canonical basis (columns)."""

    __slots__ = ("basis",)

    def __init__(self, basis: EMatrix, _checked: bool = False):
        if not _checked:
            basis = canonical_basis(basis).basis
        self.basis = basis

    @property
    def ctx(self) -> ArithContext:
        return self.basis.ctx

    @property
    def n(self) -> int:
        return self.basis.rows

    @classmethod
    def standard(cls, ctx: ArithContext, n: int) -> "Lattice":
        return cls(EMatrix.identity(ctx, n))

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.basis == other.basis

    def __hash__(self):
        return hash(tuple((x.a, x.b) for r in self.basis.e for x in r))

    def __repr__(self):
        return f"Lattice({self.basis.e!r})"

    def diagonal_exponents(self) -> list[int]:
        return [int(self.basis.e[i][i].val()) for i in range(self.n)]

    def coordinates(self, v: Sequence[FieldElement]) -> list[FieldElement]:
        """Solve ``basis * c = v`` by forward substitution."""
        n = self.n
        c = [self.ctx.zero] * n
        w = list(v)
        b = self.basis.e
        for i in range(n):
            c[i] = w[i] / b[i][i]
            if c[i]:
                for r in range(i, n):
                    w[r] = w[r] - c[i] * b[r][i]
        return c

    def contains(self, v: Sequence[FieldElement]) -> bool:
        return all(x.val() >= 0 for x in self.coordinates(v))

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(c) for c in other.basis.columns())

    def __add__(self, other: "Lattice") -> "Lattice":
        return canonical_basis(self.basis.hstack(other.basis))

    def intersection(self, other: "Lattice") -> "Lattice":
        return dual_lattice(dual_lattice(self) + dual_lattice(other))

    def scaled(self, k: int) -> "Lattice":
        return canonical_basis(self.basis * _scale_pow(self.ctx, k))

    def volume(self) -> int:
        """``val det`` of the basis; ``length(M/L) = L.volume() - M.volume()``."""
        return sum(self.diagonal_exponents())

    def length_over(self, smaller: "Lattice") -> int:
        return smaller.volume() - self.volume()

    def is_stable(self, op: EMatrix) -> bool:
        return all(self.contains(op.apply(c)) for c in self.basis.columns())

    def is_stable_semilinear(self, T: EMatrix) -> bool:
        return all(self.contains(T.apply([x.conj() for x in c])) for c in self.basis.columns())

    def to_json(self) -> list:
        return self.basis.to_json()


def dual_lattice(L: Lattice, gram: EMatrix | None = None) -> Lattice:
    """Dual of ``L``.

    Without ``gram``: the standard sesquilinear dual ``{w : w^H v in O for v in L}``
    (a row ``x`` pairs with a column ``v`` as ``conj(x) v``; rows are stored as
    conjugate transposes).  With ``gram``: ``{w : v^T G conj(w) in O for v in L}``.
    """
    B = L.basis
    if gram is None:
        return canonical_basis(B.H.inverse())
    if gram.rows != B.rows or gram.H != gram:
        raise DegeneratePairing("gram matrix must be hermitian of matching size")
    try:
        return canonical_basis((B.H * gram.T).inverse())
    except SingularMatrix as exc:
        raise DegeneratePairing("degenerate hermitian form") from exc


def row_lattice_dual(rows: EMatrix) -> Lattice:
    """Column lattice dual to the O-span of the rows ``x`` under ``conj(x) v``."""
    return canonical_basis(rows.conj().inverse())


def fixed_sublattice(B: EMatrix) -> EMatrix:
    """Basis of ``L ∩ F^n`` for the O-lattice spanned by the columns of ``B``."""
    n = B.rows
    R = realify_lattice_basis(B)
    # imaginary parts first, so the last n canonical vectors are the real ones
    R = R.submatrix(list(range(n, 2 * n)) + list(range(n)), range(R.cols))
    H = canonical_basis(R).basis
    return H.submatrix(range(n, 2 * n), range(n, 2 * n))


def fixed_basis(T: EMatrix) -> EMatrix:
    """An E-basis of E^n made of vectors fixed by ``v -> T conj(v)``."""
    ctx = T.ctx
    n = T.rows
    s = ctx.sqrt_u
    chosen: list[list[FieldElement]] = []
    for j in range(n):
        e = [ctx.one if i == j else ctx.zero for i in range(n)]
        te = T.column(j)
        for cand in ([x + y for x, y in zip(e, te)], [s * (x - y) for x, y in zip(e, te)]):
            if not any(cand):
                continue
            trial = chosen + [cand]
            if EMatrix.from_columns(ctx, trial).rank() == len(trial):
                chosen = trial
            if len(chosen) == n:
                return EMatrix.from_columns(ctx, chosen)
    raise MissingStructure("map is not a semilinear involution")


def _int_matrix(M: EMatrix, A: int) -> list[list[int]]:
    return [[reduce_mod_pk(x.a, M.ctx.p, A) for x in r] for r in M.e]


def _imag_int_matrix(M: EMatrix, A: int) -> list[list[int]]:
    return [[reduce_mod_pk(x.b, M.ctx.p, A) for x in r] for r in M.e]


def _pairing_data(vectors: list[list[FieldElement]], gram: EMatrix):
    ctx = gram.ctx
    p = ctx.p
    vals = []
    for vi in vectors:
        gv = gram.T.apply(vi)  # v^T G = (G^T v)^T
        row = []
        for vj in vectors:
            acc = ctx.zero
            for x, y in zip(gv, vj):
                acc = acc + x * y.conj()
            row.append(acc)
        vals.append(row)
    s = max(0, -min((int(x.val()) for r in vals for x in r if x), default=0))
    scale = Fraction(p) ** s
    pa = [[reduce_mod_pk(x.a * scale, p, s) for x in r] for r in vals]
    pb = [[reduce_mod_pk(x.b * scale, p, s) for x in r] for r in vals]
    return pa, pb, s


@dataclass
class Submodule:
    """A submodule of ``L'/L``, with its O_E-length."""

    module: "FiniteModule" = field(repr=False)
    hnf: HNF = field(repr=False)
    length: int
    descended: bool

    @property
    def key(self):
        return self.hnf.key

    def generators(self) -> list[list[FieldElement]]:
        """Ambient vectors whose O-span together with ``L`` is the lift."""
        Q = self.module
        basis = Q._desc_basis if self.descended else Q._real_basis
        out = []
        for h, e in zip(self.hnf.cols, self.hnf.exps):
            if e >= (Q._desc_group if self.descended else Q._real_group).A:
                continue
            vec = [Q.ctx.zero] * basis.rows
            for coef, col in zip(h, basis.columns()):
                if coef:
                    vec = [x + coef * y for x, y in zip(vec, col)]
            out.append(vec if self.descended else unrealify_vector(vec))
        return out

    def lift(self) -> Lattice:
        Q = self.module
        gens = self.generators()
        M = Q.L.basis
        if gens:
            M = M.hstack(EMatrix.from_columns(Q.ctx, gens))
        return canonical_basis(M)


class FiniteModule:
    """The finite O_E-module ``Lp/L`` with optional induced structure.

    ``op`` is an E-linear map, ``invol`` the matrix ``T`` of a semilinear
    involution ``v -> T conj(v)``, ``gram`` a hermitian form ``v^T G conj(w)``.
    """

    def __init__(
        self,
        L: Lattice,
        Lp: Lattice,
        op: EMatrix | None = None,
        invol: EMatrix | None = None,
        gram: EMatrix | None = None,
    ):
        if not Lp.contains_lattice(L):
            raise NotContained("L is not contained in L'")
        for lat in (L, Lp):
            if op is not None and not lat.is_stable(op):
                raise NotStable("operator does not preserve the lattices")
            if invol is not None and not lat.is_stable_semilinear(invol):
                raise NotStable("involution does not preserve the lattices")
        self.L, self.Lp = L, Lp
        self.ctx = L.ctx
        self.op, self.invol, self.gram = op, invol, gram
        K = Lp.basis.inverse() * L.basis
        sm = smith(K)
        self.divisors = tuple(sorted(a for a in sm.exps if a > 0))
        self._oe_smith = sm
        self._real_group = None
        self._real_basis = None
        self._desc_group = None
        self._desc_basis = None

    @property
    def length(self) -> int:
        return sum(self.divisors)

    @property
    def size(self) -> int:
        return self.ctx.p ** (2 * self.length)

    def to_json(self) -> dict:
        return {"divisors": list(self.divisors), "size": self.size}

    def adapted_basis(self) -> tuple[EMatrix, tuple[int, ...]]:
        """O_E-basis ``U`` of ``Lp`` with ``L`` spanned by ``p^a_j u_j``."""
        sm = self._oe_smith
        ctx = self.ctx
        dinv = EMatrix.diag(ctx, [_scale_pow(ctx, -a) for a in sm.exps])
        return self.L.basis * sm.V * dinv, sm.exps

    def residue_operator(self) -> list[list[FieldElement]]:
        """Matrix of ``op`` on the p-torsion layer when every divisor is 1."""
        if self.op is None:
            raise MissingStructure("no operator supplied")
        if any(a > 1 for a in self.divisors):
            raise ValueError("quotient is not killed by p")
        U, exps = self.adapted_basis()
        M = U.inverse() * self.op * U
        keep = [j for j, a in enumerate(exps) if a == 1]
        return [[M.e[i][j] for j in keep] for i in keep]

    def residue_involution(self) -> list[list[FieldElement]]:
        """Matrix ``N`` with ``tau(z) = N conj(z)`` on the p-torsion layer."""
        if self.invol is None:
            raise MissingStructure("no involution supplied")
        U, exps = self.adapted_basis()
        N = U.inverse() * self.invol * U.conj()
        keep = [j for j, a in enumerate(exps) if a == 1]
        return [[N.e[i][j] for j in keep] for i in keep]

    def _build_real(self, with_op: bool, with_invol: bool, with_pairing: bool) -> PGroup:
        ctx = self.ctx
        Bl = realify_lattice_basis(self.L.basis)
        Bp = realify_lattice_basis(self.Lp.basis)
        sm = smith(Bp.inverse() * Bl)
        dinv = EMatrix.diag(ctx, [_scale_pow(ctx, -a) for a in sm.exps])
        U = Bl * sm.V * dinv
        keep = [j for j, a in enumerate(sm.exps) if a > 0]
        exps = [sm.exps[j] for j in keep]
        A = max(exps, default=0)
        Uinv = U.inverse()
        maps = [realify_linear(EMatrix.diag(ctx, [ctx.sqrt_u] * self.L.n))]
        if with_op:
            maps.append(realify_linear(self.op))
        if with_invol:
            maps.append(realify_semilinear(self.invol))
        ops = []
        for f in maps:
            M = Uinv * f * U
            ops.append([[reduce_mod_pk(M.e[i][j].a, ctx.p, A) for j in keep] for i in keep])
        Uk = U.submatrix(range(U.rows), keep)
        pairing = None
        if with_pairing:
            pairing = _pairing_data([unrealify_vector(c) for c in Uk.columns()], self.gram)
        self._real_basis = Uk
        self._real_group = PGroup(ctx.p, exps, ops, pairing)
        return self._real_group

    def _build_descended(self, with_op: bool, with_pairing: bool) -> PGroup:
        ctx = self.ctx
        W = fixed_basis(self.invol)
        Winv = W.inverse()
        Fl = fixed_sublattice(Winv * self.L.basis)
        Fp = fixed_sublattice(Winv * self.Lp.basis)
        sm = smith(Fp.inverse() * Fl)
        dinv = EMatrix.diag(ctx, [_scale_pow(ctx, -a) for a in sm.exps])
        Uz = Fl * sm.V * dinv
        keep = [j for j, a in enumerate(sm.exps) if a > 0]
        exps = [sm.exps[j] for j in keep]
        A = max(exps, default=0)
        ops = []
        if with_op:
            M = Uz.inverse() * Winv * self.op * W * Uz
            Mk = M.submatrix(keep, keep)
            ops = [_int_matrix(Mk, A), _imag_int_matrix(Mk, A)]
        amb = (W * Uz).submatrix(range(W.rows), keep)
        pairing = None
        if with_pairing:
            pairing = _pairing_data(amb.columns(), self.gram)
        self._desc_basis = amb
        self._desc_group = PGroup(ctx.p, exps, ops, pairing)
        return self._desc_group


def quotient_module(
    L: Lattice,
    Lp: Lattice,
    op: EMatrix | None = None,
    invol: EMatrix | None = None,
    gram: EMatrix | None = None,
) -> FiniteModule:
    return FiniteModule(L, Lp, op, invol, gram)


def enumerate_stable_submodules(
    Q: FiniteModule,
    require_op: bool = False,
    require_invol: bool = False,
    require_selfdual: bool = False,
    module_cap: int = DEFAULT_MODULE_CAP,
    submodule_cap: int = DEFAULT_SUBMODULE_CAP,
    descend: bool = True,
) -> list[Submodule]:
    """All O_E-submodules of ``Q`` with the requested stability, canonically ordered.

    ``descend=False`` forces the rank-2n route even when an involution is
    required; both routes must agree and the tests hold them to it.
    """
    if require_op and Q.op is None:
        raise MissingStructure("operator stability requested but no operator given")
    if require_invol and Q.invol is None:
        raise MissingStructure("involution stability requested but no involution given")
    if require_selfdual and Q.gram is None:
        raise MissingStructure("self-duality requested but no hermitian form given")
    if Q.size > module_cap:
        raise ComplexityExceeded(f"quotient has {Q.size} elements (cap {module_cap})")
    target = None
    if require_selfdual:
        Ls = dual_lattice(Q.L, Q.gram)
        if not Ls.contains_lattice(Q.L):
            return []
        if not Ls.contains_lattice(Q.Lp):
            raise MissingStructure("self-duality needs L' inside the dual of L")
        delta = Ls.length_over(Q.L)
        if delta % 2:
            return []
        target = delta // 2
    descended = require_invol and descend
    if descended:
        G = Q._build_descended(require_op, require_selfdual)
        scale = 1
    else:
        G = Q._build_real(require_op, require_invol, require_selfdual)
        scale = 2
    predicate = G.isotropic if require_selfdual else None
    found = G.enumerate(predicate, cap=submodule_cap)
    out = [Submodule(Q, X, G.length(X) // scale, descended) for X in found]
    if target is not None:
        out = [s for s in out if s.length == target]
    return out


def counts_by_length(subs: Sequence[Submodule], top: int) -> list[int]:
    counts = [0] * (top + 1)
    for s in subs:
        counts[s.length] += 1
    return counts


def echelon_subspaces(ctx: ArithContext, dim: int) -> list[list[list[int]]]:
    """Every subspace of F_{q^2}^dim as a reduced-row-echelon basis of codes.

    Independent brute-force enumeration used to cross-check the module engine.
    """
    from afl_lab.finitefield import gf

    k = gf(ctx)
    out: list[list[list[int]]] = [[]]
    for r in range(1, dim + 1):
        for pivots in itertools.combinations(range(dim), r):
            free = [
                (i, j)
                for i, pc in enumerate(pivots)
                for j in range(pc + 1, dim)
                if j not in pivots
            ]
            for values in itertools.product(range(k.order), repeat=len(free)):
                rows = [[0] * dim for _ in range(r)]
                for i, pc in enumerate(pivots):
                    rows[i][pc] = 1
                for (i, j), x in zip(free, values):
                    rows[i][j] = x
                out.append(rows)
    return out
