"""Regular semisimple pairs on both sides and the matching between them.

The symmetric side is a pair ``(zeta, y1, y2)`` with ``zeta conj(zeta) = 1`` and
``y1, y2`` over F.  The unitary side is only ever seen through its cyclic Gram
model: basis ``x, xi x, ..., xi^(n-1) x`` with ``xi`` the companion matrix of the
common characteristic polynomial and Gram matrix ``G[a][b] = c_(a-b)``, the form
being ``(v, w) = v^T G conj(w)`` (linear in the first slot).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from afl_lab.errors import (
    InconsistentMoments,
    NotRegularSemisimple,
    SamplingExhausted,
    SingularMatrix,
)
from afl_lab.field import INF, ArithContext, FieldElement, mu_sign
from afl_lab.lattice import elementary_divisors
from afl_lab.matrix import EMatrix, companion

RETRY_CAP = 10**4


def _ctx_json(ctx: ArithContext) -> dict:
    return ctx.to_json()


@dataclass(frozen=True)
class SymmetricPair:
    ctx: ArithContext
    n: int
    zeta: EMatrix
    y1: tuple[FieldElement, ...]  # column
    y2: tuple[FieldElement, ...]  # row

    def __post_init__(self):
        if self.zeta.shape != (self.n, self.n) or len(self.y1) != self.n or len(self.y2) != self.n:
            raise ValueError("inconsistent dimensions")
        if any(not x.in_base_field() for x in self.y1 + self.y2):
            raise ValueError("y must have entries in F")

    @classmethod
    def make(cls, ctx: ArithContext, zeta, y1, y2) -> "SymmetricPair":
        Z = zeta if isinstance(zeta, EMatrix) else EMatrix(ctx, zeta)
        lift = lambda x: x if isinstance(x, FieldElement) else ctx.E(x)  # noqa: E731
        return cls(ctx, Z.rows, Z, tuple(lift(x) for x in y1), tuple(lift(x) for x in y2))

    def in_symmetric_space(self) -> bool:
        return self.zeta * self.zeta.conj() == EMatrix.identity(self.ctx, self.n)

    def moment(self, i: int) -> FieldElement:
        return _dot(self.y2, (self.zeta**i).apply(self.y1))

    def moments(self, count: int) -> list[FieldElement]:
        out = []
        w = list(self.y1)
        for _ in range(count):
            out.append(_dot(self.y2, w))
            w = self.zeta.apply(w)
        return out

    def krylov(self) -> EMatrix:
        """Columns ``zeta^k y1``."""
        cols = []
        w = list(self.y1)
        for _ in range(self.n):
            cols.append(w)
            w = self.zeta.apply(w)
        return EMatrix.from_columns(self.ctx, cols)

    def to_json(self) -> dict:
        return {
            "ctx": _ctx_json(self.ctx),
            "zeta": self.zeta.to_json(),
            "y1": [x.to_json() for x in self.y1],
            "y2": [x.to_json() for x in self.y2],
        }

    @staticmethod
    def from_json(obj: dict) -> "SymmetricPair":
        ctx = ArithContext.from_json(obj["ctx"])
        Z = EMatrix.from_json(obj["zeta"], ctx)
        return SymmetricPair(
            ctx,
            Z.rows,
            Z,
            tuple(FieldElement.from_json(x, ctx) for x in obj["y1"]),
            tuple(FieldElement.from_json(x, ctx) for x in obj["y2"]),
        )


def _dot(a: Sequence[FieldElement], b: Sequence[FieldElement]) -> FieldElement:
    acc = a[0].ctx.zero
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


@dataclass(frozen=True)
class InvariantRecord:
    moments: tuple[FieldElement, ...]
    charpoly: tuple[FieldElement, ...]
    v: int
    Delta: FieldElement
    delta: int
    omega: int
    side: str

    def to_json(self) -> dict:
        return {
            "moments": [c.to_json() for c in self.moments],
            "charpoly": [c.to_json() for c in self.charpoly],
            "v": self.v,
            "Delta": self.Delta.to_json(),
            "delta": self.delta,
            "omega": self.omega,
            "side": self.side,
        }


@dataclass(frozen=True)
class UnitaryModel:
    ctx: ArithContext
    n: int
    G: EMatrix
    C: EMatrix

    @property
    def x(self) -> list[FieldElement]:
        return [self.ctx.one if i == 0 else self.ctx.zero for i in range(self.n)]

    @property
    def charpoly(self) -> list[FieldElement]:
        # last column of the companion matrix holds -a_0..-a_(n-1)
        return [-self.C.e[k][self.n - 1] for k in range(self.n)] + [self.ctx.one]

    def pairing(self, v, w) -> FieldElement:
        gw = self.G.apply([x.conj() for x in w])
        return _dot(v, gw)

    def is_hermitian(self) -> bool:
        return self.G.H == self.G

    def is_unitary(self) -> bool:
        return self.C.T * self.G * self.C.conj() == self.G

    def delta(self) -> int:
        d = self.G.det()
        if not d:
            raise NotRegularSemisimple("Gram matrix is singular")
        return int(d.val())

    def to_json(self) -> dict:
        return {"ctx": _ctx_json(self.ctx), "G": self.G.to_json(), "C": self.C.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "UnitaryModel":
        ctx = ArithContext.from_json(obj["ctx"])
        G = EMatrix.from_json(obj["G"], ctx)
        return UnitaryModel(ctx, G.rows, G, EMatrix.from_json(obj["C"], ctx))


def hankel(moments: Sequence[FieldElement], n: int) -> EMatrix:
    ctx = moments[0].ctx
    return EMatrix(ctx, [[moments[i + j] for j in range(n)] for i in range(n)])


def is_regular_semisimple(obj) -> bool:
    if isinstance(obj, UnitaryModel):
        return bool(obj.G.det())
    n = obj.n
    if not any(obj.y1) or not any(obj.y2):
        return False
    return bool(hankel(obj.moments(2 * n - 1), n).det())


def invariants(pair: SymmetricPair) -> InvariantRecord:
    n = pair.n
    c = pair.moments(2 * n - 1)
    D = hankel(c, n).det()
    if not D:
        raise NotRegularSemisimple("Hankel matrix of moments is singular")
    v = int(pair.krylov().det().val())
    delta = int(D.val())
    return InvariantRecord(
        moments=tuple(c[:n]),
        charpoly=tuple(pair.zeta.charpoly()),
        v=v,
        Delta=D,
        delta=delta,
        omega=-1 if v % 2 else 1,
        side="plus" if delta % 2 == 0 else "minus",
    )


def is_conj_self_reciprocal(P: Sequence[FieldElement]) -> bool:
    """``T^n conj(P)(1/T) = conj(P(0)) P(T)`` coefficientwise."""
    n = len(P) - 1
    a0c = P[0].conj()
    return all(P[n - j].conj() == a0c * P[j] for j in range(n + 1))


def extend_moments(P: Sequence[FieldElement], c: Sequence[FieldElement], lo: int, hi: int) -> dict[int, FieldElement]:
    """Extend ``c_0..c_(n-1)`` by the recursion of ``P`` and ``c_(-m) = conj(c_m)``."""
    n = len(P) - 1
    if len(c) != n:
        raise ValueError("need exactly n initial moments")
    if not c[0].in_base_field():
        raise InconsistentMoments("c_0 must lie in F")
    if not P[0]:
        raise InconsistentMoments("characteristic polynomial has zero constant term")
    top = max(hi, n - 1, 2 * n)
    fwd = list(c)
    for m in range(n, top + 1):
        acc = c[0].ctx.zero
        for k in range(n):
            acc = acc - P[k] * fwd[m - n + k]
        fwd.append(acc)
    # backward recursion: c_j = -(sum_{k>=1} a_k c_(j+k)) / a_0
    bottom = min(lo, -2 * n)
    back = {m: fwd[m] for m in range(n)}
    inv0 = P[0].inverse()
    for j in range(-1, bottom - 1, -1):
        acc = c[0].ctx.zero
        for k in range(1, n + 1):
            acc = acc + P[k] * back[j + k]
        back[j] = -acc * inv0
    for m in range(0, 2 * n + 1):
        if back[-m] != fwd[m].conj():
            raise InconsistentMoments("recursion and conjugate symmetry disagree")
    out = {}
    for m in range(lo, hi + 1):
        out[m] = fwd[m] if m >= 0 else back[m]
    return out


def match_to_unitary(pair: SymmetricPair) -> UnitaryModel:
    if not is_regular_semisimple(pair):
        raise NotRegularSemisimple("pair is not regular semisimple")
    n = pair.n
    P = pair.zeta.charpoly()
    ext = extend_moments(P, pair.moments(n), -(n - 1), n - 1)
    G = EMatrix(pair.ctx, [[ext[a - b] for b in range(n)] for a in range(n)])
    return UnitaryModel(pair.ctx, n, G, companion(pair.ctx, P))


def tau_map(model: UnitaryModel) -> EMatrix:
    """Matrix ``T`` with ``tau(v) = T conj(v)``: sends ``a xi^i x`` to ``conj(a) xi^-i x``."""
    n = model.n
    Cinv = model.C.inverse()
    cols = []
    w = model.x
    for _ in range(n):
        cols.append(w)
        w = Cinv.apply(w)
    return EMatrix.from_columns(model.ctx, cols)


def apply_tau(T: EMatrix, v: Sequence[FieldElement]) -> list[FieldElement]:
    return T.apply([x.conj() for x in v])


def is_minuscule(model: UnitaryModel) -> bool:
    try:
        divs = elementary_divisors(model.G)
    except SingularMatrix:
        return False
    return all(d in (0, 1) for d in divs)


def orbit_act(pair: SymmetricPair, g: EMatrix) -> SymmetricPair:
    if not g.is_real():
        raise ValueError("g must have entries in F")
    ginv = g.inverse()
    z = ginv * pair.zeta * g
    y1 = ginv.apply(list(pair.y1))
    y2 = EMatrix(pair.ctx, [list(pair.y2)]) * g
    return SymmetricPair(pair.ctx, pair.n, z, tuple(y1), tuple(y2.e[0]))


def orbit_shift(g: EMatrix) -> tuple[int, int]:
    """``(-val det g, mu_sign det g)``: how ``v`` and ``omega`` move under ``g``."""
    d = g.det()
    return -int(d.val()), mu_sign(d)


# ---------------------------------------------------------------- sampling


def _unit_int(rng: random.Random, p: int) -> int:
    while True:
        a = rng.randrange(1, p**3)
        if a % p:
            return a if rng.random() < 0.5 else -a


def _rand_O_E(rng: random.Random, ctx: ArithContext) -> FieldElement:
    p = ctx.p
    return ctx.E(rng.randrange(-(p**3), p**3), rng.randrange(-(p**3), p**3))


def _rand_unit_E(rng: random.Random, ctx: ArithContext) -> FieldElement:
    while True:
        x = _rand_O_E(rng, ctx)
        if x and x.val() == 0:
            return x


def _rand_F_entry(rng: random.Random, ctx: ArithContext, budget: int) -> FieldElement:
    if rng.random() < 0.15:
        return ctx.zero
    k = rng.randint(0, budget)
    return ctx.E(ctx.p**k * _unit_int(rng, ctx.p))


def random_gl_O_E(rng: random.Random, ctx: ArithContext, n: int) -> EMatrix:
    while True:
        g = EMatrix(ctx, [[_rand_O_E(rng, ctx) for _ in range(n)] for _ in range(n)])
        d = g.det()
        if d and d.val() == 0:
            return g


def sample_symmetric(ctx: ArithContext, n: int, seed: int, val_budget: int = 1, retries: int = RETRY_CAP) -> SymmetricPair:
    """Random rs pair with ``zeta = g conj(g)^-1``, ``g`` in GL_n(O_E)."""
    if n < 1 or val_budget < 0:
        raise ValueError("need n >= 1 and val_budget >= 0")
    rng = random.Random(seed)
    for _ in range(retries):
        g = random_gl_O_E(rng, ctx, n)
        zeta = g * g.conj().inverse()
        y1 = tuple(_rand_F_entry(rng, ctx, val_budget) for _ in range(n))
        y2 = tuple(_rand_F_entry(rng, ctx, val_budget) for _ in range(n))
        pair = SymmetricPair(ctx, n, zeta, y1, y2)
        if is_regular_semisimple(pair):
            return pair
    raise SamplingExhausted(f"no regular semisimple pair after {retries} tries")


def random_F_matrix(rng: random.Random, ctx: ArithContext, n: int, spread: int = 1) -> EMatrix:
    """Invertible F-matrix with entries of valuation in ``[-spread, spread]``."""
    while True:
        rows = []
        for _ in range(n):
            row = []
            for _ in range(n):
                if rng.random() < 0.3:
                    row.append(ctx.zero)
                else:
                    k = rng.randint(-spread, spread)
                    row.append(ctx.E(Fraction(ctx.p) ** k * _unit_int(rng, ctx.p)))
            rows.append(row)
        g = EMatrix(ctx, rows)
        if g.det():
            return g


def _poly_mul(a: list[FieldElement], b: list[FieldElement]) -> list[FieldElement]:
    ctx = a[0].ctx
    out = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _csr_block(rng: random.Random, ctx: ArithContext, k: int) -> list[FieldElement]:
    """Random monic integral conjugate-self-reciprocal polynomial of degree ``k``."""
    mu = _rand_unit_E(rng, ctx)
    a0 = mu / mu.conj()
    if k == 1:
        return [-a0, ctx.one]
    if k == 2 and rng.random() < 0.5:
        lam = _rand_unit_E(rng, ctx)
        return _poly_mul([-lam, ctx.one], [-lam.conj().inverse(), ctx.one])
    coeffs: list[FieldElement] = [ctx.zero] * (k + 1)
    coeffs[0], coeffs[k] = a0, ctx.one
    for j in range(1, (k + 1) // 2):
        coeffs[j] = _rand_O_E(rng, ctx)
        coeffs[k - j] = a0 * coeffs[j].conj()
    if k % 2 == 0:
        coeffs[k // 2] = mu * rng.randrange(-(ctx.p**2), ctx.p**2)
    return coeffs


def _random_csr_poly(rng: random.Random, ctx: ArithContext, n: int) -> list[FieldElement]:
    P = [ctx.one]
    left = n
    while left:
        k = rng.randint(1, left)
        P = _poly_mul(P, _csr_block(rng, ctx, k))
        left -= k
    return P


def moments_from_functional(P: Sequence[FieldElement], ell: Sequence[FieldElement], count: int) -> list[FieldElement]:
    """``c_m = l(T^m) + conj(l(T^-m))`` in ``E[T]/P``, for ``m = 0..count-1``.

    Any E-linear ``l`` gives a sequence obeying the recursion of ``P`` with
    ``c_(-m) = conj(c_m)``, i.e. a valid moment sequence.
    """
    n = len(P) - 1
    C = companion(P[0].ctx, P)
    Cinv = C.inverse()
    out = []
    up = [P[0].ctx.one if i == 0 else P[0].ctx.zero for i in range(n)]
    down = list(up)
    for _ in range(count):
        out.append(_dot(ell, up) + _dot(ell, down).conj())
        up = C.apply(up)
        down = Cinv.apply(down)
    return out


def model_from_moments(ctx: ArithContext, P: Sequence[FieldElement], c: Sequence[FieldElement]) -> UnitaryModel:
    n = len(P) - 1
    ext = extend_moments(P, c, -(n - 1), n - 1)
    G = EMatrix(ctx, [[ext[a - b] for b in range(n)] for a in range(n)])
    return UnitaryModel(ctx, n, G, companion(ctx, P))


def sample_minuscule(ctx: ArithContext, n: int, seed: int, parity: str | None = None, retries: int = RETRY_CAP) -> UnitaryModel:
    """Random minuscule Gram model; ``parity`` in {None, 'odd', 'even'} filters on ``delta``."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = random.Random(seed)
    p = ctx.p
    for _ in range(retries):
        P = _random_csr_poly(rng, ctx, n)
        ell = []
        for _ in range(n):
            x = _rand_O_E(rng, ctx)
            if rng.random() < 0.4:
                x = x * p
            ell.append(x)
        c = moments_from_functional(P, ell, n)
        if rng.random() < 0.3:
            c = [x * p for x in c]
        model = model_from_moments(ctx, P, c)
        d = model.G.det()
        if not d or not is_minuscule(model):
            continue
        if parity == "odd" and int(d.val()) % 2 == 0:
            continue
        if parity == "even" and int(d.val()) % 2 == 1:
            continue
        return model
    raise SamplingExhausted(f"no minuscule model after {retries} tries")

