"""Polynomials over the residue field F_{q^2} = F_p[w], w^2 = u.

Field elements are coded internally as integers ``a + b*p`` so that the
factorization loops run on plain ints; :class:`FqElement` is the public face.

Factorization follows the usual three stages: square-free decomposition,
distinct-degree splitting with ``gcd(T^(Q^d) - T, f)`` where ``Q = q^2``, and a
Cantor-Zassenhaus equal-degree split driven by a caller-supplied
``random.Random``.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from afl_lab.errors import (
    DivisionByZero,
    NotSelfReciprocalInput,
    ZeroConstantTerm,
    ZeroPolynomial,
)
from afl_lab.field import ArithContext


class GF:
    """Arithmetic tables for F_{p^2} on integer codes ``a + b*p``."""

    def __init__(self, ctx: ArithContext):
        p, u = ctx.p, ctx.u
        self.ctx = ctx
        self.p = p
        self.order = p * p
        size = self.order
        self._mul = [[0] * size for _ in range(size)]
        for x in range(size):
            xa, xb = x % p, x // p
            row = self._mul[x]
            for y in range(size):
                ya, yb = y % p, y // p
                row[y] = (xa * ya + u * xb * yb) % p + ((xa * yb + xb * ya) % p) * p
        self._inv = [0] * size
        for x in range(1, size):
            for y in range(1, size):
                if self._mul[x][y] == 1:
                    self._inv[x] = y
                    break
        self._conj = [(x % p) + ((-(x // p)) % p) * p for x in range(size)]

    def add(self, x: int, y: int) -> int:
        p = self.p
        return (x % p + y % p) % p + ((x // p + y // p) % p) * p

    def neg(self, x: int) -> int:
        p = self.p
        return (-(x % p)) % p + ((-(x // p)) % p) * p

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise DivisionByZero("inverse of zero in F_q^2")
        return self._inv[x]

    def conj(self, x: int) -> int:
        return self._conj[x]

    def pow(self, x: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._mul[r][x]
            x = self._mul[x][x]
            k >>= 1
        return r

    def norm(self, x: int) -> int:
        """x * x^q, an element of F_p (returned as its code)."""
        return self._mul[x][self._conj[x]]


@functools.lru_cache(maxsize=None)
def gf(ctx: ArithContext) -> GF:
    return GF(ctx)


@dataclass(frozen=True)
class FqElement:
    """``a + b*w`` in F_{q^2}."""

    a: int
    b: int
    ctx: ArithContext = field(repr=False, compare=False)

    def __post_init__(self):
        p = self.ctx.p
        object.__setattr__(self, "a", self.a % p)
        object.__setattr__(self, "b", self.b % p)

    @property
    def code(self) -> int:
        return self.a + self.b * self.ctx.p

    @staticmethod
    def from_code(code: int, ctx: ArithContext) -> "FqElement":
        return FqElement(code % ctx.p, code // ctx.p, ctx)

    def _wrap(self, code: int) -> "FqElement":
        return FqElement.from_code(code, self.ctx)

    def __add__(self, other: "FqElement") -> "FqElement":
        return self._wrap(gf(self.ctx).add(self.code, other.code))

    def __sub__(self, other: "FqElement") -> "FqElement":
        return self._wrap(gf(self.ctx).sub(self.code, other.code))

    def __neg__(self) -> "FqElement":
        return self._wrap(gf(self.ctx).neg(self.code))

    def __mul__(self, other: "FqElement") -> "FqElement":
        return self._wrap(gf(self.ctx).mul(self.code, other.code))

    def __truediv__(self, other: "FqElement") -> "FqElement":
        k = gf(self.ctx)
        return self._wrap(k.mul(self.code, k.inv(other.code)))

    def inverse(self) -> "FqElement":
        return self._wrap(gf(self.ctx).inv(self.code))

    def __pow__(self, k: int) -> "FqElement":
        if k < 0:
            return self.inverse() ** (-k)
        return self._wrap(gf(self.ctx).pow(self.code, k))

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def conj(self) -> "FqElement":
        return FqElement(self.a, -self.b, self.ctx)

    def norm(self) -> int:
        return (self.a * self.a - self.ctx.u * self.b * self.b) % self.ctx.p

    def to_json(self) -> list[int]:
        return [self.a, self.b]


class FqPoly:
    """Polynomial over F_{q^2}; ``coeffs`` are integer codes, lowest degree first."""

    __slots__ = ("k", "c")

    def __init__(self, ctx_or_field, coeffs: Iterable[int]):
        k = ctx_or_field if isinstance(ctx_or_field, GF) else gf(ctx_or_field)
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.k = k
        self.c = tuple(c)

    # construction helpers
    @classmethod
    def from_elements(cls, ctx: ArithContext, coeffs: Sequence[FqElement]) -> "FqPoly":
        return cls(ctx, [x.code for x in coeffs])

    @classmethod
    def from_pairs(cls, ctx: ArithContext, pairs: Sequence[Sequence[int]]) -> "FqPoly":
        return cls(ctx, [FqElement(a, b, ctx).code for a, b in pairs])

    @property
    def ctx(self) -> ArithContext:
        return self.k.ctx

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def is_monic(self) -> bool:
        return bool(self.c) and self.c[-1] == 1

    def coefficients(self) -> list[FqElement]:
        return [FqElement.from_code(x, self.ctx) for x in self.c]

    def pairs(self) -> list[list[int]]:
        p = self.k.p
        return [[x % p, x // p] for x in self.c]

    def sort_key(self):
        return (self.degree, tuple(tuple(pr) for pr in self.pairs()))

    def __eq__(self, other) -> bool:
        return isinstance(other, FqPoly) and self.c == other.c and self.k.p == other.k.p

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"FqPoly({self.pairs()})"

    def _new(self, coeffs) -> "FqPoly":
        return FqPoly(self.k, coeffs)

    def __add__(self, other: "FqPoly") -> "FqPoly":
        k = self.k
        a, b = self.c, other.c
        n = max(len(a), len(b))
        return self._new(
            k.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)
        )

    def __neg__(self) -> "FqPoly":
        return self._new(self.k.neg(x) for x in self.c)

    def __sub__(self, other: "FqPoly") -> "FqPoly":
        return self + (-other)

    def __mul__(self, other: "FqPoly") -> "FqPoly":
        k = self.k
        a, b = self.c, other.c
        if not a or not b:
            return self._new([])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            row = k._mul[x]
            for j, y in enumerate(b):
                if y:
                    out[i + j] = k.add(out[i + j], row[y])
        return self._new(out)

    def scale(self, s: int) -> "FqPoly":
        row = self.k._mul[s]
        return self._new(row[x] for x in self.c)

    def monic(self) -> "FqPoly":
        if not self.c:
            raise ZeroPolynomial("zero polynomial has no monic form")
        return self.scale(self.k.inv(self.c[-1]))

    def __divmod__(self, other: "FqPoly"):
        if not other.c:
            raise DivisionByZero("polynomial division by zero")
        k = self.k
        r = list(self.c)
        d = other.c
        inv_lead = k.inv(d[-1])
        qlen = max(0, len(r) - len(d) + 1)
        q = [0] * qlen
        for i in range(qlen - 1, -1, -1):
            coef = k.mul(r[i + len(d) - 1], inv_lead)
            q[i] = coef
            if coef:
                row = k._mul[coef]
                for j, y in enumerate(d):
                    if y:
                        r[i + j] = k.sub(r[i + j], row[y])
        return self._new(q), self._new(r[: len(d) - 1] if len(d) > 1 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "FqPoly":
        k = self.k
        out = []
        for i in range(1, len(self.c)):
            m = i % k.p
            out.append(k.mul(self.c[i], m) if m else 0)
        return self._new(out)

    def eval(self, x: int) -> int:
        k = self.k
        acc = 0
        for coef in reversed(self.c):
            acc = k.add(k.mul(acc, x), coef)
        return acc

    def powmod(self, e: int, mod: "FqPoly") -> "FqPoly":
        result = self._new([1])
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def to_json(self) -> list[list[int]]:
        return self.pairs()


def poly_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def _x(k: GF) -> FqPoly:
    return FqPoly(k, [0, 1])


def _one(k: GF) -> FqPoly:
    return FqPoly(k, [1])


def _pth_root(f: FqPoly) -> FqPoly:
    # Frobenius has order 2 on F_{p^2}, so x^(1/p) = x^p.
    k = f.k
    p = k.p
    return FqPoly(k, [k.pow(f.c[i], p) for i in range(0, len(f.c), p)])


def squarefree_decomposition(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """Pairs ``(g, m)`` with ``f = prod g^m``, each ``g`` square-free, pairwise coprime."""
    f = f.monic()
    k = f.k
    one = _one(k)
    out: list[tuple[FqPoly, int]] = []
    df = f.derivative()
    if df.is_zero():
        if f.degree <= 0:
            return out
        return [(g, m * k.p) for g, m in squarefree_decomposition(_pth_root(f))]
    c = poly_gcd(f, df)
    w = f // c
    i = 1
    while w != one:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree > 0:
            out.append((z.monic(), i))
        i += 1
        w = y
        c = c // y
    if c.degree > 0:
        out.extend((g, m * k.p) for g, m in squarefree_decomposition(_pth_root(c.monic())))
    return out


def distinct_degree(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """Split a monic square-free ``f`` into products of equal-degree irreducibles."""
    k = f.k
    order = k.order
    x = _x(k)
    out = []
    h = x % f
    d = 1
    g = f
    while g.degree >= 2 * d:
        h = h.powmod(order, g)
        fac = poly_gcd(g, h - x)
        if fac.degree > 0:
            out.append((fac, d))
            g = g // fac
            h = h % g
        d += 1
    if g.degree > 0:
        out.append((g.monic(), g.degree))
    return out


def equal_degree(f: FqPoly, d: int, rng: random.Random) -> list[FqPoly]:
    if f.degree == d:
        return [f.monic()]
    k = f.k
    exponent = (k.order**d - 1) // 2
    while True:
        a = FqPoly(k, [rng.randrange(k.order) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        g = poly_gcd(a, f)
        if 0 < g.degree < f.degree:
            break
        b = a.powmod(exponent, f) - _one(k)
        g = poly_gcd(b, f)
        if 0 < g.degree < f.degree:
            break
    return equal_degree(g, d, rng) + equal_degree((f // g).monic(), d, rng)


def factor_monic(f: FqPoly, rng: random.Random | None = None) -> list[tuple[FqPoly, int]]:
    """Complete factorization of ``f`` into monic irreducibles with multiplicities.

    Factors come back in canonical order (degree, then coefficient pairs).
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    if rng is None:
        rng = random.Random(0)
    counts: dict[FqPoly, int] = {}
    for g, m in squarefree_decomposition(f):
        for h, d in distinct_degree(g):
            for r in equal_degree(h, d, rng):
                counts[r] = counts.get(r, 0) + m
    return sorted(counts.items(), key=lambda kv: kv[0].sort_key())


def is_irreducible(f: FqPoly) -> bool:
    """Rabin's test, independent of :func:`factor_monic`."""
    if f.degree < 1:
        return False
    f = f.monic()
    k = f.k
    n = f.degree
    x = _x(k)

    def frob_power(e):
        h = x % f
        for _ in range(e):
            h = h.powmod(k.order, f)
        return h

    if (frob_power(n) - x) % f != FqPoly(k, []):
        return False
    primes = [r for r in range(2, n + 1) if n % r == 0 and all(r % s for s in range(2, r))]
    for r in primes:
        if poly_gcd(f, frob_power(n // r) - x).degree != 0:
            return False
    return True


def reciprocal(R: FqPoly) -> FqPoly:
    """``R*(T) = conj(a_0)^(-1) * T^k * conj(R)(1/T)``, always monic."""
    if R.is_zero():
        raise ZeroPolynomial("reciprocal of zero polynomial")
    if R.c[0] == 0:
        raise ZeroConstantTerm("reciprocal needs a nonzero constant term")
    k = R.k
    s = k.inv(k.conj(R.c[0]))
    return FqPoly(k, [k.mul(s, k.conj(a)) for a in reversed(R.c)])


def is_self_reciprocal(R: FqPoly) -> bool:
    return R.monic() == reciprocal(R)


@dataclass
class FactorClassification:
    """Self-reciprocal factors and non-self-reciprocal ``{R, R*}`` orbits."""

    sr: list[tuple[FqPoly, int]]
    nsr: list[tuple[FqPoly, FqPoly, int]]

    def reassemble(self) -> FqPoly:
        if self.sr:
            k = self.sr[0][0].k
        elif self.nsr:
            k = self.nsr[0][0].k
        else:
            raise ValueError("empty classification has no field")
        out = _one(k)
        for q, m in self.sr:
            for _ in range(m):
                out = out * q
        for r, rs, m in self.nsr:
            for _ in range(m):
                out = out * r * rs
        return out

    def to_json(self) -> dict:
        return {
            "sr": [[q.to_json(), m] for q, m in self.sr],
            "nsr": [[r.to_json(), rs.to_json(), m] for r, rs, m in self.nsr],
        }


def classify(f: FqPoly, rng: random.Random | None = None) -> FactorClassification:
    if f.is_zero():
        raise ZeroPolynomial("cannot classify the zero polynomial")
    if f.c[0] == 0:
        raise ZeroConstantTerm("input must have a unit constant term")
    if not is_self_reciprocal(f):
        raise NotSelfReciprocalInput(f"{f!r} is not self-reciprocal")
    factors = factor_monic(f, rng)
    mult = dict(factors)
    sr: list[tuple[FqPoly, int]] = []
    nsr: list[tuple[FqPoly, FqPoly, int]] = []
    seen: set[FqPoly] = set()
    for r, m in factors:
        if r in seen:
            continue
        rs = reciprocal(r)
        if rs == r:
            sr.append((r, m))
            seen.add(r)
            continue
        if mult.get(rs) != m:
            raise NotSelfReciprocalInput("reciprocal factor multiplicities disagree")
        nsr.append((r, rs, m))
        seen.update((r, rs))
    return FactorClassification(sr, nsr)


def closed_formula(c: FactorClassification) -> int:
    """``deg Q * (m(Q)+1)/2 * prod(1 + m(R))`` if exactly one self-reciprocal
    factor has odd multiplicity, else 0."""
    odd = [(q, m) for q, m in c.sr if m % 2 == 1]
    if len(odd) != 1:
        return 0
    q, m = odd[0]
    value = q.degree * (m + 1) // 2
    for _, _, mr in c.nsr:
        value *= 1 + mr
    return value


def charpoly(matrix: Sequence[Sequence[int]], k: GF) -> FqPoly:
    """Characteristic polynomial ``det(T*I - M)`` by Berkowitz (division free)."""
    n = len(matrix)
    coeffs = [1]  # highest degree first
    for r in range(n):
        a = matrix[r][r]
        row = [matrix[r][j] for j in range(r)]
        col = [matrix[i][r] for i in range(r)]
        vect = [1, k.neg(a)]
        cur = col
        for _ in range(r):
            dot = 0
            for x, y in zip(row, cur):
                dot = k.add(dot, k.mul(x, y))
            vect.append(k.neg(dot))
            cur = [
                _dot(k, [matrix[i][j] for j in range(r)], cur) for i in range(r)
            ]
        new = []
        for i in range(r + 2):
            acc = 0
            for j in range(len(coeffs)):
                if 0 <= i - j < len(vect):
                    acc = k.add(acc, k.mul(vect[i - j], coeffs[j]))
            new.append(acc)
        coeffs = new
    return FqPoly(k, list(reversed(coeffs)))


def _dot(k: GF, xs, ys) -> int:
    acc = 0
    for x, y in zip(xs, ys):
        acc = k.add(acc, k.mul(x, y))
    return acc


def poly_from_json(ctx: ArithContext, obj) -> FqPoly:
    return FqPoly.from_pairs(ctx, obj)
