"""Exact arithmetic in F = Q and its unramified quadratic extension E = Q(sqrt u).

Elements of E are carried as pairs of rationals ``a + b*sqrt(u)`` where ``u`` is
the least positive quadratic non-residue mod ``p``, so ``p`` is inert in E and the
completion of E at ``p`` is the unramified quadratic extension of Q_p.  The
uniformizer of F is ``p`` itself.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from afl_lab.errors import DivisionByZero, NotIntegral, ZeroArgument

INF = math.inf

Rational = Union[int, Fraction]


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def vp(x: Rational, p: int) -> float:
    """p-adic valuation of a rational; ``inf`` at zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def reduce_mod_pk(x: Rational, p: int, k: int) -> int:
    """Image of a p-integral rational in Z/p^k, as an integer in [0, p^k)."""
    x = Fraction(x)
    mod = p**k
    if x.denominator % p == 0:
        raise NotIntegral(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod if mod > 1 else 0


def canonical_rep(x: Rational, p: int, e: int) -> Fraction:
    """Canonical representative of ``x`` modulo ``p^e * Z_(p)``.

    Zero if ``val(x) >= e``; otherwise ``N / p^K`` with ``K = max(0, -val x)``
    and ``0 <= N < p^(K+e)``.  All members of a class share ``val`` when it is
    below ``e``, so this is well defined.
    """
    x = Fraction(x)
    v = vp(x, p)
    if v >= e:
        return Fraction(0)
    k = max(0, -int(v))
    scaled = x * p**k
    return Fraction(reduce_mod_pk(scaled, p, k + e), p**k)


@dataclass(frozen=True)
class ArithContext:
    """The prime ``p`` (residue cardinality of F) and the non-residue ``u``."""

    p: int
    u: int

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if pow(self.u, (self.p - 1) // 2, self.p) != self.p - 1:
            raise ValueError(f"u={self.u} is not a non-residue mod {self.p}")

    @property
    def q(self) -> int:
        return self.p

    def E(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        return FieldElement(Fraction(a), Fraction(b), self)

    @property
    def zero(self) -> "FieldElement":
        return self.E(0)

    @property
    def one(self) -> "FieldElement":
        return self.E(1)

    @property
    def sqrt_u(self) -> "FieldElement":
        return self.E(0, 1)

    def to_json(self) -> dict:
        return {"p": self.p, "u": self.u}

    @staticmethod
    def from_json(obj: dict) -> "ArithContext":
        return ArithContext(int(obj["p"]), int(obj["u"]))


@functools.lru_cache(maxsize=None)
def context(p: int) -> ArithContext:
    """Context for ``p`` with the smallest positive non-residue as ``u``."""
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    u = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)
    return ArithContext(p, u)


def _frac_json(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class FieldElement:
    """``a + b*sqrt(u)`` in E with rational ``a``, ``b``.  Immutable."""

    __slots__ = ("a", "b", "ctx")

    def __init__(self, a: Rational, b: Rational, ctx: ArithContext):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise ValueError("elements from different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(other, 0, self.ctx)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a - o.a, self.b - o.b, self.ctx)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.ctx)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        u = self.ctx.u
        return FieldElement(
            self.a * o.a + u * self.b * o.b, self.a * o.b + self.b * o.a, self.ctx
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero in E")
        return FieldElement(self.a / n, -self.b / n, self.ctx)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ctx.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.ctx.p))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        if self.b == 0:
            return f"E({self.a})"
        return f"E({self.a} + {self.b}*sqrt{self.ctx.u})"

    def conj(self) -> "FieldElement":
        return FieldElement(self.a, -self.b, self.ctx)

    def norm(self) -> Fraction:
        return self.a * self.a - self.ctx.u * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def in_base_field(self) -> bool:
        return self.b == 0

    def val(self) -> float:
        """min(val_p a, val_p b); ``inf`` for zero."""
        return min(vp(self.a, self.ctx.p), vp(self.b, self.ctx.p))

    def is_integral(self) -> bool:
        return self.val() >= 0

    def residue(self):
        """Reduction to the residue field F_{q^2} = F_p[w], w^2 = u."""
        from afl_lab.finitefield import FqElement

        if self.val() < 0:
            raise NotIntegral(f"{self!r} has negative valuation")
        p = self.ctx.p
        return FqElement(reduce_mod_pk(self.a, p, 1), reduce_mod_pk(self.b, p, 1), self.ctx)

    def mod_pk(self, k: int) -> tuple[int, int]:
        """Integer pair ``(a, b)`` reduced modulo ``p^k``; element must be integral."""
        p = self.ctx.p
        return reduce_mod_pk(self.a, p, k), reduce_mod_pk(self.b, p, k)

    def to_json(self) -> dict:
        return {"a": _frac_json(self.a), "b": _frac_json(self.b)}

    @staticmethod
    def from_json(obj: dict, ctx: ArithContext) -> "FieldElement":
        return FieldElement(Fraction(obj["a"]), Fraction(obj["b"]), ctx)


def ee_arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def ee_val(x: FieldElement) -> float:
    return x.val()


def mu_sign(x: FieldElement) -> int:
    """The unramified quadratic character, ``(-1)^val(x)``."""
    if not x:
        raise ZeroArgument("mu_sign of zero")
    return -1 if int(x.val()) % 2 else 1


def residue(x: FieldElement):
    return x.residue()
