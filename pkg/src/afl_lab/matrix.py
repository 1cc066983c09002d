"""Dense matrices over E with exact entries."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from afl_lab.errors import SingularMatrix
from afl_lab.field import INF, ArithContext, FieldElement


class EMatrix:
    """Row-major matrix of :class:`FieldElement`."""

    __slots__ = ("ctx", "rows", "cols", "e")

    def __init__(self, ctx: ArithContext, entries: Sequence[Sequence]):
        self.ctx = ctx
        self.e = [[_lift(ctx, x) for x in row] for row in entries]
        self.rows = len(self.e)
        self.cols = len(self.e[0]) if self.e else 0
        if any(len(r) != self.cols for r in self.e):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, ctx: ArithContext, n: int) -> "EMatrix":
        return cls(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ctx: ArithContext, r: int, c: int) -> "EMatrix":
        return cls(ctx, [[0] * c for _ in range(r)])

    @classmethod
    def diag(cls, ctx: ArithContext, values: Sequence) -> "EMatrix":
        n = len(values)
        return cls(ctx, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, ctx: ArithContext, columns: Sequence[Sequence]) -> "EMatrix":
        return cls(ctx, [list(r) for r in zip(*columns)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.e[i][j]

    def column(self, j: int) -> list[FieldElement]:
        return [row[j] for row in self.e]

    def columns(self) -> list[list[FieldElement]]:
        return [self.column(j) for j in range(self.cols)]

    def row(self, i: int) -> list[FieldElement]:
        return list(self.e[i])

    def __eq__(self, other) -> bool:
        return isinstance(other, EMatrix) and self.e == other.e

    def __repr__(self):
        return f"EMatrix({self.e!r})"

    def __add__(self, other: "EMatrix") -> "EMatrix":
        return EMatrix(self.ctx, [[x + y for x, y in zip(r, s)] for r, s in zip(self.e, other.e)])

    def __sub__(self, other: "EMatrix") -> "EMatrix":
        return EMatrix(self.ctx, [[x - y for x, y in zip(r, s)] for r, s in zip(self.e, other.e)])

    def __neg__(self) -> "EMatrix":
        return EMatrix(self.ctx, [[-x for x in r] for r in self.e])

    def __mul__(self, other):
        if isinstance(other, EMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} x {other.shape}")
            ocols = other.columns()
            zero = self.ctx.zero
            out = []
            for r in self.e:
                out_row = []
                for c in ocols:
                    acc = zero
                    for x, y in zip(r, c):
                        if x and y:
                            acc = acc + x * y
                    out_row.append(acc)
                out.append(out_row)
            return EMatrix(self.ctx, out)
        return EMatrix(self.ctx, [[x * other for x in r] for r in self.e])

    def __rmul__(self, other):
        return EMatrix(self.ctx, [[other * x for x in r] for r in self.e])

    def apply(self, v: Sequence[FieldElement]) -> list[FieldElement]:
        zero = self.ctx.zero
        out = []
        for r in self.e:
            acc = zero
            for x, y in zip(r, v):
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return out

    def __pow__(self, k: int) -> "EMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = EMatrix.identity(self.ctx, self.rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "EMatrix":
        return EMatrix(self.ctx, [[x.conj() for x in r] for r in self.e])

    @property
    def T(self) -> "EMatrix":
        return EMatrix(self.ctx, [list(r) for r in zip(*self.e)])

    @property
    def H(self) -> "EMatrix":
        return self.conj().T

    def hstack(self, other: "EMatrix") -> "EMatrix":
        return EMatrix(self.ctx, [r + s for r, s in zip(self.e, other.e)])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "EMatrix":
        cols = list(cols)
        return EMatrix(self.ctx, [[self.e[i][j] for j in cols] for i in rows])

    def min_val(self) -> float:
        return min((x.val() for r in self.e for x in r), default=INF)

    def is_integral(self) -> bool:
        return self.min_val() >= 0

    def is_real(self) -> bool:
        return all(x.b == 0 for r in self.e for x in r)

    def is_zero(self) -> bool:
        return not any(x for r in self.e for x in r)

    def det(self) -> FieldElement:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        a = [list(r) for r in self.e]
        n = self.rows
        d = self.ctx.one
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                return self.ctx.zero
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                d = -d
            d = d * a[k][k]
            inv = a[k][k].inverse()
            for i in range(k + 1, n):
                if a[i][k]:
                    f = a[i][k] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return d

    def rank(self) -> int:
        a = [list(r) for r in self.e]
        rank = 0
        for c in range(self.cols):
            piv = next((i for i in range(rank, self.rows) if a[i][c]), None)
            if piv is None:
                continue
            a[rank], a[piv] = a[piv], a[rank]
            inv = a[rank][c].inverse()
            for i in range(self.rows):
                if i != rank and a[i][c]:
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
            rank += 1
        return rank

    def inverse(self) -> "EMatrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of non-square matrix")
        one, zero = self.ctx.one, self.ctx.zero
        a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.e)]
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[k], a[piv] = a[piv], a[k]
            inv = a[k][k].inverse()
            a[k] = [x * inv for x in a[k]]
            for i in range(n):
                if i != k and a[i][k]:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return EMatrix(self.ctx, [r[n:] for r in a])

    def charpoly(self) -> list[FieldElement]:
        """Coefficients ``a_0..a_n`` (lowest first, monic) of ``det(T*I - M)``."""
        if self.rows != self.cols:
            raise ValueError("charpoly of non-square matrix")
        n = self.rows
        ctx = self.ctx
        # Faddeev-LeVerrier is exact in characteristic zero.
        coeffs = [ctx.zero] * (n + 1)
        coeffs[n] = ctx.one
        mk = EMatrix.zeros(ctx, n, n)
        ident = EMatrix.identity(ctx, n)
        for k in range(1, n + 1):
            mk = self * mk + ident * coeffs[n - k + 1]
            am = self * mk
            tr = ctx.zero
            for i in range(n):
                tr = tr + am.e[i][i]
            coeffs[n - k] = tr * Fraction(-1, k)
        return coeffs

    def to_json(self) -> list:
        return [[x.to_json() for x in r] for r in self.e]

    @staticmethod
    def from_json(obj, ctx: ArithContext) -> "EMatrix":
        return EMatrix(ctx, [[FieldElement.from_json(x, ctx) for x in r] for r in obj])


def _lift(ctx: ArithContext, x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    return FieldElement(Fraction(x), 0, ctx)


def companion(ctx: ArithContext, coeffs: Sequence[FieldElement]) -> EMatrix:
    """Companion matrix with ``C e_i = e_{i+1}``; ``coeffs`` monic, lowest first."""
    n = len(coeffs) - 1
    rows = [[ctx.zero] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = ctx.one
    for k in range(n):
        rows[k][n - 1] = -coeffs[k]
    return EMatrix(ctx, rows)


def realify_vector(v: Sequence[FieldElement]) -> list[FieldElement]:
    """``r + sqrt(u) s`` in E^n to ``(r, s)`` in F^(2n)."""
    ctx = v[0].ctx
    return [ctx.E(x.a) for x in v] + [ctx.E(x.b) for x in v]


def unrealify_vector(w: Sequence[FieldElement]) -> list[FieldElement]:
    n = len(w) // 2
    ctx = w[0].ctx
    return [ctx.E(w[i].a, w[n + i].a) for i in range(n)]


def realify_lattice_basis(B: EMatrix) -> EMatrix:
    """O_F-basis of the O_E-span of the columns of ``B``, in F^(2n)."""
    s = B.ctx.sqrt_u
    cols = []
    for c in B.columns():
        cols.append(realify_vector(c))
        cols.append(realify_vector([s * x for x in c]))
    return EMatrix.from_columns(B.ctx, cols)


def realify_linear(M: EMatrix) -> EMatrix:
    """The F-linear map on F^(2n) induced by an E-linear map on E^n."""
    ctx = M.ctx
    n = M.rows
    u = ctx.u
    out = [[ctx.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            a, b = M.e[i][j].a, M.e[i][j].b
            out[i][j] = ctx.E(a)
            out[i][n + j] = ctx.E(u * b)
            out[n + i][j] = ctx.E(b)
            out[n + i][n + j] = ctx.E(a)
    return EMatrix(ctx, out)


def realify_semilinear(T: EMatrix) -> EMatrix:
    """The F-linear map on F^(2n) induced by ``v -> T conj(v)``."""
    ctx = T.ctx
    n = T.rows
    u = ctx.u
    out = [[ctx.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            a, b = T.e[i][j].a, T.e[i][j].b
            out[i][j] = ctx.E(a)
            out[i][n + j] = ctx.E(-u * b)
            out[n + i][j] = ctx.E(b)
            out[n + i][n + j] = ctx.E(-a)
    return EMatrix(ctx, out)
