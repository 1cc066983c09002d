"""Submodules of a finite abelian p-group stable under a set of endomorphisms.

The group is ``G = Z^m / D Z^m`` with ``D = diag(p^a_j)``.  A subgroup ``X`` is
identified with the lattice between ``D Z^m`` and ``Z^m`` it lifts to, stored in
column Hermite normal form: upper triangular, diagonal ``p^e_i``, entries above
each pivot reduced to ``[0, p^e_i)``.  Because every lattice here contains
``p^A Z^m`` (``A = max a_j``), all arithmetic is on integers modulo ``p^A``.

Enumeration walks the poset of stable subgroups upward.  Every stable subgroup
is reached by a chain of minimal steps ``X -> closure(X + Zv)`` with ``pv in X``,
so only the ``(p^k - 1)/(p - 1)`` lines of ``(G/X)[p]`` need trying at each node.
A hereditary predicate (closed under passing to stable subgroups) prunes the walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from afl_lab.errors import ComplexityExceeded

Vector = tuple[int, ...]


@dataclass(frozen=True)
class HNF:
    cols: tuple[Vector, ...]
    exps: tuple[int, ...]

    @property
    def key(self):
        return self.cols


def _val(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class PGroup:
    """``Z^m / diag(p^a) Z^m`` with integer endomorphisms ``ops`` (row-major)."""

    def __init__(
        self,
        p: int,
        exps: Sequence[int],
        ops: Sequence[Sequence[Sequence[int]]] = (),
        pairing: tuple[list[list[int]], list[list[int]], int] | None = None,
    ):
        self.p = p
        self.exps = tuple(exps)
        self.m = len(self.exps)
        self.A = max(self.exps, default=0)
        self.mod = p**self.A
        self.ops = [[[x % self.mod for x in row] for row in op] for op in ops]
        self.pairing = pairing
        self._ppow = [p**k for k in range(self.A + 1)]

    @property
    def order_exponent(self) -> int:
        return sum(self.exps)

    def length(self, X: HNF) -> int:
        """log_p of the order of the subgroup ``X``."""
        return self.order_exponent - sum(X.exps)

    def zero(self) -> HNF:
        m = self.m
        return self.hnf([tuple(self._ppow[a] if i == j else 0 for i in range(m)) for j, a in enumerate(self.exps)])

    def whole(self) -> HNF:
        return self.hnf([tuple(1 if i == j else 0 for i in range(self.m)) for j in range(self.m)])

    def hnf(self, gens: Sequence[Sequence[int]]) -> HNF:
        p, A, mod, m = self.p, self.A, self.mod, self.m
        ppow = self._ppow
        cols = [[x % mod for x in g] for g in gens]
        cols = [c for c in cols if any(c)]
        basis: list[list[int]] = [None] * m  # type: ignore[list-item]
        exps = [A] * m
        for i in range(m - 1, -1, -1):
            best, bv = -1, A
            for idx, c in enumerate(cols):
                x = c[i]
                if x:
                    v = _val(x, p)
                    if v < bv:
                        best, bv = idx, v
                        if v == 0:
                            break
            if best < 0:
                col = [0] * m
                col[i] = mod
                basis[i] = col
                continue
            c = cols.pop(best)
            pv = ppow[bv]
            inv = pow(c[i] // pv, -1, mod) if mod > 1 else 0
            c = [x * inv % mod for x in c]
            rest = []
            for d in cols:
                x = d[i]
                if x:
                    f = x // pv
                    d = [(y - f * z) % mod for y, z in zip(d, c)]
                if any(d):
                    rest.append(d)
            shift = ppow[A - bv]
            extra = [x * shift % mod for x in c]
            if any(extra):
                rest.append(extra)
            cols = rest
            c[i] = pv
            basis[i] = c
            exps[i] = bv
        for j in range(m):
            col = basis[j]
            for i in range(j - 1, -1, -1):
                pe = ppow[exps[i]]
                x = col[i]
                if x >= pe:
                    f = x // pe
                    bi = basis[i]
                    for r in range(i + 1):
                        col[r] = (col[r] - f * bi[r]) % mod
                    col[i] = x - f * pe
        return HNF(tuple(tuple(c) for c in basis), tuple(exps))

    def contains(self, X: HNF, v: Sequence[int]) -> bool:
        mod = self.mod
        w = [x % mod for x in v]
        for i in range(self.m - 1, -1, -1):
            x = w[i]
            if not x:
                continue
            e = X.exps[i]
            if e == self.A:
                return False
            pe = self._ppow[e]
            if x % pe:
                return False
            f = x // pe
            col = X.cols[i]
            for r in range(i + 1):
                w[r] = (w[r] - f * col[r]) % mod
        return True

    def apply(self, op, v: Sequence[int]) -> Vector:
        mod = self.mod
        return tuple(sum(a * b for a, b in zip(row, v)) % mod for row in op)

    def closure(self, X: HNF, extra: Sequence[Sequence[int]]) -> HNF:
        Y = self.hnf(list(X.cols) + list(extra))
        while True:
            missing = []
            for op in self.ops:
                for h in Y.cols:
                    w = self.apply(op, h)
                    if not self.contains(Y, w):
                        missing.append(w)
            if not missing:
                return Y
            Y = self.hnf(list(Y.cols) + missing)

    def is_stable(self, X: HNF) -> bool:
        return all(self.contains(X, self.apply(op, h)) for op in self.ops for h in X.cols)

    def torsion_lines(self, X: HNF) -> Iterator[Vector]:
        """One representative ``v`` per line of ``(G/X)[p]``."""
        p, m = self.p, self.m
        # kernel of the HNF matrix reduced mod p
        rows = [[X.cols[j][i] % p for j in range(m)] for i in range(m)]
        basis = _kernel_mod_p(rows, p, m)
        k = len(basis)
        for coeffs in _projective_points(k, p):
            w = [0] * m
            for c, b in zip(coeffs, basis):
                if c:
                    for t in range(m):
                        w[t] += c * b[t]
            w = [x % p for x in w]
            hv = [sum(X.cols[j][i] * w[j] for j in range(m)) for i in range(m)]
            yield tuple((x // p) % self.mod for x in hv)

    def isotropic(self, X: HNF) -> bool:
        if self.pairing is None:
            return True
        pa, pb, s = self.pairing
        mod = self.p**s
        if mod == 1:
            return True
        cols = [c for c, e in zip(X.cols, X.exps) if e < self.A or self.A == 0]
        cols = [tuple(x % mod for x in c) for c in cols]
        images = []
        for c in cols:
            images.append((
                [sum(row[j] * c[j] for j in range(self.m)) % mod for row in pa],
                [sum(row[j] * c[j] for j in range(self.m)) % mod for row in pb],
            ))
        for c in cols:
            for ga, gb in images:
                if sum(x * y for x, y in zip(c, ga)) % mod:
                    return False
                if sum(x * y for x, y in zip(c, gb)) % mod:
                    return False
        return True

    def enumerate(
        self,
        predicate: Callable[[HNF], bool] | None = None,
        cap: int = 100_000,
    ) -> list[HNF]:
        """All stable subgroups satisfying the hereditary ``predicate``."""
        start = self.closure(self.zero(), [])
        if predicate is not None and not predicate(start):
            return []
        found = {start.key: start}
        rejected: set = set()
        frontier = [start]
        while frontier:
            nxt = []
            for X in frontier:
                for v in self.torsion_lines(X):
                    Y = self.closure(X, [v])
                    if Y.key in found or Y.key in rejected:
                        continue
                    if predicate is not None and not predicate(Y):
                        rejected.add(Y.key)
                        continue
                    found[Y.key] = Y
                    nxt.append(Y)
                    if len(found) > cap:
                        raise ComplexityExceeded(f"more than {cap} stable submodules")
            frontier = nxt
        return sorted(found.values(), key=lambda X: (self.length(X), X.cols))


def _kernel_mod_p(rows: list[list[int]], p: int, m: int) -> list[list[int]]:
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(a)) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * m
        v[fcol] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i][fcol]) % p
        basis.append(v)
    return basis


def _projective_points(k: int, p: int) -> Iterator[tuple[int, ...]]:
    for lead in range(k):
        tail = k - lead - 1
        for n in range(p**tail):
            digits = []
            for _ in range(tail):
                digits.append(n % p)
                n //= p
            yield (0,) * lead + (1,) + tuple(digits)
