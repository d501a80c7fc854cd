"""Exact rational scalars and dense rational matrices.

``Rational`` is :class:`fractions.Fraction`, which already keeps its value in
lowest terms with a positive denominator. ``RationalMatrix`` is an immutable
row-major matrix of Fractions; every operation returns a new value.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, SingularMatrixError

Rational = Fraction

__all__ = [
    "Rational",
    "RationalMatrix",
    "as_rational",
    "mat_mul",
    "congruence",
    "determinant",
    "inverse",
    "nullspace",
    "rational_to_str",
    "rational_from_str",
]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to a Fraction.

    Floats are rejected unless they are integral, so that no rounding can
    sneak into the exact path.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)) and float(x).is_integer():
        return Fraction(int(x))
    raise TypeError(f"cannot represent {x!r} exactly as a rational")


def rational_to_str(x: Fraction) -> str:
    return str(Fraction(x))


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        ents = tuple(as_rational(e) for e in entries)
        if len(ents) != rows * cols:
            raise DimensionError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(ents)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: tuple) -> "RationalMatrix":
        # trusted constructor: entries already a tuple of Fractions
        self = object.__new__(cls)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_hash", None)
        return self

    # constructors ---------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise DimensionError("matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), width, (e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls._raw(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        vals = [as_rational(v) for v in values]
        n = len(vals)
        zero = Fraction(0)
        return cls._raw(n, n, tuple(vals[i] if i == j else zero for i in range(n) for j in range(n)))

    # access ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        c = self.cols
        return self.entries[i * c:(i + 1) * c]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float).reshape(self.rows, self.cols)

    @property
    def T(self) -> "RationalMatrix":
        r, c, e = self.rows, self.cols, self.entries
        return RationalMatrix._raw(c, r, tuple(e[i * c + j] for j in range(c) for i in range(r)))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def is_identity(self) -> bool:
        return self.is_square() and self == RationalMatrix.identity(self.rows)

    def denominator_lcm(self) -> int:
        return lcm(*(e.denominator for e in self.entries)) if self.entries else 1

    # arithmetic -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.rows, self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return RationalMatrix._raw(self.rows, self.cols,
                                   tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, k) -> "RationalMatrix":
        k = as_rational(k)
        return RationalMatrix._raw(self.rows, self.cols, tuple(k * a for a in self.entries))

    def __mul__(self, k):
        if isinstance(k, RationalMatrix):
            return NotImplemented
        return self.scale(k)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            return mat_mul(self, other)
        return NotImplemented

    def __pow__(self, k: int) -> "RationalMatrix":
        if not self.is_square():
            raise DimensionError("power of a non-square matrix")
        if k < 0:
            return inverse(self) ** (-k)
        result = RationalMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __repr__(self):
        body = "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"RationalMatrix([{body}])"

    # serialization ----------------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[str(e) for e in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, data) -> "RationalMatrix":
        return cls.from_rows([[Fraction(str(e)) for e in row] for row in data])


def mat_mul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    m, k, n = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    bcols = [be[j::n] for j in range(n)]
    out = []
    for i in range(m):
        arow = ae[i * k:(i + 1) * k]
        for j in range(n):
            out.append(sum((x * y for x, y in zip(arow, bcols[j]) if x and y), Fraction(0)))
    return RationalMatrix._raw(m, n, tuple(out))


def congruence(w: RationalMatrix, q: RationalMatrix) -> RationalMatrix:
    """Return ``w.T @ q @ w``."""
    if not q.is_square():
        raise DimensionError("congruence needs a square form")
    if w.rows != q.rows:
        raise DimensionError(f"transform has {w.rows} rows, form has size {q.rows}")
    return mat_mul(mat_mul(w.T, q), w)


def _integer_rows(m: RationalMatrix) -> tuple[list[list[int]], int]:
    """Scale ``m`` to an integer matrix; return rows and the scale factor."""
    L = m.denominator_lcm()
    return [[int(e * L) for e in m.row(i)] for i in range(m.rows)], L


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    prev = 1
    sign = 1
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k]
            a[i] = [(pk * a[i][j] - f * a[k][j]) // prev if j > k else 0 for j in range(n)]
        prev = pk
    return sign * a[n - 1][n - 1]


def determinant(m: RationalMatrix) -> Fraction:
    if not m.is_square():
        raise DimensionError(f"determinant of non-square {m.shape} matrix")
    n = m.rows
    if n == 0:
        return Fraction(1)
    rows, L = _integer_rows(m)
    return Fraction(_bareiss_det(rows), L ** n)


def inverse(m: RationalMatrix) -> RationalMatrix:
    """Exact inverse by fraction-free Gauss-Jordan on the integer-scaled matrix."""
    if not m.is_square():
        raise DimensionError(f"inverse of non-square {m.shape} matrix")
    n = m.rows
    rows, L = _integer_rows(m)
    aug = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    a = [r[:] for r in rows]
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            aug[k], aug[piv] = aug[piv], aug[k]
        pk = a[k][k]
        rk, ak = a[k], aug[k]
        for i in range(n):
            if i == k:
                continue
            f = a[i][k]
            a[i] = [(pk * x - f * y) // prev for x, y in zip(a[i], rk)]
            aug[i] = [(pk * x - f * y) // prev for x, y in zip(aug[i], ak)]
        prev = pk
    out = []
    for i in range(n):
        d = a[i][i]
        out.extend(Fraction(x * L, d) for x in aug[i])
    return RationalMatrix._raw(n, n, tuple(out))


def nullspace(m) -> list[list[Fraction]]:
    """Basis of the right null space, by exact reduced row echelon form.

    Accepts a RationalMatrix or a list of rows.
    """
    rows = m.tolist() if isinstance(m, RationalMatrix) else [[as_rational(x) for x in r] for r in m]
    a = [r[:] for r in rows]
    if not a:
        return []
    m = len(a)
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fcol]
        basis.append(v)
    return basis
