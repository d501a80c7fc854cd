"""Descartes, Wilker and Lorentz forms and their rational diagonalizations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, SingularMatrixError
from .exactq import RationalMatrix, as_rational, congruence

__all__ = [
    "QuadraticForm",
    "DiagonalizationResult",
    "descartes_form",
    "wilker_form",
    "lorentz_form",
    "lorentz_intertwiner_n2",
    "conway_diagonalize",
    "wilker_diagonal",
    "signature",
    "descartes_final_step",
]


@dataclass(frozen=True)
class QuadraticForm:
    dim: int
    matrix: RationalMatrix
    name: str = ""

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise DimensionError(f"form matrix must be {self.dim}x{self.dim}, got {self.matrix.shape}")
        if not self.matrix.is_symmetric():
            raise ValueError("quadratic form matrix must be symmetric")

    @classmethod
    def from_matrix(cls, m: RationalMatrix, name: str = "") -> "QuadraticForm":
        return cls(m.rows, m, name)

    def __call__(self, v: Sequence) -> Fraction:
        """Evaluate ``v^T Q v``."""
        v = [as_rational(x) for x in v]
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} for a form of dimension {self.dim}")
        m = self.matrix
        return sum((v[i] * m[i, j] * v[j] for i in range(self.dim) for j in range(self.dim)
                    if v[i] and v[j]), Fraction(0))

    def bilinear(self, u: Sequence, v: Sequence) -> Fraction:
        u = [as_rational(x) for x in u]
        v = [as_rational(x) for x in v]
        m = self.matrix
        return sum((u[i] * m[i, j] * v[j] for i in range(self.dim) for j in range(self.dim)
                    if u[i] and v[j]), Fraction(0))


@dataclass(frozen=True)
class DiagonalizationResult:
    diagonal: tuple
    transform: RationalMatrix

    def verify(self, q: QuadraticForm) -> bool:
        return congruence(self.transform, q.matrix) == RationalMatrix.diagonal(self.diagonal)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")


def descartes_form(n: int) -> QuadraticForm:
    """``I - (1/n) 1 1^T`` in ``n+2`` variables."""
    _check_n(n)
    m = n + 2
    off = Fraction(-1, n)
    diag = 1 + off
    return QuadraticForm(m, RationalMatrix(m, m, (diag if i == j else off
                                                  for i in range(m) for j in range(m))),
                         f"descartes_{n}")


def wilker_form(n: int) -> QuadraticForm:
    _check_n(n)
    m = n + 2
    rows = [[0] * m for _ in range(m)]
    rows[0][1] = rows[1][0] = -4
    for i in range(2, m):
        rows[i][i] = 2
    return QuadraticForm(m, RationalMatrix.from_rows(rows), f"wilker_{n}")


def lorentz_form(n: int) -> QuadraticForm:
    _check_n(n)
    return QuadraticForm(n + 2, RationalMatrix.diagonal([-1] + [1] * (n + 1)), f"lorentz_{n}")


def lorentz_intertwiner_n2() -> RationalMatrix:
    """The matrix J0 with ``J0^T Q_D2 J0 = diag(-1, 1, 1, 1)``."""
    rows = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]
    return RationalMatrix.from_rows(rows).scale(Fraction(1, 2))


def descartes_final_step() -> RationalMatrix:
    """Rational N with ``N^T Q_D2 N = diag(2, 2, 2, -2)``.

    Columns are Q_D2-orthogonal: (1,-1,0,0), (0,0,1,-1), (1,1,-1/2,-1/2),
    (1,1,1/2,1/2). The +-1 matrix with rows (1,-1,-1,1), (-1,1,-1,1),
    (-1,-1,1,1), (1,1,1,1) reaches only ``diag(4,4,4,-4)``; rescaling it
    would need a factor ``1/sqrt(2)``.
    """
    h = Fraction(1, 2)
    return RationalMatrix.from_rows([[1, 0, 1, 1], [-1, 0, 1, 1],
                                     [0, 1, -h, h], [0, -1, -h, h]])


# --- diagonalization ---------------------------------------------------------

def _descartes_shape(m: RationalMatrix):
    """Return ``(x, y)`` with ``m = (x + y) I - y 1 1^T``, or None."""
    k = m.rows
    if k < 2 or not m.is_square():
        return None
    d = m[0, 0]
    o = m[0, 1]
    for i in range(k):
        for j in range(k):
            if m[i, j] != (d if i == j else o):
                return None
    y = -o
    # identity coefficient is d - o = x + y
    return (d - o) - y, y


def _embed(block: RationalMatrix, size: int, offset: int) -> RationalMatrix:
    """Identity of ``size`` with ``block`` placed at ``(offset, offset)``."""
    rows = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for i in range(block.rows):
        for j in range(block.cols):
            rows[offset + i][offset + j] = block[i, j]
    return RationalMatrix.from_rows(rows)


def _shear(m: int, alpha: Fraction) -> RationalMatrix:
    """``W_m(alpha)``: identity with first row ``(1, alpha, ..., alpha)``."""
    rows = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for j in range(1, m):
        rows[0][j] = alpha
    return RationalMatrix.from_rows(rows)


def _descartes_recursion(x: Fraction, y: Fraction, size: int):
    """Diagonalize ``(x+y) I - y 1 1^T`` of the given size.

    Returns ``(diagonal, transform)`` or None if a zero pivot shows up.
    Each step peels one coordinate with the shear ``W(y/x)``; the block left
    behind keeps the same identity coefficient and has ``y <- y + y^2/x``.
    When the remaining 4x4 block is exactly Q_{D,2} the fixed matrix N
    finishes the job.
    """
    diag: list[Fraction] = []
    # T is accumulated in place; right-multiplying by the embedded shear at
    # offset j adds alpha * (column j) to every later column.
    T = [[Fraction(int(i == l)) for l in range(size)] for i in range(size)]
    j = 0
    while True:
        k = size - j
        if k == 4 and x + y == 1 and y == Fraction(1, 2):
            # the remaining block is exactly Q_{D,2}
            N = descartes_final_step()
            tail = [[sum((T[r][j + a] * N[a, c] for a in range(4)), Fraction(0)) for c in range(4)]
                    for r in range(size)]
            for r in range(size):
                T[r][j:] = tail[r]
            diag.extend(Fraction(v) for v in (2, 2, 2, -2))
            return diag, RationalMatrix.from_rows(T)
        if k == 1:
            diag.append(x)
            return diag, RationalMatrix.from_rows(T)
        if x == 0:
            return None
        alpha = y / x
        for r in range(size):
            t = T[r][j]
            if t:
                row = T[r]
                add = alpha * t
                for l in range(j + 1, size):
                    row[l] += add
        diag.append(x)
        s = x + y
        y = y + y * y / x
        x = s - y
        j += 1


def _generic_diagonalize(a: RationalMatrix):
    """Symmetric congruence diagonalization with exact pivoting.

    Zero diagonal pivots are repaired by adding a later coordinate whose
    cross term is nonzero, which makes the new pivot ``2 a_kl + a_ll``
    (or uses ``a_ll`` directly after an exchange).
    """
    n = a.rows
    A = a.tolist()
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, c=Fraction(1)):
        # A <- E^T A E with E = I + c e_src e_dst^T (column dst += c * column src)
        for r in range(n):
            A[r][dst] += c * A[r][src]
        for r in range(n):
            A[dst][r] += c * A[src][r]
        for r in range(n):
            T[r][dst] += c * T[r][src]

    def swap(i, j):
        for r in range(n):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        A[i], A[j] = A[j], A[i]
        for r in range(n):
            T[r][i], T[r][j] = T[r][j], T[r][i]

    for k in range(n):
        if A[k][k] == 0:
            piv = next((l for l in range(k + 1, n) if A[l][l] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                partner = next((l for l in range(k + 1, n) if A[k][l] != 0), None)
                if partner is None:
                    if any(A[k][l] != 0 for l in range(n)):
                        raise SingularMatrixError("unexpected structure during diagonalization")
                    raise SingularMatrixError("form is singular")
                add_col(k, partner)
        p = A[k][k]
        for l in range(k + 1, n):
            if A[k][l] != 0:
                add_col(l, k, -A[k][l] / p)
    diag = [A[i][i] for i in range(n)]
    if any(d == 0 for d in diag):
        raise SingularMatrixError("form is singular")
    return diag, RationalMatrix.from_rows(T)


def conway_diagonalize(q: QuadraticForm) -> DiagonalizationResult:
    """Exact rational diagonalization ``T^T Q T = diag(d)``.

    Descartes-shaped inputs ``x I - y 1 1^T`` follow the shear recursion
    (ending with N when the tail is Q_{D,2}); anything else uses symmetric
    pivoting. The transform is returned so the identity can be checked.
    """
    m = q.matrix
    shape = _descartes_shape(m)
    if shape is not None and shape[1] != 0:
        res = _descartes_recursion(shape[0], shape[1], m.rows)
        if res is not None:
            diag, T = res
            if any(d == 0 for d in diag):
                raise SingularMatrixError("form is singular")
            return DiagonalizationResult(tuple(diag), T)
    diag, T = _generic_diagonalize(m)
    return DiagonalizationResult(tuple(diag), T)


def wilker_diagonal(n: int) -> DiagonalizationResult:
    """``W0^T Q_W W0 = diag(-2, 2, ..., 2)``."""
    _check_n(n)
    m = n + 2
    rows = [[Fraction(0)] * m for _ in range(m)]
    half = Fraction(1, 2)
    rows[0][0] = rows[0][1] = rows[1][0] = half
    rows[1][1] = -half
    for i in range(2, m):
        rows[i][i] = Fraction(1)
    return DiagonalizationResult(tuple([Fraction(-2)] + [Fraction(2)] * (n + 1)),
                                 RationalMatrix.from_rows(rows))


def signature(d: DiagonalizationResult) -> tuple[int, int]:
    """``(positives, negatives)`` of a diagonalization."""
    if any(x == 0 for x in d.diagonal):
        raise ValueError("zero diagonal entry: signature undefined for a singular form")
    pos = sum(1 for x in d.diagonal if x > 0)
    return pos, len(d.diagonal) - pos
