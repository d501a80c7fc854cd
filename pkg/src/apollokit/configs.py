"""Descartes configurations as ACC matrices.

A configuration is an (n+2)x(n+2) matrix W whose rows are the ACC vectors of
n+2 ordered, oriented, pairwise tangent spheres. It is valid exactly when
``W^T Q_D W = Q_W``.

Exact configurations hold a RationalMatrix. Float configurations hold a
numpy array and may carry an exact curvature column alongside it, because
some seeds have irrational centers but integer curvatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, IdentityViolated, ZeroCurvatureSum
from .exactq import RationalMatrix, as_rational, congruence, mat_mul
from .forms import descartes_form, wilker_form
from .spheres import AccVector, OrientedSphere, acc_coords, sphere_from_acc

__all__ = [
    "DescartesConfig",
    "validate",
    "soddy_gossett_residual",
    "seed_polystrip",
    "seed_integral_n2",
    "from_spheres",
    "permute",
    "reverse_orientation",
    "simplex_vertices",
    "float_tolerance",
    "EXACT",
    "FLOAT",
]

EXACT, FLOAT = "exact", "float"
FLOAT_EPS = 1e-9


def float_tolerance(W: np.ndarray, eps: float = FLOAT_EPS) -> float:
    """Residual bound for the float identity check.

    Entries of ``W^T Q_D W`` are sums of products of two W entries, so the
    rounding error grows with ``max|W|^2``; desk-scale configurations get the
    plain ``eps``.
    """
    s = float(np.abs(W).max()) if W.size else 0.0
    return eps * max(1.0, s * s)


@dataclass(frozen=True)
class DescartesConfig:
    n: int
    W: object  # RationalMatrix (exact) or np.ndarray (float)
    representation: str
    orientation: int
    curvatures_exact: Optional[tuple] = field(default=None, compare=False)

    @property
    def exact(self) -> bool:
        return self.representation == EXACT

    def to_numpy(self) -> np.ndarray:
        if self.exact:
            return self.W.to_numpy()
        return np.array(self.W, dtype=float)

    def rows(self) -> list:
        if self.exact:
            return [self.W.row(i) for i in range(self.n + 2)]
        return [tuple(float(x) for x in r) for r in self.W]

    def curvatures(self) -> tuple:
        """Curvature column; exact whenever it is known exactly."""
        if self.exact:
            return self.W.col(1)
        if self.curvatures_exact is not None:
            return self.curvatures_exact
        return tuple(float(x) for x in self.W[:, 1])

    @property
    def curvatures_are_exact(self) -> bool:
        return self.exact or self.curvatures_exact is not None

    def spheres(self) -> list[OrientedSphere]:
        return [sphere_from_acc(AccVector(r)) for r in self.rows()]

    def key(self, grid: float = FLOAT_EPS):
        """Hashable identity: exact W, or W rounded to a ``grid`` lattice."""
        if self.exact:
            return self.W
        q = np.round(self.W / grid).astype(np.int64)
        q[q == 0] = 0
        return q.tobytes()

    def act_left(self, G: RationalMatrix) -> "DescartesConfig":
        """``G . W`` for a group element G of Aut(Q_D); keeps the representation."""
        if G.shape != (self.n + 2, self.n + 2):
            raise DimensionError(f"group element {G.shape} for n={self.n}")
        if self.exact:
            W = mat_mul(G, self.W)
            return DescartesConfig(self.n, W, EXACT, _orientation_of(W.col(1)))
        W = G.to_numpy() @ self.W
        curv = None
        if self.curvatures_exact is not None:
            curv = _mat_vec(G, self.curvatures_exact)
        return DescartesConfig(self.n, W, FLOAT, self.orientation, curv)

    def act_right(self, V) -> "DescartesConfig":
        """``W . V`` (the Moebius right action); V rational or float."""
        if isinstance(V, RationalMatrix) and self.exact:
            W = mat_mul(self.W, V)
            return DescartesConfig(self.n, W, EXACT, _orientation_of(W.col(1)))
        Vf = V.to_numpy() if isinstance(V, RationalMatrix) else np.asarray(V, dtype=float)
        W = self.to_numpy() @ Vf
        s = float(W[:, 1].sum())
        return DescartesConfig(self.n, W, FLOAT, 1 if s > 0 else -1)

    def to_json(self) -> dict:
        if self.exact:
            W = self.W.to_json()
        else:
            W = [[float(x) for x in r] for r in self.W]
        out = {"n": self.n, "representation": self.representation,
               "orientation": self.orientation, "W": W}
        if not self.exact and self.curvatures_exact is not None:
            out["curvatures_exact"] = [str(c) for c in self.curvatures_exact]
        return out

    @classmethod
    def from_json(cls, d: dict, check: bool = True) -> "DescartesConfig":
        n = int(d["n"])
        rep = d.get("representation", EXACT)
        if rep == EXACT:
            W = RationalMatrix.from_json(d["W"])
        else:
            W = np.array(d["W"], dtype=float)
        curv = d.get("curvatures_exact")
        curv = tuple(Fraction(c) for c in curv) if curv is not None else None
        if check:
            return validate(W, n, curvatures_exact=curv)
        return cls(n, W, rep, int(d.get("orientation", 1)), curv)


def _mat_vec(G: RationalMatrix, v: Sequence[Fraction]) -> tuple:
    c = G.cols
    e = G.entries
    return tuple(sum((e[i * c + j] * v[j] for j in range(c) if e[i * c + j] and v[j]), Fraction(0))
                 for i in range(G.rows))


def _orientation_of(b) -> int:
    s = sum(b)
    if s == 0:
        raise ZeroCurvatureSum("curvature sum is zero; total orientation undefined")
    return 1 if s > 0 else -1


def _coerce(W):
    """Return (matrix, representation) for lists, numpy arrays or RationalMatrix."""
    if isinstance(W, RationalMatrix):
        return W, EXACT
    if isinstance(W, np.ndarray):
        if W.dtype.kind in "iu":
            return RationalMatrix.from_rows(W.tolist()), EXACT
        if W.dtype == object:
            W = W.tolist()
        else:
            return np.array(W, dtype=float), FLOAT
    rows = [list(r) for r in W]
    if any(isinstance(x, (float, np.floating)) for r in rows for x in r):
        return np.array(rows, dtype=float), FLOAT
    return RationalMatrix.from_rows(rows), EXACT


def validate(W, n: int, curvatures_exact: Optional[Sequence] = None,
             eps: float = FLOAT_EPS) -> DescartesConfig:
    """Check ``W^T Q_D W = Q_W`` and return the configuration.

    Raises IdentityViolated (carrying the max residual) or ZeroCurvatureSum.
    """
    M, rep = _coerce(W)
    size = n + 2
    if tuple(M.shape) != (size, size):
        raise DimensionError(f"W must be {size}x{size} for n={n}, got {tuple(M.shape)}")
    qd = descartes_form(n).matrix
    qw = wilker_form(n).matrix
    if rep == EXACT:
        lhs = congruence(M, qd)
        if lhs != qw:
            res = max(abs(a - b) for a, b in zip(lhs.entries, qw.entries))
            raise IdentityViolated(f"W^T Q_D W != Q_W (max residual {res})", float(res))
        return DescartesConfig(n, M, EXACT, _orientation_of(M.col(1)))
    lhs = M.T @ qd.to_numpy() @ M
    res = float(np.abs(lhs - qw.to_numpy()).max())
    tol = float_tolerance(M, eps)
    if not res <= tol:
        raise IdentityViolated(f"W^T Q_D W != Q_W (max residual {res:.3g}, tolerance {tol:.3g})", res)
    curv = None
    if curvatures_exact is not None:
        curv = tuple(as_rational(c) for c in curvatures_exact)
        if len(curv) != size:
            raise DimensionError(f"need {size} exact curvatures, got {len(curv)}")
        if max(abs(float(c) - x) for c, x in zip(curv, M[:, 1])) > tol:
            raise IdentityViolated("exact curvatures disagree with the float curvature column", res)
        return DescartesConfig(n, M, FLOAT, _orientation_of(curv), curv)
    s = float(M[:, 1].sum())
    if abs(s) <= tol:
        raise ZeroCurvatureSum("curvature sum is zero; total orientation undefined")
    return DescartesConfig(n, M, FLOAT, 1 if s > 0 else -1)


def soddy_gossett_residual(b: Sequence, n: int):
    """``b^T Q_D b``; zero exactly for curvature vectors of configurations."""
    if len(b) != n + 2:
        raise DimensionError(f"curvature vector of length {len(b)} for n={n}")
    if any(isinstance(x, (float, np.floating)) for x in b):
        v = np.array([float(x) for x in b])
        return float(v @ v - v.sum() ** 2 / n)
    v = [as_rational(x) for x in b]
    s = sum(v)
    return sum(x * x for x in v) - s * s / n


def simplex_vertices(k: int) -> np.ndarray:
    """k points in R^(k-1): a regular simplex with edge 2 and centroid 0.

    Built from the standard basis of R^k (edge sqrt 2), projected onto the
    sum-zero hyperplane with an orthonormal Helmert basis and rescaled.
    """
    if k < 2:
        raise ValueError("a simplex needs at least 2 vertices")
    H = np.zeros((k - 1, k))
    for i in range(1, k):
        H[i - 1, :i] = 1.0
        H[i - 1, i] = -float(i)
        H[i - 1] /= math.sqrt(i * (i + 1))
    return math.sqrt(2.0) * H.T


def seed_polystrip(n: int) -> DescartesConfig:
    """Curvatures (0, 0, 1, ..., 1).

    Hyperplanes x_1 = 1 and x_1 = -1 (interiors facing outward) and n unit
    spheres whose centers are a regular simplex of edge 2 in x_1 = 0. Exact
    for n = 2; float with exact curvatures otherwise.
    """
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    size = n + 2
    bbar = Fraction(n - 2, n)  # |v|^2 - 1 with |v|^2 = 2(n-1)/n
    if n == 2:
        rows = [[2, 0, 1, 0], [2, 0, -1, 0], [0, 1, 0, 1], [0, 1, 0, -1]]
        return validate(RationalMatrix.from_rows(rows), 2)
    W = np.zeros((size, size))
    W[0, 0], W[0, 2] = 2.0, 1.0
    W[1, 0], W[1, 2] = 2.0, -1.0
    V = simplex_vertices(n)
    for k in range(n):
        W[2 + k, 0] = float(bbar)
        W[2 + k, 1] = 1.0
        W[2 + k, 3:] = V[k]
    curv = (Fraction(0), Fraction(0)) + (Fraction(1),) * n
    return validate(W, n, curvatures_exact=curv)


def seed_integral_n2() -> DescartesConfig:
    """Integer ACC matrix with curvatures (-1, 2, 2, 3)."""
    rows = [[1, -1, 0, 0], [0, 2, 1, 0], [0, 2, -1, 0], [1, 3, 0, 2]]
    return validate(RationalMatrix.from_rows(rows), 2)


def from_spheres(spheres: Sequence[OrientedSphere]) -> DescartesConfig:
    ws = [acc_coords(s) for s in spheres]
    n = len(ws[0]) - 2
    if len(ws) != n + 2:
        raise DimensionError(f"a configuration in R^{n} has {n + 2} spheres, got {len(ws)}")
    return validate([list(w) for w in ws], n)


def permute(config: DescartesConfig, sigma: Sequence[int]) -> DescartesConfig:
    """Row ``i`` of the result is row ``sigma[i]`` of the input (0-based)."""
    size = config.n + 2
    sigma = list(sigma)
    if sorted(sigma) != list(range(size)):
        raise ValueError(f"not a permutation of 0..{size - 1}: {sigma}")
    if config.exact:
        W = RationalMatrix.from_rows([config.W.row(i) for i in sigma])
        return validate(W, config.n)
    curv = None
    if config.curvatures_exact is not None:
        curv = tuple(config.curvatures_exact[i] for i in sigma)
    return validate(config.W[sigma], config.n, curvatures_exact=curv)


def reverse_orientation(config: DescartesConfig) -> DescartesConfig:
    if config.exact:
        return DescartesConfig(config.n, -config.W, EXACT, -config.orientation)
    curv = None
    if config.curvatures_exact is not None:
        curv = tuple(-c for c in config.curvatures_exact)
    return DescartesConfig(config.n, -config.W, FLOAT, -config.orientation, curv)
