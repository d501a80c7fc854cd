"""Oriented spheres, ACC coordinates, separation and orthogonal (dual) spheres.

Scalars may be Fractions (exact path) or floats. Anything built only from
Fractions and ints stays exact; a single float anywhere switches to floats.

Orientation: a sphere with positive oriented radius is inwardly oriented
(interior is the bounded ball). A hyperplane ``y . h = m`` has its interior on
the side that ``h`` points into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateConfiguration, DimensionError, InvalidSphere
from .exactq import nullspace

__all__ = [
    "Sphere",
    "Hyperplane",
    "OrientedSphere",
    "AccVector",
    "acc_coords",
    "sphere_from_acc",
    "invert_in_unit_sphere",
    "separation",
    "separation_acc",
    "bilinear_k",
    "orthogonal_sphere",
    "orthogonal_curvature_squared",
    "dual_configuration",
    "dual_acc_matrix",
    "classify_pair",
    "wilker_to_lorentz_float",
    "sphere_to_json",
    "sphere_from_json",
    "COINCIDENT",
    "TANGENT",
    "DISJOINT",
    "CROSSING",
]

COINCIDENT, TANGENT, DISJOINT, CROSSING = "coincident", "tangent", "disjoint", "crossing"

EPS = 1e-9
ROUND_TRIP_EPS = 1e-12


def _num(x):
    """Normalize a scalar: ints and Fractions become Fraction, the rest float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _is_zero(x, scale=1.0, tol=ROUND_TRIP_EPS) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol * max(1.0, float(scale))


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0) if _exact(list(u) + list(v)) else 0.0)


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: object  # oriented radius, nonzero

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(_num(c) for c in self.center))
        object.__setattr__(self, "radius", _num(self.radius))
        if self.radius == 0:
            raise InvalidSphere("oriented radius must be nonzero")
        if not self.center:
            raise InvalidSphere("center must have at least one coordinate")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def curvature(self):
        return 1 / self.radius

    @property
    def inward(self) -> bool:
        return self.radius > 0

    @property
    def exact(self) -> bool:
        return _exact(self.center + (self.radius,))


@dataclass(frozen=True)
class Hyperplane:
    """The hyperplane ``y . normal = offset``; interior is where ``normal`` points."""

    normal: tuple
    offset: object

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(_num(c) for c in self.normal))
        object.__setattr__(self, "offset", _num(self.offset))
        if not self.normal:
            raise InvalidSphere("normal must have at least one coordinate")
        nn = _dot(self.normal, self.normal)
        if isinstance(nn, Fraction):
            if nn != 1:
                raise InvalidSphere(f"hyperplane normal must be a unit vector, |h|^2 = {nn}")
        elif abs(nn - 1.0) > 1e-12 * 2:
            raise InvalidSphere(f"hyperplane normal must be a unit vector, |h|^2 = {nn!r}")

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def curvature(self):
        return Fraction(0) if self.exact else 0.0

    @property
    def exact(self) -> bool:
        return _exact(self.normal + (self.offset,))


OrientedSphere = Union[Sphere, Hyperplane]


class AccVector(tuple):
    """``(bbar, b, b*x_1, ..., b*x_n)`` as a tuple of Fractions or floats."""

    def __new__(cls, entries):
        vals = [_num(e) for e in entries]
        if len(vals) < 3:
            raise DimensionError("an ACC vector has at least 3 entries")
        if not _exact(vals):
            vals = [float(v) for v in vals]
        return super().__new__(cls, vals)

    @property
    def n(self) -> int:
        return len(self) - 2

    @property
    def exact(self) -> bool:
        return _exact(self)

    @property
    def bbar(self):
        return self[0]

    @property
    def b(self):
        return self[1]

    @property
    def spatial(self) -> tuple:
        return tuple(self[2:])

    def norm_k(self):
        """``w^T K w / 2 = |w_x|^2 - bbar*b``; equals 1 for every sphere."""
        return _dot(self[2:], self[2:]) - self[0] * self[1]


def acc_coords(s: OrientedSphere) -> AccVector:
    if isinstance(s, Sphere):
        r = s.radius
        xx = _dot(s.center, s.center)
        return AccVector([xx / r - r, 1 / r] + [c / r for c in s.center])
    if isinstance(s, Hyperplane):
        return AccVector([2 * s.offset, 0 * s.offset] + list(s.normal))
    raise TypeError(f"not an oriented sphere: {s!r}")


def sphere_from_acc(w: Sequence, tol: float = 1e-9) -> OrientedSphere:
    """Recover the oriented sphere with ACC coordinates ``w``.

    Checks ``|w_x|^2 - bbar*b = 1`` (exactly, or within ``tol`` relative to
    the entry scale for floats). In float mode a curvature that is zero up to
    rounding is treated as a hyperplane.
    """
    w = w if isinstance(w, AccVector) else AccVector(w)
    bbar, b, wx = w[0], w[1], w[2:]
    scale = max(abs(float(v)) for v in w)
    k = w.norm_k()
    if w.exact:
        if k != 1:
            raise InvalidSphere(f"inconsistent ACC vector: |w_x|^2 - bbar*b = {k}, expected 1")
    elif abs(k - 1.0) > tol * max(1.0, scale * scale):
        raise InvalidSphere(f"inconsistent ACC vector: |w_x|^2 - bbar*b = {k!r}, expected 1")
    if _is_zero(b, scale):
        if not w.exact:
            nrm = math.sqrt(sum(v * v for v in wx))
            wx = tuple(v / nrm for v in wx)
        return Hyperplane(tuple(wx), bbar / 2)
    return Sphere(tuple(v / b for v in wx), 1 / b)


def invert_in_unit_sphere(s: OrientedSphere) -> OrientedSphere:
    """Image under ``y -> y/|y|^2``, keeping the oriented-radius convention.

    ``x' = x/(|x|^2 - r^2)``, ``r' = r/(|x|^2 - r^2)``; a sphere through the
    origin goes to a hyperplane and vice versa.
    """
    if isinstance(s, Sphere):
        d = _dot(s.center, s.center) - s.radius * s.radius
        if _is_zero(d, max(1.0, abs(float(s.radius)) ** 2)):
            # through the origin: the image is the hyperplane with ACC (b, 0, b*x)
            b = 1 / s.radius
            h = [c * b for c in s.center]
            if not s.exact:
                nrm = math.sqrt(sum(v * v for v in h))
                h = [v / nrm for v in h]
            return Hyperplane(tuple(h), b / 2)
        return Sphere(tuple(c / d for c in s.center), s.radius / d)
    if isinstance(s, Hyperplane):
        m = s.offset
        if _is_zero(m):
            return Hyperplane(s.normal, m)
        return Sphere(tuple(h / (2 * m) for h in s.normal), 1 / (2 * m))
    raise TypeError(f"not an oriented sphere: {s!r}")


def bilinear_k(w1: Sequence, w2: Sequence):
    """The raw value ``(1/2) w1^T K w2`` with ``K = [[0,-1],[-1,0],2I]``."""
    if len(w1) != len(w2):
        raise DimensionError(f"ACC vectors of lengths {len(w1)} and {len(w2)}")
    w1 = [_num(v) for v in w1]
    w2 = [_num(v) for v in w2]
    return -(w1[0] * w2[1] + w1[1] * w2[0]) / 2 + _dot(w1[2:], w2[2:])


def separation_acc(w1: Sequence, w2: Sequence):
    """Separation from ACC coordinates, ``-(1/2) w1^T K w2``.

    The sign makes externally tangent, equally oriented spheres come out at
    +1, matching :func:`separation`.
    """
    return -bilinear_k(w1, w2)


def separation(c1: OrientedSphere, c2: OrientedSphere):
    """Separation computed case by case from centers, radii and normals."""
    if c1.dim != c2.dim:
        raise DimensionError(f"spheres live in R^{c1.dim} and R^{c2.dim}")
    if isinstance(c1, Sphere) and isinstance(c2, Sphere):
        diff = [a - b for a, b in zip(c1.center, c2.center)]
        d2 = _dot(diff, diff)
        r1, r2 = c1.radius, c2.radius
        # the oriented radii carry the sign rule for mixed orientations
        return (d2 - r1 * r1 - r2 * r2) / (2 * r1 * r2)
    if isinstance(c1, Hyperplane) and isinstance(c2, Sphere):
        c1, c2 = c2, c1
    if isinstance(c1, Sphere) and isinstance(c2, Hyperplane):
        # signed distance, positive when the center is outside the half-space
        d = c2.offset - _dot(c1.center, c2.normal)
        return d / c1.radius
    return -_dot(c1.normal, c2.normal)


def classify_pair(c1, c2, eps: float = EPS) -> str:
    """Classify two oriented spheres (or ACC vectors).

    Coincident means the same point set, whatever the orientation. Otherwise
    tangent when ``||D| - 1| <= eps``, crossing when ``|D| < 1 - eps``, else
    disjoint; exact inputs use ``eps = 0``.
    """
    w1 = c1 if not isinstance(c1, (Sphere, Hyperplane)) else acc_coords(c1)
    w2 = c2 if not isinstance(c2, (Sphere, Hyperplane)) else acc_coords(c2)
    w1, w2 = AccVector(w1), AccVector(w2)
    if len(w1) != len(w2):
        raise DimensionError(f"ACC vectors of lengths {len(w1)} and {len(w2)}")
    exact = w1.exact and w2.exact
    if exact:
        if w1 == w2 or all(a == -b for a, b in zip(w1, w2)):
            return COINCIDENT
        a = abs(separation_acc(w1, w2))
        if a == 1:
            return TANGENT
        return CROSSING if a < 1 else DISJOINT
    s1 = max(abs(v) for v in w1)
    s2 = max(abs(v) for v in w2)
    ctol = eps * (1 + max(s1, s2))
    if (max(abs(a - b) for a, b in zip(w1, w2)) <= ctol
            or max(abs(a + b) for a, b in zip(w1, w2)) <= ctol):
        return COINCIDENT
    tol = eps * (1 + s1 * s2)
    a = abs(separation_acc(w1, w2))
    if abs(a - 1) <= tol:
        return TANGENT
    return CROSSING if a < 1 - tol else DISJOINT


# --- orthogonal and dual spheres ---------------------------------------------

def _k_matrix(n: int, exact: bool):
    if exact:
        K = [[Fraction(0)] * (n + 2) for _ in range(n + 2)]
        K[0][1] = K[1][0] = Fraction(-1)
        for i in range(2, n + 2):
            K[i][i] = Fraction(2)
        return K
    K = np.zeros((n + 2, n + 2))
    K[0, 1] = K[1, 0] = -1.0
    K[2:, 2:] = 2.0 * np.eye(n)
    return K


def orthogonal_curvature_squared(curvatures: Sequence):
    """``q^2 = (1/2)((sum b)^2/(n-1) - sum b^2)`` for n+1 tangent spheres."""
    b = [_num(x) for x in curvatures]
    n = len(b) - 1
    if n < 2:
        raise DimensionError("need n+1 >= 3 curvatures")
    s = sum(b)
    s2 = sum(x * x for x in b)
    if _exact(b):
        return (s * s / (n - 1) - s2) / 2
    return 0.5 * (s * s / (n - 1) - s2)


def _orthogonal_direction(ws: list):
    """Null vector ``v`` of ``v -> (w_i^T K v)_i`` and its exact/float flag."""
    n = len(ws[0]) - 2
    exact = all(AccVector(w).exact for w in ws)
    if exact:
        K = _k_matrix(n, True)
        rows = [[sum((w[i] * K[i][j] for i in range(n + 2)), Fraction(0)) for j in range(n + 2)]
                for w in ws]
        basis = nullspace(rows)
        if len(basis) != 1:
            raise DegenerateConfiguration("orthogonal sphere is not unique (coincident tangency points)")
        return basis[0], True
    M = np.asarray([[float(x) for x in w] for w in ws]) @ _k_matrix(n, False)
    _, sv, vt = np.linalg.svd(M)
    if sv[-1] < 1e-9 * max(1.0, sv[0]):
        raise DegenerateConfiguration("orthogonal sphere is not unique (coincident tangency points)")
    return list(vt[-1]), False


def orthogonal_sphere(spheres: Sequence[OrientedSphere], orientation_pick: int = 1,
                      allow_hyperplane: bool = False, tol: float = EPS) -> OrientedSphere:
    """The sphere orthogonal to n+1 mutually tangent spheres in R^n.

    ``orientation_pick`` (+1/-1) selects the sign of the returned curvature.
    The curvature is cross-checked against the closed form for ``q^2`` and
    the center against ``q^2 x = -b (1/2 Q_{D,n-1}) C``. A result with
    ``q^2 <= 0`` is degenerate unless ``allow_hyperplane`` is set, in which
    case ``q = 0`` yields a hyperplane.
    """
    if orientation_pick not in (1, -1):
        raise ValueError("orientation_pick must be +1 or -1")
    ws = [acc_coords(s) for s in spheres]
    n = len(ws[0]) - 2
    if len(ws) != n + 1:
        raise DimensionError(f"need n+1 = {n + 1} spheres in R^{n}, got {len(ws)}")
    if any(len(w) != n + 2 for w in ws):
        raise DimensionError("spheres of mixed dimension")
    q2 = orthogonal_curvature_squared([w[1] for w in ws])
    v, exact = _orthogonal_direction(ws)
    vk = AccVector(v).norm_k()
    if (vk <= 0) if exact else (vk <= tol):
        raise DegenerateConfiguration("orthogonal direction is not space-like")
    # w = v / sqrt(vk) has |w_x|^2 - bbar*b = 1, so b^2 = v_b^2 / vk
    q2_null = v[1] * v[1] / vk
    if exact:
        if q2_null != q2:
            raise DegenerateConfiguration(f"curvature mismatch: {q2_null} vs closed form {q2}")
    elif abs(q2_null - q2) > tol * max(1.0, abs(float(q2))):
        raise DegenerateConfiguration(f"curvature mismatch: {q2_null!r} vs closed form {q2!r}")
    if (q2 < 0) if exact else (q2 < -tol):
        raise DegenerateConfiguration(f"q^2 = {q2} is negative: inputs are not a tangent family")
    hyper = (q2 == 0) if exact else (abs(q2) <= tol * max(1.0, max(abs(float(x)) for x in v) ** 2 / vk))
    if hyper and not allow_hyperplane:
        raise DegenerateConfiguration("q^2 = 0: the orthogonal sphere is a hyperplane")
    root = math.sqrt(float(vk))
    w = [float(x) / root for x in v]
    if hyper:
        # sign of a hyperplane is not fixed by a curvature; keep bbar >= 0 for +1
        sgn = 1.0 if (w[0] >= 0) == (orientation_pick > 0) else -1.0
        w = [sgn * x for x in w]
        w[1] = 0.0
        return sphere_from_acc(w)
    if (w[1] > 0) != (orientation_pick > 0):
        w = [-x for x in w]
    _check_center(ws, q2, w, tol)
    return sphere_from_acc(w)


def _check_center(ws, q2, w, tol):
    n = len(w) - 2
    b = np.array([float(x[1]) for x in ws])
    C = np.array([[float(v) for v in x[2:]] for x in ws])
    qd = np.eye(n + 1) - np.ones((n + 1, n + 1)) / (n - 1)
    rhs = -b @ (0.5 * qd) @ C
    x = np.array(w[2:]) / w[1]
    lhs = float(q2) * x
    scale = max(1.0, float(np.abs(rhs).max()), float(np.abs(lhs).max()))
    if np.abs(lhs - rhs).max() > 1e3 * tol * scale:
        raise DegenerateConfiguration("orthogonal sphere center disagrees with the closed form")


def dual_acc_matrix(W: np.ndarray) -> np.ndarray:
    """ACC rows of the dual system, ``-sqrt(n/(2(n-1))) Q_D W``.

    Row i is orthogonal to every row j != i of ``W``; its sign makes
    ``D(C_i^perp, C_i) > 0``.
    """
    W = np.asarray(W, dtype=float)
    m = W.shape[0]
    n = m - 2
    if W.shape != (m, m) or n < 2:
        raise DimensionError(f"expected an (n+2)x(n+2) matrix with n >= 2, got {W.shape}")
    qd = np.eye(m) - np.ones((m, m)) / n
    return -math.sqrt(n / (2.0 * (n - 1))) * (qd @ W)


def dual_configuration(config) -> list[OrientedSphere]:
    """The n+2 spheres ``C_j^perp``, each orthogonal to all ``C_i``, ``i != j``.

    Accepts a DescartesConfig or a raw ACC matrix.
    """
    W = config.to_numpy() if hasattr(config, "to_numpy") else np.asarray(config, dtype=float)
    D = dual_acc_matrix(W)
    scale = max(1.0, float(np.abs(W).max()))
    for i in range(D.shape[0]):
        if abs(D[i, 1]) <= 1e-12 * scale:
            D[i, 1] = 0.0
    return [sphere_from_acc(row) for row in D]


def wilker_to_lorentz_float(n: int) -> np.ndarray:
    """Float matrix Z with ``Z^T Q_W Z = diag(-1, 1, ..., 1)``.

    It carries a factor ``1/sqrt(2)`` and so has no exact counterpart.
    """
    Z = np.zeros((n + 2, n + 2))
    Z[0, 0], Z[0, 1], Z[1, 0], Z[1, 1] = 0.5, -0.5, 0.5, 0.5
    Z[2:, 2:] = np.eye(n)
    return Z / math.sqrt(2.0)


# --- JSON --------------------------------------------------------------------

def _enc(x):
    return str(x) if isinstance(x, Fraction) else float(x)


def _dec(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def sphere_to_json(s: OrientedSphere) -> dict:
    if isinstance(s, Sphere):
        return {"kind": "sphere", "center": [_enc(c) for c in s.center], "radius": _enc(s.radius)}
    return {"kind": "hyperplane", "normal": [_enc(c) for c in s.normal], "offset": _enc(s.offset)}


def sphere_from_json(d: dict) -> OrientedSphere:
    kind = d.get("kind")
    if kind == "sphere":
        return Sphere(tuple(_dec(c) for c in d["center"]), _dec(d["radius"]))
    if kind == "hyperplane":
        return Hyperplane(tuple(_dec(c) for c in d["normal"]), _dec(d["offset"]))
    raise InvalidSphere(f"unknown sphere kind {kind!r}")
