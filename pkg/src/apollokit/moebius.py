"""Moebius transformations acting on the right of ACC matrices.

A Moebius map g sends a configuration with ACC matrix W to one with matrix
``W V_g^{-1}``; the matrices ``V_g^{-1}`` lie in Aut(Q_W). The orientation
flip ``-I`` completes the generators to all of Aut(Q_W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .configs import DescartesConfig, validate
from .errors import DimensionError, IdentityViolated, InvalidGenerator
from .exactq import RationalMatrix, as_rational, congruence
from .forms import wilker_form
from .spheres import Hyperplane, OrientedSphere, Sphere, invert_in_unit_sphere

__all__ = [
    "Translation",
    "Dilation",
    "Rotation",
    "UnitInversion",
    "Flip",
    "MoebiusGen",
    "wilker_matrix",
    "in_wilker_group",
    "apply_moebius",
    "isochronous_test",
    "parse_generators",
    "format_generators",
    "apply_to_sphere",
]


def _is_exact(xs) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def _scalar(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Translation:
    y0: tuple

    def __post_init__(self):
        object.__setattr__(self, "y0", tuple(_scalar(v) for v in self.y0))


@dataclass(frozen=True)
class Dilation:
    r: object

    def __post_init__(self):
        r = _scalar(self.r)
        if not r > 0:
            raise InvalidGenerator(f"dilation factor must be positive, got {self.r}")
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class Rotation:
    """``y -> O y`` for an orthogonal O, stored row-major as a tuple of rows."""

    O: tuple

    def __post_init__(self):
        rows = tuple(tuple(_scalar(v) for v in r) for r in self.O)
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise InvalidGenerator("rotation matrix must be square")
        if _is_exact([v for r in rows for v in r]):
            m = RationalMatrix.from_rows(rows)
            if not (m.T @ m).is_identity():
                raise InvalidGenerator("rotation matrix is not orthogonal")
        else:
            a = np.array(rows, dtype=float)
            if np.abs(a.T @ a - np.eye(k)).max() > 1e-12:
                raise InvalidGenerator("rotation matrix is not orthogonal")
        object.__setattr__(self, "O", rows)

    @classmethod
    def plane(cls, n: int, theta: float, i: int = 0, j: int = 1) -> "Rotation":
        """Float rotation by ``theta`` in the (i, j) coordinate plane."""
        a = np.eye(n)
        c, s = math.cos(theta), math.sin(theta)
        a[i, i] = a[j, j] = c
        a[i, j], a[j, i] = -s, s
        return cls(tuple(tuple(float(v) for v in r) for r in a))

    @classmethod
    def pythagorean(cls, n: int, p: int, q: int, i: int = 0, j: int = 1) -> "Rotation":
        """Exact rotation with cosine ``(p^2-q^2)/(p^2+q^2)`` and sine ``2pq/(p^2+q^2)``."""
        h = p * p + q * q
        if h == 0:
            raise InvalidGenerator("p and q cannot both be zero")
        c, s = Fraction(p * p - q * q, h), Fraction(2 * p * q, h)
        rows = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        rows[i][i] = rows[j][j] = c
        rows[i][j], rows[j][i] = -s, s
        return cls(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class UnitInversion:
    pass


@dataclass(frozen=True)
class Flip:
    pass


MoebiusGen = Union[Translation, Dilation, Rotation, UnitInversion, Flip]


def _gen_exact(g: MoebiusGen) -> bool:
    if isinstance(g, Translation):
        return _is_exact(g.y0)
    if isinstance(g, Dilation):
        return _is_exact([g.r])
    if isinstance(g, Rotation):
        return _is_exact([v for r in g.O for v in r])
    return True


def _raw_matrix(g: MoebiusGen, n: int, one, zero) -> list:
    m = n + 2
    V = [[one if i == j else zero for j in range(m)] for i in range(m)]
    if isinstance(g, Translation):
        if len(g.y0) != n:
            raise DimensionError(f"translation vector of length {len(g.y0)} for n={n}")
        y = g.y0
        V[1][0] = sum((v * v for v in y), zero)
        for i in range(n):
            V[1][2 + i] = y[i]
            V[2 + i][0] = 2 * y[i]
    elif isinstance(g, Dilation):
        V[0][0] = g.r
        V[1][1] = 1 / g.r
    elif isinstance(g, Rotation):
        if len(g.O) != n:
            raise DimensionError(f"{len(g.O)}x{len(g.O)} rotation for n={n}")
        for i in range(n):
            for j in range(n):
                V[2 + i][2 + j] = g.O[j][i]
    elif isinstance(g, UnitInversion):
        V[0][0] = V[1][1] = zero
        V[0][1] = V[1][0] = one
    elif isinstance(g, Flip):
        for i in range(m):
            V[i][i] = -one
    else:
        raise InvalidGenerator(f"unknown Moebius generator {g!r}")
    return V


def wilker_matrix(g: MoebiusGen, n: int):
    """The right-action matrix ``V_g^{-1}``.

    Exact generators give a RationalMatrix, float data a numpy array. The
    result is checked to lie in Aut(Q_W).
    """
    if n < 2:
        raise DimensionError(f"dimension n must be >= 2, got {n}")
    if _gen_exact(g):
        V = RationalMatrix.from_rows(_raw_matrix(g, n, Fraction(1), Fraction(0)))
    else:
        V = np.array(_raw_matrix(g, n, 1.0, 0.0), dtype=float)
    if not in_wilker_group(V, n):
        raise InvalidGenerator(f"{g!r} does not give an element of Aut(Q_W)")
    return V


def _wilker_residual(V, n: int) -> float:
    qw = wilker_form(n).matrix
    if isinstance(V, RationalMatrix):
        return 0.0 if congruence(V, qw) == qw else math.inf
    a = np.asarray(V, dtype=float)
    q = qw.to_numpy()
    scale = max(1.0, float(np.abs(a).max()) ** 2)
    return float(np.abs(a.T @ q @ a - q).max()) / scale


def in_wilker_group(V, n: int, tol: float = 1e-9) -> bool:
    """``V^T Q_W V = Q_W`` (exact for rational V)."""
    shape = V.shape if isinstance(V, RationalMatrix) else np.shape(V)
    if tuple(shape) != (n + 2, n + 2):
        raise DimensionError(f"matrix of shape {tuple(shape)} for n={n}")
    return _wilker_residual(V, n) <= tol


def isochronous_test(V, n: int) -> bool:
    """True iff V lies in the time-orientation preserving half of Aut(Q_W).

    Conjugating to the Lorentz form gives ``e1^T A V A^{-1} e1`` with
    ``A = sqrt(2) [[1,1],[-1,1]] + I``. The sqrt(2) cancels and the value is
    ``(V11 + V12 + V21 + V22) / 2``.
    """
    if not in_wilker_group(V, n):
        raise IdentityViolated("matrix is not in Aut(Q_W)", _wilker_residual(V, n))
    if isinstance(V, RationalMatrix):
        s = V[0, 0] + V[0, 1] + V[1, 0] + V[1, 1]
    else:
        a = np.asarray(V, dtype=float)
        s = a[0, 0] + a[0, 1] + a[1, 0] + a[1, 1]
    return s / 2 > 0


def apply_moebius(config: DescartesConfig, gens: Sequence[MoebiusGen]) -> DescartesConfig:
    """Apply ``gens`` left to right: ``W V_{g1}^{-1} V_{g2}^{-1} ...``.

    The result is re-validated; a failure here means a bug.
    """
    out = config
    for g in gens:
        out = out.act_right(wilker_matrix(g, config.n))
    return validate(out.W, config.n)


# --- direct geometric action (used as an oracle) ----------------------------

def apply_to_sphere(g: MoebiusGen, s: OrientedSphere) -> OrientedSphere:
    """Transform one oriented sphere geometrically, without ACC matrices."""
    if isinstance(g, Translation):
        if isinstance(s, Sphere):
            return Sphere(tuple(c + y for c, y in zip(s.center, g.y0)), s.radius)
        return Hyperplane(s.normal, s.offset + sum(h * y for h, y in zip(s.normal, g.y0)))
    if isinstance(g, Dilation):
        if isinstance(s, Sphere):
            return Sphere(tuple(g.r * c for c in s.center), g.r * s.radius)
        return Hyperplane(s.normal, g.r * s.offset)
    if isinstance(g, Rotation):
        def rot(v):
            return tuple(sum(o * x for o, x in zip(row, v)) for row in g.O)
        if isinstance(s, Sphere):
            return Sphere(rot(s.center), s.radius)
        return Hyperplane(rot(s.normal), s.offset)
    if isinstance(g, UnitInversion):
        return invert_in_unit_sphere(s)
    if isinstance(g, Flip):
        if isinstance(s, Sphere):
            return Sphere(s.center, -s.radius)
        return Hyperplane(tuple(-h for h in s.normal), -s.offset)
    raise InvalidGenerator(f"unknown Moebius generator {g!r}")


# --- string format -----------------------------------------------------------

def _num(tok: str):
    tok = tok.strip()
    try:
        return Fraction(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise InvalidGenerator(f"not a number: {tok!r}") from None


def parse_generators(text: str, n: int) -> list:
    """Parse ``"t:0.5,0;d:2;j;f"``.

    Tokens: ``t:y1,..,yn`` translation, ``d:r`` dilation, ``r:o11,o12,..``
    rotation given row-major, ``a:theta`` float rotation of the first
    coordinate plane, ``j`` unit inversion, ``f`` flip. Decimal literals
    are read exactly.
    """
    gens = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        kind, _, arg = part.partition(":")
        kind = kind.strip().lower()
        vals = [_num(t) for t in arg.split(",")] if arg.strip() else []
        if kind == "t":
            if len(vals) != n:
                raise InvalidGenerator(f"translation needs {n} coordinates, got {len(vals)}")
            gens.append(Translation(tuple(vals)))
        elif kind == "d":
            if len(vals) != 1:
                raise InvalidGenerator("dilation takes one factor")
            gens.append(Dilation(vals[0]))
        elif kind == "r":
            if len(vals) != n * n:
                raise InvalidGenerator(f"rotation needs {n * n} entries, got {len(vals)}")
            rows = tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n))
            try:
                gens.append(Rotation(rows))
            except InvalidGenerator:
                # rounded decimals of a float rotation: keep them as floats
                gens.append(Rotation(tuple(tuple(float(v) for v in r) for r in rows)))
        elif kind == "a":
            if len(vals) != 1:
                raise InvalidGenerator("angle rotation takes one angle")
            gens.append(Rotation.plane(n, float(vals[0])))
        elif kind == "j" and not vals:
            gens.append(UnitInversion())
        elif kind == "f" and not vals:
            gens.append(Flip())
        else:
            raise InvalidGenerator(f"cannot parse generator {part!r}")
    return gens


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


def format_generators(gens: Sequence[MoebiusGen]) -> str:
    out = []
    for g in gens:
        if isinstance(g, Translation):
            out.append("t:" + ",".join(_fmt(v) for v in g.y0))
        elif isinstance(g, Dilation):
            out.append("d:" + _fmt(g.r))
        elif isinstance(g, Rotation):
            out.append("r:" + ",".join(_fmt(v) for r in g.O for v in r))
        elif isinstance(g, UnitInversion):
            out.append("j")
        elif isinstance(g, Flip):
            out.append("f")
    return ";".join(out)
