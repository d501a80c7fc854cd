"""p-adic symbols and the rational equivalence of quadratic forms.

Two nonsingular rational forms of the same dimension are equivalent over Q
iff their signatures agree, their determinants differ by a rational square,
and their p-adic symbols agree for every prime p. Only finitely many primes
need checking: those dividing 2, an entry of a (cleared) diagonalization, or
a determinant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

from .errors import DimensionError, Exhausted, NotEquivalent, SingularMatrixError
from .exactq import RationalMatrix, as_rational, congruence, determinant, inverse
from .forms import (QuadraticForm, conway_diagonalize, descartes_form, lorentz_form,
                    lorentz_intertwiner_n2, signature)

__all__ = [
    "PadicSymbol",
    "is_prime",
    "factorize",
    "prime_factors",
    "legendre",
    "jacobi",
    "padic_invariant_scalar",
    "form_padic_invariant",
    "clear_to_integer",
    "square_class_equal",
    "is_rational_square",
    "rationally_equivalent",
    "equivalence_details",
    "super_rational_dimension",
    "descartes_lorentz_necessary",
    "wilker_lorentz_necessary",
    "find_rational_intertwiner",
]


@dataclass(frozen=True)
class PadicSymbol:
    p: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < 8:
            raise ValueError(f"symbol value {self.value} not reduced mod 8")


# --- elementary number theory ------------------------------------------------

def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def factorize(m: int) -> dict:
    """Prime factorization of ``|m|`` by trial division."""
    m = abs(int(m))
    if m == 0:
        raise ValueError("cannot factor 0")
    out: dict = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def prime_factors(m: int) -> set:
    return set(factorize(m)) if m else set()


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _split(d: int, p: int) -> tuple:
    """``d = b p^l`` with ``p`` not dividing ``b``."""
    l = 0
    while d % p == 0:
        d //= p
        l += 1
    return d, l


# --- p-adic symbols ----------------------------------------------------------

def padic_invariant_scalar(d: int, p: int) -> PadicSymbol:
    """sigma_p(d) mod 8 for a nonzero integer d."""
    d = int(d)
    if d == 0:
        raise ValueError("sigma_p is undefined for 0")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    b, l = _split(d, p)
    if p == 2:
        if l % 2 == 0:
            v = b % 8
        else:
            v = b % 8 if b % 8 in (1, 7) else (b + 4) % 8
        return PadicSymbol(2, v)
    if l % 2 == 0:
        return PadicSymbol(p, 1)
    v = p if legendre(b, p) == 1 else p + 4
    return PadicSymbol(p, v % 8)


def clear_to_integer(x) -> int:
    """``a/b -> a*b``: multiply by the square ``b^2`` to get an integer."""
    x = as_rational(x)
    return x.numerator * x.denominator


def form_padic_invariant(diagonal: Sequence, p: int) -> PadicSymbol:
    """Sum of the scalar symbols of the cleared diagonal entries, mod 8."""
    total = 0
    for d in diagonal:
        d = as_rational(d)
        if d == 0:
            raise SingularMatrixError("zero diagonal entry")
        total += padic_invariant_scalar(clear_to_integer(d), p).value
    return PadicSymbol(p, total % 8)


def is_rational_square(x) -> bool:
    x = as_rational(x)
    if x < 0:
        return False
    a, b = x.numerator, x.denominator
    return isqrt(a) ** 2 == a and isqrt(b) ** 2 == b


def square_class_equal(a, b) -> bool:
    """True iff a/b is the square of a rational."""
    a, b = as_rational(a), as_rational(b)
    if a == 0 or b == 0:
        raise ValueError("square classes of 0 are not defined")
    return is_rational_square(a / b)


# --- the decision procedure ----------------------------------------------------

def equivalence_details(q1: QuadraticForm, q2: QuadraticForm) -> dict:
    """All local data entering the Hasse-Minkowski decision."""
    if q1.dim != q2.dim:
        raise DimensionError(f"forms of dimension {q1.dim} and {q2.dim}")
    det1, det2 = determinant(q1.matrix), determinant(q2.matrix)
    if det1 == 0 or det2 == 0:
        raise SingularMatrixError("forms must be nonsingular")
    d1 = conway_diagonalize(q1).diagonal
    d2 = conway_diagonalize(q2).diagonal
    primes = {2}
    for x in list(d1) + list(d2) + [det1, det2]:
        primes |= prime_factors(clear_to_integer(x))
    symbols = {p: (form_padic_invariant(d1, p).value, form_padic_invariant(d2, p).value)
               for p in sorted(primes)}
    sig1 = signature_of(d1)
    sig2 = signature_of(d2)
    return {
        "signatures": (sig1, sig2),
        "determinants": (det1, det2),
        "det_ratio_square": square_class_equal(det1, det2),
        "symbols": symbols,
        "primes": sorted(primes),
    }


def signature_of(diagonal: Sequence) -> tuple:
    pos = sum(1 for x in diagonal if x > 0)
    return pos, len(diagonal) - pos


def rationally_equivalent(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    info = equivalence_details(q1, q2)
    s1, s2 = info["signatures"]
    if s1 != s2 or not info["det_ratio_square"]:
        return False
    return all(a == b for a, b in info["symbols"].values())


def super_rational_dimension(n: int) -> bool:
    """n is twice a square or an odd square."""
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    if n % 2 == 1:
        r = isqrt(n)
        return r * r == n
    h = n // 2
    r = isqrt(h)
    return r * r == h


def descartes_lorentz_necessary(n: int) -> bool:
    """Determinant condition for Q_D ~ Q_L: 2/n must be a square, i.e. n = 2k^2."""
    return is_rational_square(Fraction(2, n))


def wilker_lorentz_necessary(n: int) -> bool:
    """Determinant condition for Q_W ~ Q_L: 2^(n+4) must be a square, i.e. n even."""
    return n % 2 == 0


# --- intertwiners ------------------------------------------------------------

def _verify(W: RationalMatrix, q1: QuadraticForm, q2: QuadraticForm) -> bool:
    return congruence(W, q1.matrix) == q2.matrix


def _sqrt_rational(x: Fraction) -> Optional[Fraction]:
    if not is_rational_square(x):
        return None
    return Fraction(isqrt(x.numerator), isqrt(x.denominator))


def _diagonal_match(q1: QuadraticForm, q2: QuadraticForm) -> Optional[RationalMatrix]:
    """Pair diagonal entries of equal square class and rescale them."""
    r1, r2 = conway_diagonalize(q1), conway_diagonalize(q2)
    d1, d2 = list(r1.diagonal), list(r2.diagonal)
    m = len(d1)
    used = [False] * m
    cols = []
    for i in range(m):
        hit = None
        for k in range(m):
            if not used[k] and d1[k] * d2[i] > 0 and square_class_equal(d1[k], d2[i]):
                hit = k
                break
        if hit is None:
            return None
        used[hit] = True
        cols.append((hit, _sqrt_rational(d2[i] / d1[hit])))
    # M = P S: column i of M is s_i e_{k_i}, so M^T D1 M = D2
    M = [[Fraction(0)] * m for _ in range(m)]
    for i, (k, s) in enumerate(cols):
        M[k][i] = s
    W = r1.transform @ RationalMatrix.from_rows(M) @ inverse(r2.transform)
    return W


def _primitive(v: Sequence[Fraction]) -> list:
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [Fraction(x // g) for x in ints] if g else [Fraction(0)] * len(v)


def _weight_shell(dim: int, w: int, h: int):
    """Primitive integer vectors with L1 norm w and max-norm <= h.

    The first nonzero entry is positive (c and -c represent the same value).
    Sparse vectors come out first within a shell, in a fixed order.
    """
    def rec(i, left):
        if i == dim:
            if left == 0:
                yield ()
            return
        for a in range(0, min(left, h) + 1):
            for tail in rec(i + 1, left - a):
                if a == 0:
                    yield (0,) + tail
                else:
                    yield (a,) + tail
                    yield (-a,) + tail

    for c in rec(0, w):
        first = next(x for x in c if x)
        if first < 0:
            continue
        g = 0
        for x in c:
            g = gcd(g, abs(x))
        if g == 1:
            yield c


def _bilinear(A: RationalMatrix, u: Sequence, v: Sequence) -> Fraction:
    m = len(u)
    return sum((u[a] * A[a, b] * v[b] for a in range(m) if u[a] for b in range(m) if v[b]),
               Fraction(0))


def _column_search(q1: QuadraticForm, q2: QuadraticForm, height_bound: int,
                   max_candidates: int) -> RationalMatrix:
    """Greedy column-by-column construction.

    Diagonalize q2 to diag(e_1..e_m). For each i pick the first integer
    combination c of the current basis of the q1-orthogonal complement of
    the columns chosen so far whose value g makes e_i/g a rational square,
    and use ``sqrt(e_i/g) * B c``. Witt cancellation guarantees every step
    has a solution, so only the height bound or the candidate cap can make
    this fail. The complement is updated by projecting out the new column,
    which keeps entries small when the chosen combinations are sparse.
    """
    r2 = conway_diagonalize(q2)
    targets = list(r2.diagonal)
    A = q1.matrix
    m = q1.dim
    basis = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    chosen: list = []
    tried = 0
    for e in targets:
        k = len(basis)
        B = RationalMatrix.from_rows(basis).T  # m x k
        G = congruence(B, A)
        found = None
        w = 0
        while found is None and w < height_bound * k:
            w += 1
            for c in _weight_shell(k, w, height_bound):
                tried += 1
                if tried > max_candidates:
                    raise Exhausted(f"candidate cap {max_candidates} reached")
                g = sum((c[a] * G[a, b] * c[b] for a in range(k) if c[a]
                         for b in range(k) if c[b]), Fraction(0))
                if g == 0 or (g > 0) != (e > 0):
                    continue
                t = _sqrt_rational(e / g)
                if t is None:
                    continue
                found = (c, [t * sum((basis[a][r] * c[a] for a in range(k) if c[a]), Fraction(0))
                             for r in range(m)])
                break
        if found is None:
            raise Exhausted(f"no vector of height <= {height_bound} represents {e}")
        c, col = found
        chosen.append(col)
        pivot = next(a for a in range(k) if c[a])
        nxt = []
        for a in range(k):
            if a == pivot:
                continue
            coef = _bilinear(A, basis[a], col) / e
            nxt.append(_primitive([x - coef * y for x, y in zip(basis[a], col)]))
        basis = nxt
    V = RationalMatrix.from_rows(chosen).T
    return V @ inverse(r2.transform)


def find_rational_intertwiner(q1: QuadraticForm, q2: QuadraticForm, height_bound: int = 64,
                              strategy: str = "auto", max_candidates: int = 200_000) -> RationalMatrix:
    """Exact W with ``W^T q1 W = q2``.

    ``strategy`` is "auto" (known matrix, then diagonal matching, then
    search), "diagonal" or "search". Raises NotEquivalent when the forms are
    not rationally equivalent and Exhausted when the bounded search fails.
    """
    if q1.dim != q2.dim:
        raise DimensionError(f"forms of dimension {q1.dim} and {q2.dim}")
    if not rationally_equivalent(q1, q2):
        raise NotEquivalent("forms are not rationally equivalent; no intertwiner exists")
    if strategy not in ("auto", "diagonal", "search"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "auto" and q1.dim == 4:
        if q1.matrix == descartes_form(2).matrix and q2.matrix == lorentz_form(2).matrix:
            J0 = lorentz_intertwiner_n2()
            if _verify(J0, q1, q2):
                return J0
    if strategy in ("auto", "diagonal"):
        W = _diagonal_match(q1, q2)
        if W is not None and _verify(W, q1, q2):
            return W
        if strategy == "diagonal":
            raise Exhausted("diagonal entries do not pair up by square class")
    W = _column_search(q1, q2, height_bound, max_candidates)
    if not _verify(W, q1, q2):
        raise SingularMatrixError("search produced a matrix failing the congruence; this is a bug")
    return W
