"""Apollonian, dual Apollonian and super-Apollonian groups.

``S_j`` is the identity except row j, which has -1 on the diagonal and
2/(n-1) elsewhere. ``S_j^perp`` is the identity except column j, which has -1
on the diagonal and 2 elsewhere. Words multiply left to right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ApollokitError, NotReduced, WordError
from .exactq import RationalMatrix, congruence, mat_mul
from .forms import descartes_form

__all__ = [
    "APOLLONIAN",
    "DUAL",
    "GenSymbol",
    "Word",
    "MassCertificate",
    "RelationReport",
    "apollonian_generator",
    "dual_generator",
    "perturbed_generator",
    "generator_matrix",
    "apply_letter_rows",
    "word_to_matrix",
    "verify_relations",
    "reduce_word_n3",
    "is_reduced_n3",
    "find_b_word",
    "braid_rewrite",
    "mass_certificate",
    "free_reduce",
    "commutes",
    "pair_rotation_angle",
    "pair_rotation_check",
]

APOLLONIAN, DUAL = "s", "d"


class GenSymbol(NamedTuple):
    kind: str  # "s" (Apollonian) or "d" (dual)
    index: int  # 1-based

    def __str__(self):
        return f"{self.kind}{self.index}"

    @classmethod
    def parse(cls, token: str) -> "GenSymbol":
        t = token.strip().lower()
        if len(t) < 2 or t[0] not in (APOLLONIAN, DUAL) or not t[1:].isdigit():
            raise WordError(f"bad generator token {token!r}; expected s<j> or d<j>")
        return cls(t[0], int(t[1:]))

    def sort_key(self):
        # dual letters sort before Apollonian ones, then by index
        return (0 if self.kind == DUAL else 1, self.index)


@dataclass(frozen=True)
class Word:
    letters: tuple
    n: int

    def __post_init__(self):
        letters = tuple(l if isinstance(l, GenSymbol) else GenSymbol(*l) for l in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.n < 2:
            raise WordError(f"dimension n must be >= 2, got {self.n}")
        for l in letters:
            if l.kind not in (APOLLONIAN, DUAL):
                raise WordError(f"unknown generator kind {l.kind!r}")
            if not 1 <= l.index <= self.n + 2:
                raise WordError(f"generator index {l.index} outside 1..{self.n + 2}")

    @classmethod
    def parse(cls, text: str, n: int) -> "Word":
        toks = text.replace(",", " ").split()
        if toks in (["e"], ["I"], ["1"]):
            toks = []
        return cls(tuple(GenSymbol.parse(t) for t in toks), n)

    @classmethod
    def apollonian(cls, indices: Iterable[int], n: int) -> "Word":
        return cls(tuple(GenSymbol(APOLLONIAN, j) for j in indices), n)

    def __str__(self):
        return " ".join(str(l) for l in self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.letters[i], self.n)
        return self.letters[i]

    def prepend(self, letter: GenSymbol) -> "Word":
        return Word((letter,) + self.letters, self.n)

    @property
    def is_apollonian(self) -> bool:
        return all(l.kind == APOLLONIAN for l in self.letters)


# --- generators --------------------------------------------------------------

def _check(n: int, j: int) -> None:
    if n < 2:
        raise WordError(f"dimension n must be >= 2, got {n}")
    if not 1 <= j <= n + 2:
        raise WordError(f"generator index {j} outside 1..{n + 2}")


def perturbed_generator(n: int, j: int, lam) -> RationalMatrix:
    """Identity except row j: -1 on the diagonal and ``lam`` elsewhere."""
    _check(n, j)
    m = n + 2
    lam = Fraction(lam)
    rows = [[Fraction(int(r == c)) for c in range(m)] for r in range(m)]
    rows[j - 1] = [Fraction(-1) if c == j - 1 else lam for c in range(m)]
    return RationalMatrix.from_rows(rows)


@lru_cache(maxsize=None)
def apollonian_generator(n: int, j: int) -> RationalMatrix:
    return perturbed_generator(n, j, Fraction(2, n - 1))


@lru_cache(maxsize=None)
def dual_generator(n: int, j: int) -> RationalMatrix:
    _check(n, j)
    m = n + 2
    rows = [[Fraction(int(r == c)) for c in range(m)] for r in range(m)]
    for r in range(m):
        rows[r][j - 1] = Fraction(-1) if r == j - 1 else Fraction(2)
    return RationalMatrix.from_rows(rows)


def generator_matrix(letter: GenSymbol, n: int) -> RationalMatrix:
    if letter.kind == APOLLONIAN:
        return apollonian_generator(n, letter.index)
    return dual_generator(n, letter.index)


def apply_letter_rows(letter: GenSymbol, rows: list, n: int) -> list:
    """Rows of ``G . U`` given the rows of U, without a full matrix product.

    Works for rows of Fractions or floats (or numpy rows).
    """
    j = letter.index - 1
    m = len(rows)
    out = list(rows)
    if letter.kind == APOLLONIAN:
        coef = Fraction(2, n - 1)
        if isinstance(rows[0], np.ndarray):
            coef = float(coef)
            total = sum(rows[i] for i in range(m) if i != j)
            out[j] = coef * total - rows[j]
            return out
        width = len(rows[0])
        total = [sum((rows[i][c] for i in range(m) if i != j), Fraction(0) if isinstance(rows[0][c], Fraction) else 0.0)
                 for c in range(width)]
        out[j] = [coef * t - x for t, x in zip(total, rows[j])]
        return out
    # dual: row_i += 2 row_j for i != j, row_j negated
    rj = rows[j]
    for i in range(m):
        if i == j:
            out[i] = [-x for x in rj] if not isinstance(rj, np.ndarray) else -rj
        elif isinstance(rj, np.ndarray):
            out[i] = rows[i] + 2.0 * rj
        else:
            out[i] = [a + 2 * b for a, b in zip(rows[i], rj)]
    return out


def word_to_matrix(w: Word) -> RationalMatrix:
    size = w.n + 2
    rows = RationalMatrix.identity(size).tolist()
    for letter in reversed(w.letters):
        rows = apply_letter_rows(letter, rows, w.n)
    return RationalMatrix.from_rows(rows)


# --- relations ---------------------------------------------------------------

@dataclass
class RelationReport:
    n: int
    max_power: int
    generators_in_aut: bool
    apollonian_involutions: bool
    dual_involutions: bool
    commutation: bool
    braid_cubes: bool  # (S_j S_k)^3 = I for all j != k
    no_small_power: Optional[bool]  # (S_1 S_2)^m != I for 2 <= m <= max_power, n >= 4
    perturbed_commutation_fails: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when every relation expected in this dimension holds."""
        base = (self.generators_in_aut and self.apollonian_involutions
                and self.dual_involutions and self.commutation
                and self.perturbed_commutation_fails)
        if self.n == 3:
            return base and self.braid_cubes
        if self.n >= 4:
            return base and bool(self.no_small_power) and not self.braid_cubes
        return base

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "max_power": self.max_power,
            "generators_in_aut": self.generators_in_aut,
            "apollonian_involutions": self.apollonian_involutions,
            "dual_involutions": self.dual_involutions,
            "commutation": self.commutation,
            "braid_cubes": self.braid_cubes,
            "no_small_power": self.no_small_power,
            "perturbed_commutation_fails": self.perturbed_commutation_fails,
            "failures": list(self.failures),
            "ok": self.ok,
        }


def _first_identity_power(M: RationalMatrix, max_power: int) -> Optional[int]:
    P = M
    for m in range(2, max_power + 1):
        P = mat_mul(P, M)
        if P.is_identity():
            return m
    return None


def verify_relations(n: int, max_power: int = 50) -> RelationReport:
    """Check the defining relations exactly.

    The power test uses S_1 S_2 only: a coordinate permutation fixes Q_D and
    conjugates S_1 S_2 to any S_j S_k, so one pair decides all.
    """
    if n < 2:
        raise WordError(f"dimension n must be >= 2, got {n}")
    m = n + 2
    qd = descartes_form(n).matrix
    I = RationalMatrix.identity(m)
    failures = []
    S = [apollonian_generator(n, j) for j in range(1, m + 1)]
    D = [dual_generator(n, j) for j in range(1, m + 1)]

    in_aut = True
    for name, gens in (("s", S), ("d", D)):
        for j, G in enumerate(gens, 1):
            if congruence(G, qd) != qd:
                in_aut = False
                failures.append(f"{name}{j} not in Aut(Q_D)")
    inv_s = all(mat_mul(G, G) == I for G in S)
    inv_d = all(mat_mul(G, G) == I for G in D)
    comm = True
    for j in range(m):
        for k in range(m):
            if j != k and mat_mul(S[j], D[k]) != mat_mul(D[k], S[j]):
                comm = False
                failures.append(f"s{j + 1} d{k + 1} != d{k + 1} s{j + 1}")
    cubes = True
    for j in range(m):
        for k in range(m):
            if j != k:
                P = mat_mul(S[j], S[k])
                if mat_mul(mat_mul(P, P), P) != I:
                    cubes = False
    if n == 3 and not cubes:
        failures.append("(s_j s_k)^3 != I for some pair")
    no_power = None
    if n >= 4:
        hit = _first_identity_power(mat_mul(S[0], S[1]), max_power)
        no_power = hit is None
        if hit is not None:
            failures.append(f"(s1 s2)^{hit} = I")
    # the commutation relation pins the off-diagonal value to 2/(n-1)
    lam = Fraction(2, n - 1) + Fraction(1, 7)
    Sp = perturbed_generator(n, 1, lam)
    pert_fails = mat_mul(Sp, D[1]) != mat_mul(D[1], Sp)
    if not pert_fails:
        failures.append("perturbed generator still commutes")
    return RelationReport(n, max_power, in_aut, inv_s, inv_d, comm, cubes, no_power,
                          pert_fails, failures)


def pair_rotation_check(n: int) -> tuple:
    """``(theta, measured, error)`` for the non-unit eigenvalues of S_1 S_2."""
    if n < 2:
        raise WordError(f"dimension n must be >= 2, got {n}")
    theta = 2.0 * math.acos(1.0 / (n - 1))
    if n == 2:
        return theta, None, 0.0
    P = mat_mul(apollonian_generator(n, 1), apollonian_generator(n, 2)).to_numpy()
    ev = np.linalg.eigvals(P)
    pair = sorted(ev, key=lambda z: -abs(z - 1.0))[:2]
    expected = [complex(math.cos(theta), math.sin(theta)), complex(math.cos(theta), -math.sin(theta))]
    err = min(max(abs(pair[0] - expected[0]), abs(pair[1] - expected[1])),
              max(abs(pair[0] - expected[1]), abs(pair[1] - expected[0])))
    measured = abs(float(np.angle(pair[0])))
    return theta, measured, float(err)


def pair_rotation_angle(n: int, tol: float = 1e-9) -> float:
    """``theta_n = 2 arccos(1/(n-1))``, checked against the eigenvalues of S_1 S_2."""
    theta, _, err = pair_rotation_check(n)
    if err > tol:
        raise ApollokitError(f"eigenvalues of s1 s2 differ from exp(+-i theta) by {err:.3g}")
    return theta


# --- n = 3 reduction ---------------------------------------------------------

def _b_word_length(idx: Sequence[int], start: int) -> int:
    """Length 2m of the shortest B-word starting at ``start``, or 0."""
    L = len(idx)
    v = lambda p: idx[start + p - 1]  # 1-based within the candidate
    if start + 4 > L or v(1) != v(3):
        return 0
    m = 2
    while start + 2 * m <= L:
        # inner conditions V_{2j} = V_{2j+3}, j <= m-2, already hold for this m
        if v(2 * m - 2) == v(2 * m):
            return 2 * m
        # extend: the new inner condition for m+1 is V_{2m-2} = V_{2m+1}
        if start + 2 * m + 1 > L or v(2 * m - 2) != v(2 * m + 1):
            return 0
        m += 1
    return 0


def find_b_word(w: Word) -> Optional[tuple]:
    """Leftmost shortest B-word as ``(start, length)`` (0-based), or None."""
    idx = [l.index for l in w.letters]
    for s in range(len(idx)):
        k = _b_word_length(idx, s)
        if k:
            return s, k
    return None


def braid_rewrite(seg: Sequence[int]) -> list:
    """Rewrite a B-word: braid moves at positions 1, 3, ..., 2m-3, then drop VV."""
    out = list(seg)
    m = len(out) // 2
    for p in range(0, 2 * m - 3, 2):
        a, b, c = out[p:p + 3]
        if a != c:
            raise WordError(f"braid move needs a pattern aba, got {a} {b} {c}")
        out[p:p + 3] = [b, a, b]
    if out[-1] != out[-2]:
        raise WordError("B-word rewrite did not end in a square")
    return out[:-2]


def _two_reduce(idx: list) -> list:
    stack: list = []
    for x in idx:
        if stack and stack[-1] == x:
            stack.pop()
        else:
            stack.append(x)
    return stack


def _require_n3(w: Word) -> None:
    if w.n != 3:
        raise WordError(f"this reduction is for n = 3, got n = {w.n}")
    if not w.is_apollonian:
        raise WordError("only Apollonian letters are allowed here")


def reduce_word_n3(w: Word) -> Word:
    """2-reduce and B-reduce to a fixpoint; the matrix is unchanged."""
    _require_n3(w)
    idx = _two_reduce([l.index for l in w.letters])
    while True:
        hit = find_b_word(Word.apollonian(idx, 3))
        if hit is None:
            return Word.apollonian(idx, 3)
        s, k = hit
        idx = _two_reduce(idx[:s] + braid_rewrite(idx[s:s + k]) + idx[s + k:])


def is_reduced_n3(w: Word) -> bool:
    _require_n3(w)
    idx = [l.index for l in w.letters]
    if any(a == b for a, b in zip(idx, idx[1:])):
        return False
    return find_b_word(w) is None


@dataclass(frozen=True)
class MassCertificate:
    word: Word
    mass_trace: tuple  # mass after prepending each letter, right to left
    deltas: tuple  # mass increment at each step
    initial_mass: int = 5

    @property
    def final_mass(self):
        return self.mass_trace[-1] if self.mass_trace else self.initial_mass

    @property
    def strictly_increasing(self) -> bool:
        seq = (self.initial_mass,) + tuple(self.mass_trace)
        return all(a < b for a, b in zip(seq, seq[1:]))

    @property
    def certifies_nonidentity(self) -> bool:
        return bool(self.mass_trace) and self.strictly_increasing and self.final_mass >= 7

    def to_json(self) -> dict:
        return {"word": str(self.word), "mass_trace": [str(x) for x in self.mass_trace],
                "deltas": [str(x) for x in self.deltas], "initial_mass": self.initial_mass,
                "final_mass": str(self.final_mass),
                "strictly_increasing": self.strictly_increasing,
                "certifies_nonidentity": self.certifies_nonidentity}


def mass_certificate(w: Word) -> MassCertificate:
    """Masses of the suffixes of a reduced n = 3 word.

    Tracks row sums sigma_j and the increments delta_j = Sigma - 3 sigma_j,
    and checks the delta recurrences at every step.
    """
    _require_n3(w)
    if not is_reduced_n3(w):
        raise NotReduced(f"word {w} is not reduced")
    size = 5
    sigma = [1] * size
    mass = 5
    delta = [mass - 3 * s for s in sigma]
    trace, incs = [], []
    for letter in reversed(w.letters):
        j = letter.index - 1
        inc = delta[j]
        new_sigma = list(sigma)
        new_sigma[j] = mass - 2 * sigma[j]
        new_mass = 2 * mass - 3 * sigma[j]
        new_delta = [new_mass - 3 * s for s in new_sigma]
        rec = [-delta[k] if k == j else delta[k] + delta[j] for k in range(size)]
        if new_delta != rec or new_mass - mass != inc:
            raise ApollokitError("mass recurrences failed; this indicates a bug")
        sigma, mass, delta = new_sigma, new_mass, new_delta
        trace.append(mass)
        incs.append(inc)
    return MassCertificate(w, tuple(Fraction(x) for x in trace), tuple(Fraction(x) for x in incs))


# --- mixed words -------------------------------------------------------------

def commutes(a: GenSymbol, b: GenSymbol) -> bool:
    """Commutation known from the relations: S_j with S_k^perp for j != k."""
    return a.kind != b.kind and a.index != b.index


def free_reduce(w: Word) -> Word:
    """Cancel involution pairs across commuting letters, then sort canonically.

    A letter cancels an earlier copy of itself when every letter in between
    commutes with it. The result is the lexicographically least rearrangement
    under the known commutations (dual before Apollonian, then by index).
    Sound for every n; complete for pure Apollonian words when n >= 4.
    """
    out: list = []
    for x in w.letters:
        hit = None
        for p in range(len(out) - 1, -1, -1):
            y = out[p]
            if y == x:
                hit = p
                break
            if not commutes(x, y):
                break
        if hit is None:
            out.append(x)
        else:
            del out[hit]
    return Word(tuple(_lex_normal(out)), w.n)


def _lex_normal(letters: list) -> list:
    rest = list(letters)
    res = []
    while rest:
        best = None
        for p, x in enumerate(rest):
            if all(commutes(x, y) for y in rest[:p]):
                if best is None or x.sort_key() < rest[best].sort_key():
                    best = p
        res.append(rest.pop(best))
    return res
