"""Orbits of Descartes configurations (cluster ensembles) and what they contain.

An orbit element is a pair (word, config) with ``config.W = M(word) . seed.W``.
Traversal is breadth first; a word is extended by prepending one letter, and
letters that would break the word normal form are skipped.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .arith import prime_factors
from .configs import EXACT, FLOAT, DescartesConfig
from .errors import RepresentationError, ResourceLimitExceeded
from .exactq import RationalMatrix
from .groups import (APOLLONIAN, DUAL, GenSymbol, Word, _b_word_length, apply_letter_rows,
                     free_reduce, word_to_matrix)
from .spheres import classify_pair

__all__ = [
    "GROUPS",
    "Orbit",
    "PackingReport",
    "generate_orbit",
    "letters_for",
    "curvature_spectrum",
    "distinct_sphere_rows",
    "scalar_step",
    "oracle_curvature_vectors",
    "s_integrality_report",
    "expected_s_primes",
    "check_packing",
    "geometric_dedup",
    "orbit_to_json",
    "orbit_from_json",
    "spectrum_to_csv",
]

GROUPS = ("apollonian", "dual", "super")
DEFAULT_DEPTH = 4
DEFAULT_MAX_ELEMENTS = 100_000


@dataclass
class Orbit:
    seed: DescartesConfig
    group: str
    depth: int
    elements: list  # [(Word, DescartesConfig)] in breadth-first order
    collisions: int = 0  # dropped duplicates whose words have equal matrices
    stabilizer_collisions: int = 0  # duplicates from different group elements

    @property
    def n(self) -> int:
        return self.seed.n

    @property
    def exact(self) -> bool:
        return self.seed.exact

    @property
    def curvatures_exact(self) -> bool:
        return self.seed.curvatures_are_exact

    def __len__(self):
        return len(self.elements)


def letters_for(group: str, n: int) -> list:
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}; choose from {GROUPS}")
    s = [GenSymbol(APOLLONIAN, j) for j in range(1, n + 3)]
    d = [GenSymbol(DUAL, j) for j in range(1, n + 3)]
    return {"apollonian": s, "dual": d, "super": d + s}[group]


def _admissible(letter: GenSymbol, word: Word, group: str) -> bool:
    if word.letters and word.letters[0] == letter:
        return False
    if group == "super":
        new = word.prepend(letter)
        return free_reduce(new).letters == new.letters
    if group == "apollonian" and word.n == 3:
        idx = [letter.index] + [l.index for l in word.letters]
        return _b_word_length(idx, 0) == 0
    return True


def _act(letter: GenSymbol, cfg: DescartesConfig) -> DescartesConfig:
    n = cfg.n
    if cfg.exact:
        rows = apply_letter_rows(letter, cfg.W.tolist(), n)
        W = RationalMatrix.from_rows(rows)
        s = sum(W.col(1))
        return DescartesConfig(n, W, EXACT, 1 if s > 0 else -1)
    rows = apply_letter_rows(letter, list(cfg.W), n)
    W = np.array(rows)
    curv = None
    if cfg.curvatures_exact is not None:
        curv = tuple(scalar_step(letter, cfg.curvatures_exact, n))
    return DescartesConfig(n, W, FLOAT, cfg.orientation, curv)


def generate_orbit(seed: DescartesConfig, group: str = "apollonian", depth: int = DEFAULT_DEPTH,
                   max_elements: int = DEFAULT_MAX_ELEMENTS) -> Orbit:
    """Breadth-first orbit over normalized words of length <= depth.

    Duplicates (by exact W, or W on a 1e-9 grid for float seeds) are dropped.
    A duplicate whose word has the same matrix as the kept word (for n = 3,
    ``s1 s2 s1`` and ``s2 s1 s2`` are both reduced) counts in ``collisions``;
    one coming from a different group element would mean a nontrivial
    stabilizer and counts in ``stabilizer_collisions``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    letters = letters_for(group, seed.n)
    root = Word((), seed.n)
    elements = [(root, seed)]
    seen = {seed.key(): root}
    frontier = [(root, seed)]
    collisions = stab = 0
    for _ in range(depth):
        nxt = []
        for word, cfg in frontier:
            for letter in letters:
                if not _admissible(letter, word, group):
                    continue
                new_cfg = _act(letter, cfg)
                key = new_cfg.key()
                new_word = word.prepend(letter)
                if key in seen:
                    if word_to_matrix(new_word) == word_to_matrix(seen[key]):
                        collisions += 1
                    else:
                        stab += 1
                    continue
                seen[key] = new_word
                item = (new_word, new_cfg)
                nxt.append(item)
                elements.append(item)
                if len(elements) > max_elements:
                    raise ResourceLimitExceeded(
                        f"orbit exceeded {max_elements} elements; raise max_elements or lower depth")
        frontier = nxt
    return Orbit(seed, group, depth, elements, collisions, stab)


# --- curvature data ----------------------------------------------------------

def scalar_step(letter: GenSymbol, b: Sequence, n: int) -> list:
    """Curvature vector after one generator, from the scalar recurrences.

    Apollonian: ``b_j <- (2/(n-1)) sum_{i != j} b_i - b_j``.
    Dual: ``b_i <- b_i + 2 b_j`` for ``i != j`` and ``b_j <- -b_j``.
    """
    j = letter.index - 1
    out = list(b)
    if letter.kind == APOLLONIAN:
        others = sum(x for i, x in enumerate(b) if i != j)
        out[j] = Fraction(2, n - 1) * others - b[j]
    else:
        out = [x + 2 * b[j] if i != j else -x for i, x in enumerate(b)]
    return out


def oracle_curvature_vectors(seed_b: Sequence, words: Sequence[Word], n: int) -> list:
    """Curvature vector of ``M(word) . seed`` for each word, scalars only."""
    res = []
    for w in words:
        b = [Fraction(x) for x in seed_b]
        for letter in reversed(w.letters):
            b = scalar_step(letter, b, n)
        res.append(tuple(b))
    return res


def distinct_sphere_rows(o: Orbit, oriented: bool = True) -> list:
    """``(key, config_index, row_index)`` for each distinct sphere in the orbit.

    With ``oriented=False`` a sphere and its reversal count once.
    """
    seen = {}
    for ci, (_, cfg) in enumerate(o.elements):
        if cfg.exact:
            rows = [cfg.W.row(i) for i in range(cfg.n + 2)]
        else:
            rows = [tuple(np.round(r / 1e-9).astype(np.int64).tolist()) for r in cfg.W]
        for ri, r in enumerate(rows):
            key = tuple(r)
            if not oriented:
                neg = tuple(-x for x in key)
                key = min(key, neg)
            if key not in seen:
                seen[key] = (ci, ri)
    return [(k, ci, ri) for k, (ci, ri) in seen.items()]


def curvature_spectrum(o: Orbit) -> list:
    """Sorted curvatures of the distinct oriented spheres of the orbit."""
    out = []
    for _, ci, ri in distinct_sphere_rows(o):
        out.append(o.elements[ci][1].curvatures()[ri])
    return sorted(out)


def expected_s_primes(n: int) -> frozenset:
    """Primes of n-1 for even n, of (n-1)/2 for odd n."""
    return frozenset(prime_factors(n - 1 if n % 2 == 0 else (n - 1) // 2))


def s_integrality_report(o: Orbit) -> frozenset:
    """Primes occurring in the denominators of the orbit's curvatures."""
    if not o.curvatures_exact:
        raise RepresentationError("S-integrality needs exact curvatures; this orbit is float")
    ps = set()
    for _, cfg in o.elements:
        for c in cfg.curvatures():
            ps |= prime_factors(Fraction(c).denominator)
    return frozenset(ps)


# --- packing -----------------------------------------------------------------

_CLASS_NAMES = ("coincident", "tangent", "disjoint", "crossing")


@dataclass
class PackingReport:
    counts: dict
    pairs: int
    ambiguous: int
    rechecked: int
    unchecked: int
    crossing_examples: list = field(default_factory=list)

    @property
    def crossing(self) -> int:
        return self.counts["crossing"]

    def to_json(self) -> dict:
        return {"counts": dict(self.counts), "pairs": self.pairs, "ambiguous": self.ambiguous,
                "rechecked": self.rechecked, "unchecked": self.unchecked,
                "crossing_examples": [list(p) for p in self.crossing_examples]}


def check_packing(o: Orbit, eps: float = 1e-9, use_numba: Optional[bool] = None,
                  max_examples: int = 10) -> PackingReport:
    """Classify every pair of spheres taken from different configurations.

    The float kernel does the bulk; for exact orbits the pairs near the
    tangency boundary are decided again in exact arithmetic.
    """
    m = o.n + 2
    rows = np.concatenate([cfg.to_numpy() for _, cfg in o.elements]) if o.elements else np.zeros((0, m))
    groups = np.repeat(np.arange(len(o.elements)), m)
    counts, amb, n_amb = kernels.classify_pairs(rows, groups, eps=eps, use_numba=use_numba)
    counts = [int(c) for c in counts]
    rechecked = 0
    if o.exact and len(amb):
        for i, j, cls in amb:
            ci, ri = divmod(int(i), m)
            cj, rj = divmod(int(j), m)
            wi = o.elements[ci][1].W.row(ri)
            wj = o.elements[cj][1].W.row(rj)
            exact_cls = _CLASS_NAMES.index(classify_pair(wi, wj))
            counts[int(cls)] -= 1
            counts[exact_cls] += 1
            rechecked += 1
    unchecked = n_amb - rechecked if o.exact else 0
    total = len(rows)
    pairs = total * (total - 1) // 2 - len(o.elements) * m * (m - 1) // 2
    examples = []
    if counts[kernels.CROSSING] and max_examples:
        examples = _crossing_examples(o, rows, m, eps, max_examples)
    return PackingReport(dict(zip(_CLASS_NAMES, counts)), pairs, int(n_amb), rechecked,
                         unchecked, examples)


def _crossing_examples(o, rows, m, eps, limit):
    out = []
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            if a // m == b // m:
                continue
            if classify_pair(tuple(rows[a]), tuple(rows[b]), eps) == "crossing":
                ca, ra = divmod(a, m)
                cb, rb = divmod(b, m)
                out.append((str(o.elements[ca][0]), ra + 1, str(o.elements[cb][0]), rb + 1))
                if len(out) >= limit:
                    return out
    return out


def geometric_dedup(o: Orbit) -> list:
    """Distinct configurations ignoring sphere order and orientation.

    Returns one ``(word, config)`` per class, first occurrence kept.
    """
    seen = set()
    out = []
    for word, cfg in o.elements:
        if cfg.exact:
            rows = [cfg.W.row(i) for i in range(cfg.n + 2)]
        else:
            rows = [tuple(np.round(r / 1e-9).astype(np.int64).tolist()) for r in cfg.W]
        key = frozenset(min(tuple(r), tuple(-x for x in r)) for r in rows)
        if key in seen:
            continue
        seen.add(key)
        out.append((word, cfg))
    return out


# --- serialization -----------------------------------------------------------

def orbit_to_json(o: Orbit) -> dict:
    return {
        "n": o.n,
        "group": o.group,
        "depth": o.depth,
        "representation": o.seed.representation,
        "collisions": o.collisions,
        "stabilizer_collisions": o.stabilizer_collisions,
        "seed": o.seed.to_json(),
        "elements": [{"word": str(w), "config": c.to_json()} for w, c in o.elements],
    }


def orbit_from_json(d: dict, check: bool = True) -> Orbit:
    n = int(d["n"])
    seed = DescartesConfig.from_json(d["seed"], check=check)
    elements = [(Word.parse(e["word"], n), DescartesConfig.from_json(e["config"], check=check))
                for e in d["elements"]]
    return Orbit(seed, d.get("group", "apollonian"), int(d.get("depth", 0)), elements,
                 int(d.get("collisions", 0)), int(d.get("stabilizer_collisions", 0)))


def spectrum_to_csv(spectrum: Sequence) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curvature", "multiplicity"])
    counts = Counter(spectrum)
    for c in sorted(counts):
        w.writerow([str(c) if isinstance(c, Fraction) else format(float(c), ".17g"), counts[c]])
    return buf.getvalue()
