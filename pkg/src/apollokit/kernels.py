"""Float hot loops.

Each kernel exists twice: a numba ``@njit`` loop and a vectorized numpy
version. ``classify_pairs`` and ``identity_residuals`` dispatch on
:data:`apollokit._accel.USE_NUMBA`; both variants are importable directly for
benchmarking and cross-checking.

Row layout everywhere is an ACC vector ``(bbar, b, b*x_1, ..., b*x_n)``.
Separation uses the geometric sign: ``0.5*(bbar1*b2 + b1*bbar2) - w1.w2``.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

# class codes used in the returned count vector
COINCIDENT, TANGENT, DISJOINT, CROSSING = 0, 1, 2, 3
# pairs closer than this many tolerances to a class boundary are reported
# so an exact caller can re-decide them
AMBIGUITY_FACTOR = 1e3


@njit
def _classify_pairs_numba(rows, groups, eps, amb_out):
    m, k = rows.shape
    counts = np.zeros(4, dtype=np.int64)
    scale = np.empty(m)
    for i in range(m):
        s = 0.0
        for c in range(k):
            a = abs(rows[i, c])
            if a > s:
                s = a
        scale[i] = s
    n_amb = 0
    cap = amb_out.shape[0]
    for i in range(m):
        gi = groups[i]
        for j in range(i + 1, m):
            if groups[j] == gi:
                continue
            tol = eps * (1.0 + scale[i] * scale[j])
            ctol = eps * (1.0 + max(scale[i], scale[j]))
            dmin = 0.0
            dplus = 0.0
            for c in range(k):
                d1 = abs(rows[i, c] - rows[j, c])
                d2 = abs(rows[i, c] + rows[j, c])
                if d1 > dmin:
                    dmin = d1
                if d2 > dplus:
                    dplus = d2
            if dmin <= ctol or dplus <= ctol:
                counts[0] += 1
                continue
            delta = 0.5 * (rows[i, 0] * rows[j, 1] + rows[i, 1] * rows[j, 0])
            for c in range(2, k):
                delta -= rows[i, c] * rows[j, c]
            a = abs(delta)
            if abs(a - 1.0) <= tol:
                cls = 1
            elif a < 1.0 - tol:
                cls = 3
            else:
                cls = 2
            counts[cls] += 1
            if abs(a - 1.0) <= AMBIGUITY_FACTOR * tol:
                if n_amb < cap:
                    amb_out[n_amb, 0] = i
                    amb_out[n_amb, 1] = j
                    amb_out[n_amb, 2] = cls
                n_amb += 1
    return counts, n_amb


def _classify_pairs_numpy(rows, groups, eps, amb_out, block=256):
    m = rows.shape[0]
    counts = np.zeros(4, dtype=np.int64)
    scale = np.abs(rows).max(axis=1) if m else np.zeros(0)
    cap = amb_out.shape[0]
    n_amb = 0
    for start in range(0, m, block):
        stop = min(start + block, m)
        a_rows = rows[start:stop]
        idx_i = np.arange(start, stop)[:, None]
        idx_j = np.arange(m)[None, :]
        mask = (idx_j > idx_i) & (groups[start:stop, None] != groups[None, :])
        if not mask.any():
            continue
        delta = 0.5 * (np.outer(a_rows[:, 0], rows[:, 1]) + np.outer(a_rows[:, 1], rows[:, 0]))
        delta -= a_rows[:, 2:] @ rows[:, 2:].T
        si = scale[start:stop, None]
        sj = scale[None, :]
        tol = eps * (1.0 + si * sj)
        ctol = eps * (1.0 + np.maximum(si, sj))
        dmin = np.abs(a_rows[:, None, :] - rows[None, :, :]).max(axis=2)
        dplus = np.abs(a_rows[:, None, :] + rows[None, :, :]).max(axis=2)
        coincident = mask & ((dmin <= ctol) | (dplus <= ctol))
        rest = mask & ~coincident
        a = np.abs(delta)
        tangent = rest & (np.abs(a - 1.0) <= tol)
        crossing = rest & ~tangent & (a < 1.0 - tol)
        disjoint = rest & ~tangent & ~crossing
        counts += [coincident.sum(), tangent.sum(), disjoint.sum(), crossing.sum()]
        amb = rest & (np.abs(a - 1.0) <= AMBIGUITY_FACTOR * tol)
        ii, jj = np.nonzero(amb)
        take = min(len(ii), max(cap - n_amb, 0))
        cls = np.where(tangent, TANGENT, np.where(crossing, CROSSING, DISJOINT))
        amb_out[n_amb:n_amb + take, 0] = ii[:take] + start
        amb_out[n_amb:n_amb + take, 1] = jj[:take]
        amb_out[n_amb:n_amb + take, 2] = cls[ii[:take], jj[:take]]
        n_amb += len(ii)
    return counts, n_amb


def classify_pairs(rows, groups, eps=1e-9, max_ambiguous=1 << 16, use_numba=None):
    """Classify every pair of rows that belong to different groups.

    Returns ``(counts, ambiguous, n_ambiguous)``. ``counts`` is indexed by
    COINCIDENT, TANGENT, DISJOINT, CROSSING. ``ambiguous`` holds rows
    ``(i, j, class)`` for pairs whose separation lies near the tangency
    boundary, truncated at ``max_ambiguous``; ``n_ambiguous`` is the
    untruncated total.
    """
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    groups = np.ascontiguousarray(groups, dtype=np.int64)
    amb = np.zeros((max_ambiguous, 3), dtype=np.int64)
    if use_numba is None:
        use_numba = USE_NUMBA
    fn = _classify_pairs_numba if use_numba else _classify_pairs_numpy
    counts, n_amb = fn(rows, groups, float(eps), amb)
    return counts, amb[:min(n_amb, max_ambiguous)], int(n_amb)


@njit
def _identity_residuals_numba(ws, qd, qw):
    k, m, _ = ws.shape
    out = np.zeros(k)
    for t in range(k):
        w = ws[t]
        best = 0.0
        for a in range(m):
            for b in range(m):
                s = 0.0
                for i in range(m):
                    wi = w[i, a]
                    if wi == 0.0:
                        continue
                    for j in range(m):
                        s += wi * qd[i, j] * w[j, b]
                r = abs(s - qw[a, b])
                if r > best:
                    best = r
        out[t] = best
    return out


def _identity_residuals_numpy(ws, qd, qw):
    prod = np.einsum("tia,ij,tjb->tab", ws, qd, ws)
    return np.abs(prod - qw[None]).max(axis=(1, 2))


def identity_residuals(ws, qd, qw, use_numba=None):
    """Max-abs residual of ``W^T qd W - qw`` for a stack of float matrices."""
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    qd = np.ascontiguousarray(qd, dtype=np.float64)
    qw = np.ascontiguousarray(qw, dtype=np.float64)
    if ws.shape[0] == 0:
        return np.zeros(0)
    if use_numba is None:
        use_numba = USE_NUMBA
    fn = _identity_residuals_numba if use_numba else _identity_residuals_numpy
    return fn(ws, qd, qw)
