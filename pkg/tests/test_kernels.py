import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apollokit import kernels
from apollokit._accel import HAVE_NUMBA
from apollokit.configs import seed_integral_n2, seed_polystrip
from apollokit.ensembles import check_packing, generate_orbit
from apollokit.forms import descartes_form, wilker_form
from apollokit.spheres import classify_pair

ROOT = Path(__file__).resolve().parents[1]
needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
CLASSES = ("coincident", "tangent", "disjoint", "crossing")


def orbit_rows(n, group, depth):
    o = generate_orbit(seed_polystrip(n), group, depth)
    m = n + 2
    rows = np.concatenate([c.to_numpy() for _, c in o.elements])
    groups = np.repeat(np.arange(len(o.elements)), m)
    return o, rows, groups


@needs_numba
@pytest.mark.parametrize("n,group,depth", [(2, "apollonian", 3), (3, "super", 2), (4, "dual", 2)])
def test_classify_parity(n, group, depth):
    _, rows, groups = orbit_rows(n, group, depth)
    a = kernels.classify_pairs(rows, groups, use_numba=True)
    b = kernels.classify_pairs(rows, groups, use_numba=False)
    assert a[0].tolist() == b[0].tolist()
    assert a[2] == b[2]
    key = lambda amb: sorted(map(tuple, amb.tolist()))
    assert key(a[1]) == key(b[1])


def test_classify_matches_scalar_oracle():
    _, rows, groups = orbit_rows(2, "super", 2)
    rows, groups = rows[:40], groups[:40]
    expect = [0, 0, 0, 0]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if groups[i] != groups[j]:
                expect[CLASSES.index(classify_pair(tuple(rows[i]), tuple(rows[j])))] += 1
    counts, _, _ = kernels.classify_pairs(rows, groups, use_numba=False)
    assert counts.tolist() == expect


@needs_numba
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 12))
def test_classify_parity_random(seed, k):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(k * 4, 4))
    groups = np.repeat(np.arange(k), 4)
    a = kernels.classify_pairs(rows, groups, use_numba=True)
    b = kernels.classify_pairs(rows, groups, use_numba=False)
    assert a[0].tolist() == b[0].tolist() and a[2] == b[2]


@pytest.mark.parametrize("use_numba", [False, pytest.param(True, marks=needs_numba)])
def test_identity_residuals(use_numba):
    o = generate_orbit(seed_polystrip(3), depth=2)
    ws = np.stack([c.to_numpy() for _, c in o.elements])
    qd, qw = descartes_form(3).matrix.to_numpy(), wilker_form(3).matrix.to_numpy()
    res = kernels.identity_residuals(ws, qd, qw, use_numba=use_numba)
    assert res.shape == (len(o),)
    assert res.max() < 1e-9
    bad = ws.copy()
    bad[0, 0, 0] += 1.0
    assert kernels.identity_residuals(bad, qd, qw, use_numba=use_numba)[0] > 1e-3


def test_identity_residuals_empty():
    assert kernels.identity_residuals(np.zeros((0, 4, 4)), np.eye(4), np.eye(4)).shape == (0,)


def test_packing_same_with_and_without_numba():
    o = generate_orbit(seed_integral_n2(), depth=3)
    a = check_packing(o, use_numba=False)
    b = check_packing(o, use_numba=HAVE_NUMBA)
    assert a.counts == b.counts and a.crossing == 0


def test_env_flag_disables_numba():
    env = dict(os.environ, APOLLOKIT_DISABLE_NUMBA="1")
    code = ("import json, apollokit._accel as a; "
            "print(json.dumps([a.USE_NUMBA, a.njit(len) is len]))")
    p = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                       check=True)
    assert json.loads(p.stdout) == [False, True]


def test_env_flag_full_run():
    env = dict(os.environ, APOLLOKIT_DISABLE_NUMBA="1")
    p = subprocess.run([sys.executable, "-m", "apollokit", "relations", "--n", "3"], env=env,
                       capture_output=True, text=True, check=True)
    assert json.loads(p.stdout)["ok"] is True


def test_benchmark_smoke():
    p = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"),
                        "--n", "2", "--depth", "2", "--repeat", "1"],
                       capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
