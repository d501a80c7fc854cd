"""Compare the numba and numpy kernels on a real orbit.

    python3 benchmarks/bench_kernels.py --n 3 --depth 3 --repeat 5

The numba timings exclude the first (compiling) call. Both paths must
agree on every count; the script exits nonzero if they do not.
"""

import argparse
import sys
import time

import numpy as np

from apollokit import kernels
from apollokit._accel import HAVE_NUMBA
from apollokit.configs import seed_polystrip
from apollokit.ensembles import generate_orbit
from apollokit.forms import descartes_form, wilker_form


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--group", default="apollonian")
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    orbit = generate_orbit(seed_polystrip(args.n), args.group, args.depth)
    m = args.n + 2
    rows = np.concatenate([c.to_numpy() for _, c in orbit.elements])
    groups = np.repeat(np.arange(len(orbit.elements)), m)
    ws = np.stack([c.to_numpy() for _, c in orbit.elements])
    qd = descartes_form(args.n).matrix.to_numpy()
    qw = wilker_form(args.n).matrix.to_numpy()
    print(f"n={args.n} group={args.group} depth={args.depth}: "
          f"{len(orbit)} configurations, {len(rows)} sphere rows")

    cases = [("classify_pairs", lambda u: kernels.classify_pairs(rows, groups, use_numba=u)),
             ("identity_residuals", lambda u: kernels.identity_residuals(ws, qd, qw, use_numba=u))]
    ok = True
    for name, fn in cases:
        t_np, out_np = best_of(lambda: fn(False), args.repeat)
        line = f"{name:20s} numpy {t_np * 1e3:9.2f} ms"
        if HAVE_NUMBA:
            fn(True)  # compile
            t_nb, out_nb = best_of(lambda: fn(True), args.repeat)
            line += f"   numba {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:6.1f}x"
            a = out_np[0] if isinstance(out_np, tuple) else out_np
            b = out_nb[0] if isinstance(out_nb, tuple) else out_nb
            if not np.allclose(a, b, atol=1e-9):
                ok = False
                line += "   MISMATCH"
        else:
            line += "   numba unavailable"
        print(line)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
