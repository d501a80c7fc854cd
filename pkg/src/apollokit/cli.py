"""Command-line interface: ``apollokit <command> [flags]``.

Configurations and orbits travel between commands as JSON on stdin/stdout,
so commands compose with pipes. Domain errors exit with status 1 and print
``{"error": code, "message": ...}`` on stderr; usage errors exit with 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arith, configs, ensembles, groups, moebius, render, spheres
from .configs import DescartesConfig
from .errors import ApollokitError
from .exactq import RationalMatrix, congruence
from .forms import descartes_form, lorentz_form, wilker_form

EXIT_DOMAIN = 1
EXIT_USAGE = 2


class InputError(ApollokitError, ValueError):
    code = "invalid_input"


def _enc(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return x


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, one trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_enc) + "\n"


def _read_json(args) -> dict:
    if getattr(args, "seed_file", None):
        with open(args.seed_file, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    if not text.strip():
        raise InputError("no JSON input (use --seed-file or pipe JSON on stdin)")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from None


def _read_config(args) -> DescartesConfig:
    d = _read_json(args)
    if "W" not in d:
        raise InputError("expected a configuration object with a 'W' field")
    return DescartesConfig.from_json(d)


def _read_orbit(args) -> ensembles.Orbit:
    d = _read_json(args)
    if "elements" not in d:
        raise InputError("expected an orbit object with an 'elements' field")
    return ensembles.orbit_from_json(d)


# --- commands ------------------------------------------------------------------

def cmd_validate(args) -> str:
    d = _read_json(args)
    if "W" not in d:
        raise InputError("expected a configuration object with a 'W' field")
    n = int(d["n"])
    curv = d.get("curvatures_exact")
    curv = tuple(Fraction(c) for c in curv) if curv is not None else None
    rep = d.get("representation")
    W = RationalMatrix.from_json(d["W"]) if rep in (None, "exact") else np.array(d["W"], dtype=float)
    cfg = configs.validate(W, n, curvatures_exact=curv)
    b = cfg.curvatures()
    return dumps({"valid": True, "n": n, "representation": cfg.representation,
                  "orientation": cfg.orientation,
                  "soddy_gossett_residual": configs.soddy_gossett_residual(b, n)})


def cmd_seed(args) -> str:
    if args.kind == "integral":
        if args.n != 2:
            raise InputError("the integral seed exists for n = 2 only")
        cfg = configs.seed_integral_n2()
    else:
        cfg = configs.seed_polystrip(args.n)
    return dumps(cfg.to_json())


def cmd_orbit(args) -> str:
    cfg = _read_config(args)
    o = ensembles.generate_orbit(cfg, args.group, args.depth, args.max_elements)
    return dumps(ensembles.orbit_to_json(o))


def cmd_spectrum(args) -> str:
    o = _read_orbit(args)
    values = ensembles.curvature_spectrum(o)
    if args.format == "csv":
        return ensembles.spectrum_to_csv(values)
    rep = "exact" if o.curvatures_exact else "float"
    out = {"n": o.n, "representation": rep, "spectrum": values}
    if o.curvatures_exact:
        out["primes"] = sorted(ensembles.s_integrality_report(o))
        out["expected_primes"] = sorted(ensembles.expected_s_primes(o.n))
    return dumps(out)


def cmd_packing_check(args) -> str:
    o = _read_orbit(args)
    rep = ensembles.check_packing(o, eps=args.eps)
    out = rep.to_json()
    out.update({"n": o.n, "group": o.group, "representation": o.seed.representation})
    return dumps(out)


def cmd_reduce(args) -> str:
    w = groups.Word.parse(args.word, args.n)
    if args.n == 3 and w.is_apollonian:
        r = groups.reduce_word_n3(w)
        method = "braid"
    else:
        r = groups.free_reduce(w)
        method = "commutation"
    same = groups.word_to_matrix(w) == groups.word_to_matrix(r)
    return dumps({"n": args.n, "input": str(w), "reduced": str(r), "length": len(r),
                  "method": method, "matrix_equal": same, "representation": "exact"})


def cmd_relations(args) -> str:
    rep = groups.verify_relations(args.n, args.max_power)
    out = rep.to_json()
    if args.n >= 3:
        theta, _, err = groups.pair_rotation_check(args.n)
        out["pair_rotation"] = {"theta": theta, "eigen_error": err}
    out["representation"] = "exact"
    return dumps(out)


def cmd_mass_cert(args) -> str:
    w = groups.Word.parse(args.word, 3)
    if args.reduce:
        w = groups.reduce_word_n3(w)
    out = groups.mass_certificate(w).to_json()
    out["representation"] = "exact"
    return dumps(out)


def cmd_equivalence(args) -> str:
    n = args.n
    qd, qw = descartes_form(n), wilker_form(n)
    out = {"n": n, "equivalent": arith.rationally_equivalent(qd, qw),
           "closed_form": arith.super_rational_dimension(n), "representation": "exact"}
    if args.details:
        info = arith.equivalence_details(qd, qw)
        out["details"] = {
            "signatures": [list(s) for s in info["signatures"]],
            "determinants": list(info["determinants"]),
            "det_ratio_square": info["det_ratio_square"],
            "symbols": {str(p): list(v) for p, v in info["symbols"].items()},
            "lorentz_necessary": {"descartes": arith.descartes_lorentz_necessary(n),
                                  "wilker": arith.wilker_lorentz_necessary(n)},
        }
    return dumps(out)


def _parse_list(text: str) -> list:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}: {exc}") from None


def cmd_padic(args) -> str:
    if args.diag is None and args.d is None:
        raise InputError("give --diag or --d")
    if args.d is not None:
        sym = arith.padic_invariant_scalar(args.d, args.p)
        return dumps({"d": args.d, "p": sym.p, "value": sym.value, "representation": "exact"})
    diag = _parse_list(args.diag)
    sym = arith.form_padic_invariant(diag, args.p)
    return dumps({"diag": diag, "p": sym.p, "value": sym.value, "representation": "exact"})


def cmd_intertwiner(args) -> str:
    n = args.n
    q2 = wilker_form(n) if args.target == "wilker" else lorentz_form(n)
    W = arith.find_rational_intertwiner(descartes_form(n), q2, height_bound=args.height,
                                        strategy=args.strategy)
    return dumps({"n": n, "target": args.target, "W": W.to_json(),
                  "verified": congruence(W, descartes_form(n).matrix) == q2.matrix,
                  "representation": "exact"})


def cmd_dualize(args) -> str:
    cfg = _read_config(args)
    dual = spheres.dual_configuration(cfg)
    n = cfg.n
    m = n + 2
    sep = [[float(spheres.separation(dual[i], dual[j])) for j in range(m)] for i in range(m)]
    orth = max(abs(float(spheres.separation(dual[j], s)))
               for j in range(m) for i, s in enumerate(cfg.spheres()) if i != j)
    return dumps({"n": n, "representation": "float",
                  "spheres": [spheres.sphere_to_json(s) for s in dual],
                  "separations": sep, "max_orthogonality_residual": orth})


def cmd_moebius(args) -> str:
    cfg = _read_config(args)
    gens = moebius.parse_generators(args.gens, cfg.n)
    return dumps(moebius.apply_moebius(cfg, gens).to_json())


def cmd_render_svg(args) -> str:
    d = _read_json(args)
    if "elements" in d:
        o = ensembles.orbit_from_json(d)
        rows = ensembles.distinct_sphere_rows(o)
        shapes = [o.elements[ci][1].spheres()[ri] for _, ci, ri in rows]
    elif "W" in d:
        shapes = DescartesConfig.from_json(d).spheres()
    else:
        raise InputError("expected a configuration or an orbit")
    box = None
    if args.viewport:
        try:
            vals = [float(v) for v in args.viewport.split(",")]
        except ValueError:
            raise InputError(f"bad --viewport {args.viewport!r}") from None
        if len(vals) != 4:
            raise InputError("--viewport needs xmin,ymin,xmax,ymax")
        box = tuple(vals)
    sides = (args.xmin, args.ymin, args.xmax, args.ymax)
    if any(v is not None for v in sides):
        # single bounds override the viewport (or the automatic one)
        base = box if box is not None else render.auto_viewport(shapes)
        box = tuple(b if v is None else v for b, v in zip(base, sides))
    if box is not None and not (box[2] > box[0] and box[3] > box[1]):
        raise InputError(f"empty viewport {box}")
    return render.render_svg(shapes, viewport=box, size=args.size)


# --- parser ----------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _dimension(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("dimension n must be >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apollokit",
                                description="Descartes configurations, Apollonian groups and rational forms.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        sp.add_argument("--seed-file", help="read JSON from this file instead of stdin")
        return sp

    s = with_input(sub.add_parser("validate", help="check W^T Q_D W = Q_W for a configuration"))
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("seed", help="emit a seed configuration")
    s.add_argument("--n", type=_dimension, required=True)
    s.add_argument("--kind", choices=["polystrip", "integral"], default="polystrip")
    s.set_defaults(func=cmd_seed)

    s = with_input(sub.add_parser("orbit", help="breadth-first orbit of a configuration"))
    s.add_argument("--group", choices=list(ensembles.GROUPS), default="apollonian")
    s.add_argument("--depth", type=_positive, default=ensembles.DEFAULT_DEPTH)
    s.add_argument("--max-elements", type=_positive, default=ensembles.DEFAULT_MAX_ELEMENTS)
    s.set_defaults(func=cmd_orbit)

    s = with_input(sub.add_parser("spectrum", help="curvatures of the distinct spheres of an orbit"))
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_spectrum)

    s = with_input(sub.add_parser("packing-check", help="count crossing/tangent/disjoint pairs"))
    s.add_argument("--eps", type=float, default=1e-9)
    s.set_defaults(func=cmd_packing_check)

    s = sub.add_parser("reduce", help="reduce a word in the generators")
    s.add_argument("--word", required=True, help='e.g. "s1 s2 s1" or "s1 d2"')
    s.add_argument("--n", type=_dimension, default=3)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("relations", help="certify the group relations for dimension n")
    s.add_argument("--n", type=_dimension, required=True)
    s.add_argument("--max-power", type=_positive, default=50)
    s.set_defaults(func=cmd_relations)

    s = sub.add_parser("mass-cert", help="mass certificate of an n=3 Apollonian word")
    s.add_argument("--word", required=True)
    s.add_argument("--reduce", action="store_true", help="reduce the word first")
    s.set_defaults(func=cmd_mass_cert)

    s = sub.add_parser("equivalence", help="decide rational equivalence of Q_D and Q_W")
    s.add_argument("--n", type=_dimension, required=True)
    s.add_argument("--details", action="store_true")
    s.set_defaults(func=cmd_equivalence)

    s = sub.add_parser("padic", help="p-adic symbol of an integer or a diagonal form")
    s.add_argument("--diag", help='comma-separated diagonal, e.g. "2,2,2,-2"')
    s.add_argument("--d", type=int, help="a single nonzero integer")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_padic)

    s = sub.add_parser("intertwiner", help="exact W with W^T Q_D W = Q_W (or Q_L)")
    s.add_argument("--n", type=_dimension, required=True)
    s.add_argument("--height", type=_positive, default=64)
    s.add_argument("--target", choices=["wilker", "lorentz"], default="wilker")
    s.add_argument("--strategy", choices=["auto", "diagonal", "search"], default="auto")
    s.set_defaults(func=cmd_intertwiner)

    s = with_input(sub.add_parser("dualize", help="the dual sphere system of a configuration"))
    s.set_defaults(func=cmd_dualize)

    s = with_input(sub.add_parser("moebius", help="apply Moebius generators on the right"))
    s.add_argument("--gens", required=True, help='e.g. "t:1/2,0;d:2;j;f"')
    s.set_defaults(func=cmd_moebius)

    s = with_input(sub.add_parser("render-svg", help="draw an n=2 configuration or orbit"))
    s.add_argument("--viewport", help="xmin,ymin,xmax,ymax")
    for side in ("xmin", "ymin", "xmax", "ymax"):
        s.add_argument(f"--{side}", type=float)
    s.add_argument("--size", type=_positive, default=600)
    s.add_argument("--format", choices=["svg"], default="svg")
    s.set_defaults(func=cmd_render_svg)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        text = args.func(args)
    except ApollokitError as exc:
        sys.stderr.write(dumps({"error": exc.code, "message": str(exc)}))
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        sys.stderr.write(dumps({"error": "invalid_input", "message": str(exc)}))
        return EXIT_DOMAIN
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
