"""Command-line interface: ``probframes <command> ...``.

Every command writes one JSON document (or a CSV grid for ``convolve
--heatmap``) to stdout or ``--out``. Diagnostics go to stderr. Exit codes:
0 success, 2 invalid input, 3 mathematical precondition violated,
4 non-convergence.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import convolve, heatmap_grid, mix_with_delta0, product_measure
from .errors import ConvergenceError, InvalidMeasureError, PreconditionError
from .estimation import (
    ROW_KINDS,
    RowSpec,
    bingham_statistic,
    mc_verify_random_frame,
    normalize_rows,
    tyler_iterate,
    tyler_report,
)
from .io import dumps, format_float, measure_to_dict, read_measure, read_points_csv
from .operators import TIGHT_RTOL, analysis_report, canonical_dual, canonical_tight
from .potential import design_report, frame_potential
from .povm import atlas_report, build_povm, parse_cells
from .transport import wasserstein2

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PRECONDITION = 3
EXIT_CONVERGENCE = 4

SEED_ENV = "PROBFRAMES_SEED"
DEFAULT_SEED = 0


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise InvalidMeasureError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _load(args, path):
    return read_measure(path, weight_column=args.weights_column)


def _points(args):
    pts, _ = read_points_csv(args.data)
    return normalize_rows(pts) if args.normalize else pts


def _parse_heatmap(text):
    opts = {"grid": 101, "range": 2.0}
    for part in text.split(","):
        if not part.strip():
            continue
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in opts or not value:
            raise InvalidMeasureError(f"bad --heatmap option {part!r}")
        try:
            opts[key] = int(value) if key == "grid" else float(value)
        except ValueError:
            raise InvalidMeasureError(f"bad --heatmap value {part!r}") from None
    return opts["grid"], opts["range"]


def _heatmap_csv(m, grid, extent):
    xs, ys, dens = heatmap_grid(m, grid, extent)
    lines = ["x,y,density"]
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            lines.append(f"{format_float(x)},{format_float(y)},{format_float(dens[i, j])}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args):
    return analysis_report(_load(args, args.measure), args.tol)


def cmd_dual(args):
    return measure_to_dict(canonical_dual(_load(args, args.measure)))


def cmd_tighten(args):
    return measure_to_dict(canonical_tight(_load(args, args.measure)))


def cmd_potential(args):
    r = frame_potential(_load(args, args.measure))
    return {
        "pfp": r.pfp,
        "m2_fourth_over_n": r.m2_fourth_over_n,
        "nonzero_eigs": r.nonzero_eigs,
        "lower_bound_1_over_n": r.lower_bound_1_over_n,
        "tight_for_span": r.tight_for_span,
    }


def cmd_design_check(args):
    return design_report(_load(args, args.measure), args.tol)


def cmd_distance(args):
    plan = wasserstein2(_load(args, args.a), _load(args, args.b))
    out = {"cost": plan.cost, "distance": plan.distance, "certificate": plan.slackness}
    if args.plan:
        out["plan"] = plan.coupling.tolist()
    return out


def cmd_convolve(args):
    m = convolve(_load(args, args.a), _load(args, args.b))
    if args.heatmap is not None:
        grid, extent = _parse_heatmap(args.heatmap)
        return _heatmap_csv(m, grid, extent)
    return measure_to_dict(m)


def cmd_mix(args):
    return measure_to_dict(mix_with_delta0(_load(args, args.measure), args.eps))


def cmd_product(args):
    return measure_to_dict(product_measure(_load(args, args.a), _load(args, args.b)))


def cmd_tyler(args):
    return tyler_report(tyler_iterate(_points(args), tol=args.tol, max_iter=args.max_iter))


def cmd_bingham(args):
    pts = _points(args)
    return {"bingham": bingham_statistic(pts), "m": pts.shape[0], "n": pts.shape[1]}


def cmd_mc_verify(args):
    gamma = None
    measure = None
    if args.spec == "acg":
        gamma = (np.eye(args.n) if args.gamma is None
                 else np.asarray(json.loads(args.gamma), dtype=float))
    if args.spec == "discrete":
        if args.measure is None:
            raise InvalidMeasureError("--spec discrete needs --measure")
        measure = _load(args, args.measure)
    seed = default_seed() if args.seed is None else args.seed
    r = mc_verify_random_frame(RowSpec(args.spec, gamma, measure), args.m, args.n,
                               args.trials, seed)
    return {"estimate": r.estimate, "std_error": r.std_error, "theory": r.theory,
            "trials": r.trials, "seed": r.seed, "z_score": r.z_score,
            "m": args.m, "n": args.n, "spec": args.spec}


def cmd_povm(args):
    m = _load(args, args.measure)
    cells = parse_cells(args.cells) if args.cells else None
    return atlas_report(build_povm(m, cells))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--weights-column", action="store_true",
                        help="CSV inputs carry the weight in their last column")

    p = argparse.ArgumentParser(prog="probframes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "frame bounds, tightness, moments, rank")
    sp.add_argument("measure")
    sp.add_argument("--tol", type=float, default=TIGHT_RTOL)

    add("dual", cmd_dual, "canonical dual measure").add_argument("measure")
    add("tighten", cmd_tighten, "canonical tight measure").add_argument("measure")
    add("potential", cmd_potential, "frame potential report").add_argument("measure")

    sp = add("design-check", cmd_design_check, "spherical 2-design check")
    sp.add_argument("measure")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("distance", cmd_distance, "exact 2-Wasserstein distance")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--plan", action="store_true", help="include the optimal coupling")

    sp = add("convolve", cmd_convolve, "convolution of two measures")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--heatmap", metavar="grid=K,range=R",
                    help="emit a CSV density grid over [-R, R]^2 instead of the measure")

    sp = add("mix", cmd_mix, "mix a measure with delta_0")
    sp.add_argument("measure")
    sp.add_argument("--eps", type=float, required=True)

    sp = add("product", cmd_product, "product measure")
    sp.add_argument("a")
    sp.add_argument("b")

    sp = add("tyler", cmd_tyler, "Tyler shape estimator on unit-vector data")
    sp.add_argument("data")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--normalize", action="store_true", help="scale rows to unit norm first")

    sp = add("bingham", cmd_bingham, "scatter-matrix deviation from I/N")
    sp.add_argument("data")
    sp.add_argument("--normalize", action="store_true", help="scale rows to unit norm first")

    sp = add("mc-verify", cmd_mc_verify, "Monte Carlo check of the random frame identity")
    sp.add_argument("--spec", choices=ROW_KINDS, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=None,
                    help=f"defaults to ${SEED_ENV} or {DEFAULT_SEED}")
    sp.add_argument("--gamma", help="JSON matrix for --spec acg")
    sp.add_argument("--measure", help="measure file for --spec discrete")

    sp = add("povm", cmd_povm, "POVM of a tight measure over index cells")
    sp.add_argument("measure")
    sp.add_argument("--cells", help='partition such as "0,1|2,3" (default: one cell)')
    return p


def _emit(payload, out):
    text = payload if isinstance(payload, str) else dumps(payload)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
        _emit(payload, args.out)
    except ConvergenceError as exc:
        print(f"probframes: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except PreconditionError as exc:
        print(f"probframes: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InvalidMeasureError, ValueError, OSError) as exc:
        print(f"probframes: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
