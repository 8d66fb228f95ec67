"""Command-line front end.

Exit codes: 0 on success, 1 on a domain error (with a one-line diagnostic
naming the offending field), 2 on a usage error. All primary output goes to
stdout unless ``--out`` is given; files are written atomically. Floats are
printed with 6 fixed decimals; pass ``--raw`` for full precision.
"""
from __future__ import annotations

import argparse
import cmath
import sys
from typing import Optional

from . import gdof_analyzer as gdof
from . import isd_channel as isd
from . import region_geometry as rg
from .errors import CapboundError
from .gaussian_engine import (
    GaussianParams,
    closed_form_bounds,
    eval_bounds_at_rho,
    max_over_rho,
    rho_grid_values,
)
from .util import fmt_float, json_dumps, write_text_atomic
from .verification import CHECKS, render_table, run_checks


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            write_text_atomic(out, text)
        except OSError as exc:
            raise CapboundError(f"cannot write output file {out}: {exc}") from exc


def _gaussian_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--s1", type=float, required=True, help="direct-link SNR of pair 1 (linear)")
    sub.add_argument("--s2", type=float, required=True, help="direct-link SNR of pair 2 (linear)")
    sub.add_argument("--i1", type=float, required=True, help="interference gain into receiver 2")
    sub.add_argument("--i2", type=float, required=True, help="interference gain into receiver 1")
    sub.add_argument("--c", type=float, required=True, help="cooperation-link gain (linear)")
    sub.add_argument("--theta1", type=float, default=0.0, help="interference phase 1 [rad]")
    sub.add_argument("--theta2", type=float, default=0.0, help="interference phase 2 [rad]")


def _params_from(args: argparse.Namespace) -> GaussianParams:
    return GaussianParams(args.s1, args.s2, args.i1, args.i2, args.c, args.theta1, args.theta2)


def _cmd_bounds(args: argparse.Namespace) -> int:
    params = _params_from(args)
    bs = closed_form_bounds(params)
    hs = rg.from_bound_set(bs)
    poly = rg.vertices(hs)
    doc = {
        "params": {
            "s1": params.s1, "s2": params.s2, "i1": params.i1,
            "i2": params.i2, "c": params.c,
            "theta1": params.theta1, "theta2": params.theta2,
        },
        "bounds": bs.as_dict(),
        "region": rg.polytope_json_obj(hs, poly),
    }
    _emit(json_dumps(doc, args.raw), args.out)
    return 0


def _cmd_rho_sweep(args: argparse.Namespace) -> int:
    params = _params_from(args)
    if args.eval_rho is not None:
        pieces = args.eval_rho.split(",")
        try:
            mag = float(pieces[0])
            phase = float(pieces[1]) if len(pieces) > 1 else 0.0
        except ValueError:
            raise CapboundError(f"eval-rho: cannot parse {args.eval_rho!r} as MAG[,PHASE]")
        bs = eval_bounds_at_rho(params, mag * cmath.exp(1j * phase))
        doc = {"rho_mag": mag, "rho_phase": phase, "bounds": bs.as_dict()}
        _emit(json_dumps(doc, args.raw), args.out)
        return 0
    bs = max_over_rho(params, args.mag_steps, args.phase_steps)
    doc = {
        "mag_steps": args.mag_steps,
        "phase_steps": args.phase_steps,
        "bounds": bs.as_dict(),
    }
    _emit(json_dumps(doc, args.raw), args.out)
    if args.grid_out is not None:
        rows = rho_grid_values(params, args.mag_steps, args.phase_steps)
        bound_ids = list(rows[0][2])
        lines = ["rho_mag,rho_phase," + ",".join(bound_ids)]
        for mag, phase, values in rows:
            cells = [fmt_float(mag, args.raw), fmt_float(phase, args.raw)]
            cells += [fmt_float(values[bid], args.raw) for bid in bound_ids]
            lines.append(",".join(cells))
        write_text_atomic(args.grid_out, "\n".join(lines) + "\n")
    return 0


def _cmd_gdof(args: argparse.Namespace) -> int:
    p = gdof.GdofParams(args.alpha, args.beta)
    hs = gdof.gdof_region(p)
    poly = rg.vertices(hs)
    rep = gdof.active_constraints(p)
    doc = {
        "alpha": p.alpha,
        "beta": p.beta,
        "label": rep.label.value,
        "classical": gdof.classical_flag(p),
        "active_ids": list(rep.active),
        "touching_ids": list(rep.touching),
        "region": rg.polytope_json_obj(hs, poly),
    }
    _emit(json_dumps(doc, args.raw), args.out)
    return 0


def _cmd_gdof_map(args: argparse.Namespace) -> int:
    if args.steps < 1:
        raise CapboundError(f"steps must be >= 1, got {args.steps}")
    grid = [k / (args.steps + 1) for k in range(1, args.steps + 1)]
    rows = gdof.regime_map(grid, grid)
    _emit(gdof.regime_map_csv(rows, args.raw), args.out)
    if args.summary_out is not None:
        write_text_atomic(args.summary_out, json_dumps(gdof.regime_map_summary(rows), args.raw))
    return 0


def _load_spec(args: argparse.Namespace) -> isd.IsdChannelSpec:
    if (args.spec is None) == (args.ldc is None):
        raise CapboundError("exactly one of --spec or --ldc is required")
    if args.spec is not None:
        spec = isd.load_channel_spec(args.spec)
    else:
        try:
            levels = tuple(int(v) for v in args.ldc.split(","))
            if len(levels) != 3:
                raise ValueError
        except ValueError:
            raise CapboundError(f"ldc: expected ND,NI,NC integers, got {args.ldc!r}")
        spec = isd.ldc_instance(*levels)
    report = isd.validate(spec)
    if not report.ok:
        raise CapboundError(f"invalid channel spec: {report.first}")
    return spec


def _load_inputs(args: argparse.Namespace, spec: isd.IsdChannelSpec):
    if args.inputs == "uniform":
        return isd.uniform_inputs(spec)
    return isd.load_input_dist(args.inputs, spec)


def _cmd_isd_eval(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    dist = _load_inputs(args, spec)
    bs = isd.eval_bounds(spec, dist)
    doc = {
        "feedback_mode": spec.feedback_mode,
        "yf_t1_correlated": isd.yf_t1_correlated(spec),
        "bounds": bs.as_dict(),
    }
    _emit(json_dumps(doc, args.raw), args.out)
    return 0


def _cmd_isd_opt(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    dist, value = isd.maximize_bound(spec, args.bound, args.budget, seed=args.seed)
    doc = {
        "bound": args.bound,
        "value": value,
        "budget": args.budget,
        "seed": args.seed,
        "inputs": [[x1, x2, p] for (x1, x2), p in dist.atoms()],
    }
    _emit(json_dumps(doc, args.raw), args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    names = None
    if args.only is not None:
        names = [n.strip() for n in args.only.split(",") if n.strip()]
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise CapboundError(
                f"unknown check(s) {','.join(unknown)}; available: {','.join(CHECKS)}"
            )
    results = run_checks(names)
    table = render_table(results)
    _emit(table, args.out)
    return 0 if all(r.passed for r in results) else 1


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import write_report

    params = _params_from(args)
    gp = None
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise CapboundError("provide both --alpha and --beta (or neither)")
        gp = gdof.GdofParams(args.alpha, args.beta)
    written = write_report(params, args.out_dir, gp, args.map_steps, args.raw)
    for path in written:
        sys.stdout.write(path + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capbound",
        description="Outer bounds for the interference channel with unilateral source cooperation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="write output to this file (atomic)")
    common.add_argument("--raw", action="store_true", help="full-precision floats")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("bounds", parents=[common],
                        help="Gaussian closed-form bounds and the rate-region polytope")
    _gaussian_args(p)
    p.set_defaults(fn=_cmd_bounds)

    p = subs.add_parser("rho-sweep", parents=[common],
                        help="per-correlation bound values and the maximizing rho")
    _gaussian_args(p)
    p.add_argument("--mag-steps", type=int, default=21, help="grid points for |rho|")
    p.add_argument("--phase-steps", type=int, default=16, help="grid points for the phase")
    p.add_argument("--eval-rho", default=None, metavar="MAG[,PHASE]",
                   help="evaluate a single correlation instead of sweeping")
    p.add_argument("--grid-out", default=None,
                   help="also write the per-rho grid values to this CSV")
    p.set_defaults(fn=_cmd_rho_sweep)

    p = subs.add_parser("gdof", parents=[common],
                        help="symmetric gDoF constraint set and active bounds")
    p.add_argument("--alpha", type=float, required=True, help="interference exponent")
    p.add_argument("--beta", type=float, required=True, help="cooperation exponent")
    p.set_defaults(fn=_cmd_gdof)

    p = subs.add_parser("gdof-map", parents=[common],
                        help="regime classification over an (alpha, beta) grid (CSV)")
    p.add_argument("--steps", type=int, default=99, help="interior grid points per axis")
    p.add_argument("--summary-out", default=None, help="also write a JSON label summary here")
    p.set_defaults(fn=_cmd_gdof_map)

    p = subs.add_parser("isd-eval", parents=[common],
                        help="evaluate all bounds on a finite-alphabet channel spec")
    p.add_argument("--spec", default=None, help="channel spec JSON file")
    p.add_argument("--ldc", default=None, metavar="ND,NI,NC",
                   help="built-in linear deterministic channel levels")
    p.add_argument("--inputs", default="uniform",
                   help="'uniform' or a JSON file with an input distribution")
    p.set_defaults(fn=_cmd_isd_eval)

    p = subs.add_parser("isd-opt", parents=[common],
                        help="maximize one bound over input distributions")
    p.add_argument("--spec", default=None, help="channel spec JSON file")
    p.add_argument("--ldc", default=None, metavar="ND,NI,NC",
                   help="built-in linear deterministic channel levels")
    p.add_argument("--bound", required=True, help="bound id to maximize")
    p.add_argument("--budget", type=int, default=2000, help="bound-evaluation budget")
    p.add_argument("--seed", type=int, default=42, help="restart seed")
    p.set_defaults(fn=_cmd_isd_opt)

    p = subs.add_parser("verify", parents=[common],
                        help="run the verification suite and print a pass/fail table")
    p.add_argument("--only", default=None,
                   help="comma-separated subset of checks to run")
    p.set_defaults(fn=_cmd_verify)

    p = subs.add_parser("report", parents=[common],
                        help="bundle of delimited outputs with rendered figures")
    _gaussian_args(p)
    p.add_argument("--alpha", type=float, default=None, help="also report this gDoF point")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--map-steps", type=int, default=49,
                   help="regime-map grid points per axis (0 disables the map)")
    p.add_argument("--out-dir", required=True, help="directory for the report bundle")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapboundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
