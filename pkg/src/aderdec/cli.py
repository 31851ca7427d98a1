"""Command-line front end: solve | converge | stability | pde-solve.

Emits CSV data files and optional JSON metadata sidecars.  Exit codes:
0 success, 2 usage error, 3 numerical divergence.
"""

import argparse
import sys
import time

import numpy as np

from . import harness, sd1d, stability
from .explicit import StepperConfig, geometric_schedule, integrate, uniform_schedule
from .nodes import FAMILIES, normalize_family
from .odes import PROBLEM_NAMES, DivergenceError, make_problem

USAGE_ERROR = 2
DIVERGENCE_ERROR = 3


def _add_method_args(p, methods=("ader", "dec", "imdec", "imader")):
    p.add_argument("--method", required=True, choices=methods)
    p.add_argument("--order", required=True, type=int)
    p.add_argument("--family", default="lobatto",
                   help=f"node family ({', '.join(FAMILIES)}; aliases accepted)")
    p.add_argument("--k", type=int, default=None, help="iterations (default: order)")


def _csv_ints(text):
    return [int(v) for v in text.split(",") if v]


def _csv_floats(text):
    return [float(v) for v in text.split(",") if v]


def build_parser():
    parser = argparse.ArgumentParser(prog="aderdec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate one ODE problem, write a trajectory CSV")
    p.add_argument("--problem", required=True)
    _add_method_args(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--tend", required=True, type=float)
    p.add_argument("--dt", type=float, help="uniform step size")
    p.add_argument("--schedule", choices=["uniform", "geometric"], default="uniform")
    p.add_argument("--dt0", type=float, help="initial step of the geometric schedule")
    p.add_argument("--factor", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.add_argument("--meta", help="optional JSON metadata path")

    p = sub.add_parser("converge", help="convergence study, write a rate table CSV")
    p.add_argument("--problem", required=True)
    _add_method_args(p)
    p.add_argument("--pde", action="store_true", help="PDE study (advection | burgers)")
    p.add_argument("--dts", help="comma-separated step sizes (ODE studies)")
    p.add_argument("--elements", help="comma-separated element counts (PDE studies)")
    p.add_argument("--courant", type=float, default=0.5)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--tend", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--meta")

    p = sub.add_parser("stability", help="amplification grid, write (re, im, amp) CSV")
    _add_method_args(p)
    p.add_argument("--bounds", default="-6,1,-4,4", help="re_min,re_max,im_min,im_max")
    p.add_argument("--resolution", default="101,101", help="nx,ny")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="optional JSON summary path")

    p = sub.add_parser("pde-solve", help="advance an SD field, write (x, u) CSV")
    p.add_argument("--problem", required=True, choices=["advection", "burgers"])
    _add_method_args(p, methods=("ader", "dec"))
    p.add_argument("--elements", required=True, type=int)
    p.add_argument("--courant", type=float, default=0.5)
    p.add_argument("--tend", required=True, type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--meta")
    return parser


def _config(args):
    return StepperConfig(
        method=args.method,
        family=normalize_family(args.family),
        order=args.order,
        iterations=args.k,
    )


def _cmd_solve(args):
    sys_ = make_problem(args.problem)
    cfg = _config(args)
    if args.schedule == "geometric":
        if args.dt0 is None:
            raise ValueError("--schedule geometric requires --dt0")
        schedule = geometric_schedule(args.dt0, args.factor)
    else:
        if args.dt is None:
            raise ValueError("--schedule uniform requires --dt")
        schedule = uniform_schedule(args.dt)
    start = time.perf_counter()
    traj = integrate(sys_, args.t0, args.tend, schedule, cfg)
    harness.trajectory_to_csv(traj, args.out)
    if args.meta:
        harness.write_run_metadata(
            args.meta,
            {"command": "solve", "problem": args.problem, "method": cfg.method,
             "family": cfg.family, "order": cfg.order, "iterations": cfg.iterations,
             "t0": args.t0, "tend": args.tend, "steps": len(traj) - 1},
            wall_time=time.perf_counter() - start,
        )
    return 0


def _cmd_converge(args):
    cfg = _config(args)
    start = time.perf_counter()
    if args.pde:
        if not args.elements:
            raise ValueError("--pde requires --elements")
        rows = harness.pde_convergence_study(
            args.problem, args.method, args.order, _csv_ints(args.elements),
            courant=args.courant, t_end=args.tend,
        )
    else:
        if not args.dts:
            raise ValueError("ODE studies require --dts")
        sys_ = make_problem(args.problem)
        rows = harness.convergence_study(
            sys_, cfg, _csv_floats(args.dts), t0=args.t0,
            t_end=args.tend if args.tend is not None else args.t0 + 0.1,
        )
    harness.rows_to_csv(rows, args.out)
    if args.meta:
        harness.write_run_metadata(
            args.meta,
            {"command": "converge", "problem": args.problem, "method": cfg.method,
             "family": cfg.family, "order": cfg.order, "iterations": cfg.iterations,
             "pde": bool(args.pde)},
            wall_time=time.perf_counter() - start,
            extras={"fitted_rate": harness.fitted_rate(rows)},
        )
    return 0


def _cmd_stability(args):
    cfg = _config(args)
    bounds = _csv_floats(args.bounds)
    res = _csv_ints(args.resolution)
    if len(bounds) != 4 or len(res) != 2:
        raise ValueError("--bounds needs 4 numbers and --resolution needs 2")
    grid = stability.stability_grid(cfg, bounds=bounds, resolution=res)
    stability.grid_to_csv(grid, args.out)
    if args.summary:
        stability.write_grid_summary(grid, args.summary)
    return 0


def _cmd_pde_solve(args):
    order = args.order
    grid = sd1d.make_sd_grid(args.elements, order - 1)
    if args.problem == "advection":
        u0 = np.sin(2.0 * np.pi * grid.x)
        flux = sd1d.advection_flux(1.0)
    else:
        u0 = np.tanh(10.0 * grid.x - 5.0)
        flux = sd1d.burgers_flux("godunov")
    start = time.perf_counter()
    state = sd1d.integrate_sd(
        grid, u0, args.tend, method=args.method, order=order,
        iterations=args.k if args.k else order, flux=flux, courant=args.courant,
    )
    sd1d.state_to_csv(grid, state, args.out)
    if args.meta:
        harness.write_run_metadata(
            args.meta,
            {"command": "pde-solve", "problem": args.problem, "method": args.method,
             "order": order, "elements": args.elements, "tend": args.tend},
            wall_time=time.perf_counter() - start,
        )
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "converge": _cmd_converge,
    "stability": _cmd_stability,
    "pde-solve": _cmd_pde_solve,
}


def run_cli(argv=None):
    """Parse and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except DivergenceError as err:
        print(f"error: numerical divergence: {err}", file=sys.stderr)
        return DIVERGENCE_ERROR
    except (ValueError, KeyError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR


def main():
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
