"""Error norms, reference solutions, convergence studies and file output.

The error measure is the absolute discrete L2 error over all constituents
and all recorded times except the initial one,

    E = sqrt( 1/N sum_{n=1..N} 1/I sum_i (y_i(t_n) - y_i^n)^2 ).

References come from the analytic solution whenever the problem has one and
otherwise from a fine-step classical fourth-order one-step method whose
accuracy is certified by a Richardson check; an unconverged reference is a
hard error, never a silent fallback.
"""

import csv
import json
import time as _time
from dataclasses import dataclass

import numpy as np

from .explicit import (
    StepperConfig,
    geometric_schedule,
    integrate,
    mass_matrix_condition,
    uniform_schedule,
)
from .odes import DivergenceError, ODESystem, Trajectory
from . import sd1d

__all__ = [
    "ConvergenceRow",
    "ReferenceAccuracyError",
    "discrete_l2_error",
    "rk4_solve",
    "reference_solution",
    "convergence_study",
    "pde_convergence_study",
    "burgers_reference",
    "rows_to_csv",
    "rows_from_csv",
    "trajectory_to_csv",
    "write_run_metadata",
    "run_manifest",
]


class ReferenceAccuracyError(RuntimeError):
    """The self-consistency (Richardson) check of a reference run failed."""


@dataclass(frozen=True)
class ConvergenceRow:
    """One resolution of a convergence study; ``rate`` is None on the first."""

    resolution: float  # dt for ODE studies, dx for PDE studies
    error: float
    rate: float | None
    method: str
    family: str
    order: int
    iterations: int


def discrete_l2_error(traj, ref):
    """Discrete L2 error of a trajectory against a reference.

    ``ref`` is either a callable t -> state (evaluated on the trajectory's
    own time grid) or a second :class:`Trajectory`, whose times must match.
    """
    if isinstance(ref, Trajectory):
        if len(ref) != len(traj) or not np.allclose(ref.times, traj.times, rtol=0, atol=1e-12):
            raise ValueError("reference trajectory recorded on a different time grid")
        ref_states = ref.states
    else:
        ref_states = np.vstack([np.atleast_1d(ref(t)) for t in traj.times])
    diff = traj.states[1:] - ref_states[1:]  # initial point excluded
    if diff.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.mean(diff**2, axis=1))))


def _rk4_march(sys, y, t, t_next, h):
    n_sub = max(1, int(np.ceil((t_next - t) / h)))
    hh = (t_next - t) / n_sub
    for _ in range(n_sub):
        k1 = sys.rhs(t, y)
        k2 = sys.rhs(t + 0.5 * hh, y + 0.5 * hh * k1)
        k3 = sys.rhs(t + 0.5 * hh, y + 0.5 * hh * k2)
        k4 = sys.rhs(t + hh, y + hh * k3)
        y = y + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += hh
    return y


def rk4_solve(sys, times, y0=None, h=None):
    """Classical fourth-order one-step solve sampled at the given times."""
    times = np.asarray(times, dtype=float)
    y = np.atleast_1d(np.asarray(sys.y0 if y0 is None else y0, dtype=float))
    if h is None:
        h = np.min(np.diff(times)) / 200.0 if len(times) > 1 else 1.0
    states = [y.copy()]
    for i in range(len(times) - 1):
        y = _rk4_march(sys, y, times[i], times[i + 1], h)
        states.append(y.copy())
    return Trajectory(times=times.copy(), states=np.vstack(states))


def reference_solution(sys, times, substep_ratio=200.0):
    """Reference trajectory at the requested times.

    Uses the analytic solution when present.  Otherwise integrates with the
    classical fourth-order method at a substep 1/substep_ratio of the
    smallest requested gap, and verifies by halving the substep that the
    endpoint moves by less than 1e-11 relative; a larger change raises
    :class:`ReferenceAccuracyError`.
    """
    times = np.asarray(times, dtype=float)
    if sys.analytic is not None:
        states = np.vstack([np.atleast_1d(sys.analytic(t)) for t in times])
        return Trajectory(times=times.copy(), states=states)
    if len(times) < 2:
        return Trajectory(times=times.copy(), states=np.tile(sys.y0, (len(times), 1)))
    h = float(np.min(np.diff(times))) / substep_ratio
    coarse = rk4_solve(sys, times, h=h)
    fine_end = _rk4_march(sys, np.asarray(sys.y0, dtype=float), times[0], times[-1], h / 2.0)
    scale = max(1.0, float(np.max(np.abs(fine_end))))
    drift = float(np.max(np.abs(coarse.states[-1] - fine_end))) / scale
    if drift > 1e-11:
        raise ReferenceAccuracyError(
            f"reference for {sys.name!r} not converged: Richardson drift {drift:.3e} > 1e-11"
        )
    return coarse


def convergence_study(sys, cfg, dts, t0=0.0, t_end=None):
    """Run the configured stepper over a dt sweep and tabulate errors/rates.

    Diverged runs are recorded with an infinite error and no rate.
    """
    if t_end is None:
        t_end = t0 + 0.1
    dts = sorted((float(d) for d in dts), reverse=True)
    rows = []
    prev = None
    for dt in dts:
        try:
            traj = integrate(sys, t0, t_end, uniform_schedule(dt), cfg)
            ref = reference_solution(sys, traj.times)
            err = discrete_l2_error(traj, ref)
        except DivergenceError:
            err = np.inf
        rate = None
        if prev is not None and np.isfinite(err) and np.isfinite(prev[1]) and err > 0:
            rate = float(np.log(prev[1] / err) / np.log(prev[0] / dt))
        rows.append(
            ConvergenceRow(
                resolution=dt,
                error=float(err),
                rate=rate,
                method=cfg.method,
                family=cfg.family,
                order=cfg.order,
                iterations=cfg.iterations,
            )
        )
        prev = (dt, err)
    return rows


def _advection_exact(x, t):
    return np.sin(2.0 * np.pi * (x - t))


def burgers_reference(t_end=0.05, num_elements=512, degree=4, courant=0.1):
    """Fine-grid Burgers reference field, integrated with small RK4 steps.

    Returns (grid, values); interpolate with :func:`sd1d.sample_state`.
    """
    grid = sd1d.make_sd_grid(num_elements, degree)
    flux = sd1d.burgers_flux("godunov")
    u = np.tanh(10.0 * grid.x - 5.0)
    t = 0.0
    while t < t_end - 1e-14:
        vmax = max(float(np.max(np.abs(u))), 1e-12)
        dt = min(sd1d.cfl_timestep(courant, grid.dx, vmax, degree), t_end - t)
        k1 = -sd1d.sd_spatial_derivative(grid, u, flux)
        k2 = -sd1d.sd_spatial_derivative(grid, u + 0.5 * dt * k1, flux)
        k3 = -sd1d.sd_spatial_derivative(grid, u + 0.5 * dt * k2, flux)
        k4 = -sd1d.sd_spatial_derivative(grid, u + dt * k3, flux)
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    return grid, u


def pde_convergence_study(problem, method, order, element_counts, courant=0.5,
                          t_end=None, reference=None):
    """Space-time refinement study for the SD front end.

    ``problem`` is "advection" (exact solution) or "burgers" (fine-grid
    reference, computed once and reused when passed in).  The error is the
    RMS over all solution points at the final time.
    """
    problem = str(problem).lower()
    if problem == "advection":
        t_end = 1.0 if t_end is None else t_end
        flux = sd1d.advection_flux(1.0)
    elif problem == "burgers":
        t_end = 0.05 if t_end is None else t_end
        flux = sd1d.burgers_flux("godunov")
        if reference is None:
            reference = burgers_reference(t_end=t_end)
    else:
        raise ValueError(f"unknown PDE problem {problem!r}; expected advection or burgers")

    rows = []
    prev = None
    for P in element_counts:
        grid = sd1d.make_sd_grid(int(P), order - 1)
        if problem == "advection":
            u0 = np.sin(2.0 * np.pi * grid.x)
        else:
            u0 = np.tanh(10.0 * grid.x - 5.0)
        try:
            state = sd1d.integrate_sd(
                grid, u0, t_end, method=method, order=order, flux=flux, courant=courant
            )
            if problem == "advection":
                exact = _advection_exact(grid.x, t_end)
            else:
                ref_grid, ref_vals = reference
                exact = sd1d.sample_state(ref_grid, ref_vals, grid.x)
            err = float(np.sqrt(np.mean((state.values - exact) ** 2)))
        except DivergenceError:
            err = np.inf
        dx = 1.0 / int(P)
        rate = None
        if prev is not None and np.isfinite(err) and np.isfinite(prev[1]) and err > 0:
            rate = float(np.log(prev[1] / err) / np.log(prev[0] / dx))
        rows.append(
            ConvergenceRow(
                resolution=dx,
                error=err,
                rate=rate,
                method=method,
                family="gauss_legendre" if method == "ader" else "gauss_lobatto",
                order=order,
                iterations=order,
            )
        )
        prev = (dx, err)
    return rows


def fitted_rate(rows):
    """Least-squares slope of log(error) against log(resolution)."""
    pts = [(r.resolution, r.error) for r in rows if np.isfinite(r.error) and r.error > 0]
    if len(pts) < 2:
        return np.nan
    xs = np.log([p[0] for p in pts])
    ys = np.log([p[1] for p in pts])
    return float(np.polyfit(xs, ys, 1)[0])


# ---------------------------------------------------------------------------
# file formats: CSV for tabular data, JSON for run metadata

def _fmt(value):
    return f"{value:.17g}"


def rows_to_csv(rows, path):
    """Convergence table as CSV (dt_or_dx, error, rate), 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dt_or_dx", "error", "rate"])
        for r in rows:
            writer.writerow([_fmt(r.resolution), _fmt(r.error), "" if r.rate is None else _fmt(r.rate)])


def rows_from_csv(path):
    """Parse a convergence CSV back into (resolution, error, rate) tuples."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for rec in reader:
            out.append((float(rec[0]), float(rec[1]), None if rec[2] == "" else float(rec[2])))
    return out


def trajectory_to_csv(traj, path):
    """Trajectory as CSV (t, y_1..y_I), 17 significant digits."""
    dim = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"y_{i + 1}" for i in range(dim)])
        for t, y in zip(traj.times, traj.states):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in y])


def trajectory_from_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        recs = [[float(v) for v in rec] for rec in reader]
    arr = np.asarray(recs)
    return Trajectory(times=arr[:, 0], states=arr[:, 1:])


def write_run_metadata(path, config, wall_time=None, extras=None):
    """JSON sidecar with the configuration echo and diagnostics."""
    meta = {"config": config}
    if wall_time is not None:
        meta["wall_time_s"] = wall_time
    if isinstance(config, dict) and {"family", "order"} <= set(config):
        meta["mass_matrix_condition"] = mass_matrix_condition(
            config["family"], int(config["order"])
        )
    if extras:
        meta.update(extras)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")


def run_manifest(path, only=None):
    """Execute the CLI invocations listed in a JSON experiment manifest.

    The manifest is a list of entries {"id": ..., "argv": [...]}; ``only``
    restricts execution to the entries whose id it contains.  Returns the
    list of (id, exit_code) pairs.
    """
    from .cli import run_cli

    with open(path) as fh:
        entries = json.load(fh)
    results = []
    for entry in entries:
        if only is not None and entry["id"] not in only:
            continue
        start = _time.perf_counter()
        code = run_cli([str(a) for a in entry["argv"]])
        results.append((entry["id"], code, _time.perf_counter() - start))
    return results
