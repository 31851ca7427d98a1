"""1D periodic spectral-difference discretization with ADER/DeC time marching.

The solution lives at N+1 Gauss-Legendre points per element; fluxes live at
N+2 points consisting of both element faces plus N interior Gauss-Legendre
points.  The spatial derivative interpolates the solution to the flux points,
replaces the face values by a single-valued Riemann flux shared with the
neighbor, differentiates the flux-point interpolant back at the solution
points and scales by the element width.

Time marching reuses the slab machinery of the ODE steppers, applied to the
semi-discrete operator du/dt = -d/dx f(u); every time slice of the predictor
involves the face Riemann solves, and the final ADER update integrates the
flux derivative of the predicted states with the slab quadrature (the more
robust of the two update forms for nonlinear fluxes).
"""

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import lu_factor, lu_solve
from .nodes import cached_node_set, lagrange_basis, theta_table
from .odes import DIVERGENCE_LIMIT, DivergenceError
from .explicit import ader_mass_matrix

__all__ = [
    "SDGrid",
    "SDState",
    "Flux",
    "advection_flux",
    "burgers_flux",
    "make_sd_grid",
    "sd_spatial_derivative",
    "cfl_timestep",
    "ader_sd_step",
    "dec_sd_step",
    "total_integral",
    "integrate_sd",
    "state_to_csv",
    "sample_state",
]


@dataclass(frozen=True)
class SDGrid:
    """Periodic mesh of P elements on [0,1] with degree-N elements."""

    num_elements: int
    degree: int
    solution_points: np.ndarray  # (N+1,) reference coordinates
    flux_points: np.ndarray      # (N+2,) reference coordinates, faces included
    interp_to_flux: np.ndarray   # (N+2, N+1)
    deriv_at_solution: np.ndarray  # (N+1, N+2)
    solution_weights: np.ndarray   # quadrature weights at solution points

    @property
    def dx(self):
        return 1.0 / self.num_elements

    @property
    def x(self):
        """Physical coordinates of all solution points, shape (P, N+1)."""
        return (np.arange(self.num_elements)[:, None] + self.solution_points[None, :]) * self.dx


@dataclass
class SDState:
    """u at the solution points, shape (P, N+1), plus the current time."""

    values: np.ndarray
    time: float = 0.0


@dataclass(frozen=True)
class Flux:
    """Physical flux, wave speed and the interface Riemann solver."""

    name: str
    f: callable
    wavespeed: callable
    riemann: callable  # (u_minus, u_plus) -> interface flux


def advection_flux(speed=1.0):
    """Linear flux f(u) = speed * u with the exact upwind interface flux."""
    speed = float(speed)

    def riemann(um, up):
        return speed * (um if speed >= 0.0 else up)

    return Flux(
        name=f"advection(speed={speed:g})",
        f=lambda u: speed * u,
        wavespeed=lambda u: np.full_like(u, speed),
        riemann=riemann,
    )


def burgers_flux(riemann="godunov"):
    """Burgers flux f(u) = u^2/2.

    ``riemann`` selects the interface solver: the exact (Godunov) solver,
    which keeps stationary antisymmetric jumps exact, or local Lax-Friedrichs
    with its extra dissipation.
    """

    def f(u):
        return 0.5 * u * u

    def godunov(um, up):
        s = 0.5 * (um + up)
        shock = np.where(s > 0.0, f(um), f(up))
        rare = np.where(um > 0.0, f(um), np.where(up < 0.0, f(up), 0.0))
        return np.where(um > up, shock, rare)

    def llf(um, up):
        a = np.maximum(np.abs(um), np.abs(up))
        return 0.5 * (f(um) + f(up)) - 0.5 * a * (up - um)

    solvers = {"godunov": godunov, "llf": llf}
    try:
        solver = solvers[riemann]
    except KeyError:
        raise ValueError(f"unknown Riemann solver {riemann!r}; expected godunov or llf") from None
    return Flux(name=f"burgers({riemann})", f=f, wavespeed=lambda u: u, riemann=solver)


def make_sd_grid(num_elements, degree):
    """Build an :class:`SDGrid` with GL solution points and face-including
    flux points."""
    P = int(num_elements)
    N = int(degree)
    if P < 2:
        raise ValueError("need at least 2 elements")
    if N < 0:
        raise ValueError("degree must be >= 0")
    sol = cached_node_set("gauss_legendre", N + 1)
    inner = cached_node_set("gauss_legendre", N).nodes if N >= 1 else np.empty(0)
    flux_points = np.concatenate(([0.0], inner, [1.0]))

    # interpolation matrix: value of each solution basis at each flux point
    interp = sol.basis_values(flux_points).T  # (N+2, N+1)

    # derivative of each flux basis at each solution point; the flux-point
    # layout (faces + interior GL) is not a standard family, so use the raw
    # Lagrange evaluator
    deriv = lagrange_basis(flux_points).derivs(sol.nodes).T  # (N+1, N+2)

    return SDGrid(
        num_elements=P,
        degree=N,
        solution_points=sol.nodes,
        flux_points=flux_points,
        interp_to_flux=interp,
        deriv_at_solution=deriv,
        solution_weights=sol.weights,
    )


def sd_spatial_derivative(grid, values, flux):
    """d/dx f(u) at all solution points for the periodic mesh.

    Raises :class:`DivergenceError` on non-finite input.
    """
    u = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DivergenceError("non-finite state passed to spatial derivative")
    uf = u @ grid.interp_to_flux.T  # (P, N+2) solution at flux points
    # interface i sits between element i-1 (its right face) and element i
    u_minus = np.roll(uf[:, -1], 1)
    u_plus = uf[:, 0]
    fhat_left = flux.riemann(u_minus, u_plus)
    fhat_right = np.roll(fhat_left, -1)
    F = flux.f(uf)
    F[:, 0] = fhat_left
    F[:, -1] = fhat_right
    return (F @ grid.deriv_at_solution.T) / grid.dx


def cfl_timestep(courant, dx, vmax, degree):
    """dt = C / (M+1) * dx / |vmax| with M the spatial polynomial degree."""
    if vmax == 0.0:
        raise ValueError("vmax must be nonzero")
    return courant / (degree + 1) * dx / abs(vmax)


@lru_cache(maxsize=None)
def _time_tables(family, count):
    ns = cached_node_set(family, count)
    tt = theta_table(ns)
    mass = ader_mass_matrix(ns)
    return ns, tt, mass, lu_factor(mass), ns.basis_values(0.0), ns.basis_values(1.0)


def _derivatives(grid, slab, flux):
    return np.array([sd_spatial_derivative(grid, s, flux) for s in slab])


def _check(values, t):
    if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > DIVERGENCE_LIMIT:
        raise DivergenceError("spectral-difference state diverged", time=t)


def ader_sd_step(grid, state, dt, time_nodes, iterations, flux, update="quadrature"):
    """One ADER time slab of the semi-discrete conservation law.

    The predictor runs the usual mass-matrix fixed point on the slab states
    (each iteration evaluating the spatial derivative, Riemann solves
    included, at every time slice).  ``update`` selects the final value:
    ``"quadrature"`` integrates the flux derivative of the predicted states
    over the slab, ``"reconstruction"`` evaluates the time polynomial at the
    slab end; the quadrature form is the default as the more stable choice
    for nonlinear fluxes.
    """
    ns, tt, mass, mass_lu, phi0, phi1 = _time_tables(time_nodes.family, time_nodes.count)
    u = np.asarray(state.values, dtype=float)
    slab = np.repeat(u[None, :, :], ns.count, axis=0)
    shape = slab.shape
    for k in range(iterations):
        D = _derivatives(grid, slab, flux)
        r = phi0[:, None, None] * u[None, :, :] - dt * ns.weights[:, None, None] * D
        slab = lu_solve(mass_lu, r.reshape(ns.count, -1)).reshape(shape)
        _check(slab, state.time)
    if update == "quadrature":
        D = _derivatives(grid, slab, flux)
        out = u - dt * np.einsum("s,sij->ij", ns.weights, D)
    elif update == "reconstruction":
        out = slab[-1] if ns.endpoint_included else np.einsum("s,sij->ij", phi1, slab)
    else:
        raise ValueError(f"unknown update form {update!r}")
    _check(out, state.time + dt)
    return SDState(values=out, time=state.time + dt)


def dec_sd_step(grid, state, dt, time_nodes, iterations, flux):
    """One DeC time slab: K sweeps of the theta-weighted correction.

    For endpoint-including node families the final value is the last subnode
    state of the last sweep; Gauss-Legendre nodes close the slab with the
    full-slab integral of the last iterate (matching the ADER quadrature
    update, with which it coincides on linear fluxes).
    """
    ns, tt, *_ = _time_tables(time_nodes.family, time_nodes.count)
    u = np.asarray(state.values, dtype=float)
    slab = np.repeat(u[None, :, :], ns.count, axis=0)
    for k in range(iterations):
        D = _derivatives(grid, slab, flux)
        slab = u[None, :, :] - dt * np.einsum("mr,rij->mij", tt.theta, D)
        _check(slab, state.time)
    if ns.endpoint_included:
        out = slab[-1]
    else:
        D = _derivatives(grid, slab, flux)
        out = u - dt * np.einsum("r,rij->ij", tt.theta_end, D)
    _check(out, state.time + dt)
    return SDState(values=out, time=state.time + dt)


def total_integral(grid, values):
    """Integral of u over the periodic domain via the per-element quadrature."""
    return float(grid.dx * np.sum(values @ grid.solution_weights))


def integrate_sd(grid, u0, t_end, method="ader", order=None, iterations=None,
                 flux=None, courant=0.5, time_family=None, update="quadrature",
                 t0=0.0):
    """March an SD state to ``t_end`` under the CFL step-size rule.

    ``order`` defaults to the spatial order N+1 (matching time and space
    accuracy) and ``iterations`` to ``order``.  ADER defaults to
    Gauss-Legendre time nodes, DeC to Gauss-Lobatto.
    """
    if flux is None:
        flux = advection_flux(1.0)
    order = grid.degree + 1 if order is None else int(order)
    iterations = order if iterations is None else int(iterations)
    if time_family is None:
        time_family = "gauss_legendre" if method == "ader" else "gauss_lobatto"
    time_nodes = cached_node_set(time_family, order)
    state = SDState(values=np.asarray(u0, dtype=float).copy(), time=t0)
    while state.time < t_end - 1e-14:
        vmax = float(np.max(np.abs(flux.wavespeed(state.values))))
        dt = cfl_timestep(courant, grid.dx, max(vmax, 1e-12), grid.degree)
        dt = min(dt, t_end - state.time)
        if method == "ader":
            state = ader_sd_step(grid, state, dt, time_nodes, iterations, flux, update=update)
        elif method == "dec":
            state = dec_sd_step(grid, state, dt, time_nodes, iterations, flux)
        else:
            raise ValueError(f"unknown SD method {method!r}; expected ader or dec")
    state.time = t_end
    return state


def sample_state(grid, values, x):
    """Evaluate the piecewise solution polynomial at arbitrary points in [0,1)."""
    x = np.asarray(x, dtype=float)
    elem = np.minimum((x * grid.num_elements).astype(int), grid.num_elements - 1)
    xi = x * grid.num_elements - elem
    basis = np.moveaxis(lagrange_basis(grid.solution_points).values(xi), 0, -1)
    vals = np.asarray(values)[elem]
    return np.sum(vals * basis, axis=-1)


def state_to_csv(grid, state, path):
    """Write rows (x, u) over all solution points with 17 significant digits."""
    xs = grid.x.ravel()
    us = np.asarray(state.values).ravel()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u"])
        for x, u in zip(xs, us):
            writer.writerow([f"{x:.17g}", f"{u:.17g}"])
