"""Explicit one-slab ADER and DeC steppers plus the multi-slab driver.

Both methods advance one slab [t_n, t_n + dt] by iterating on the vector of
subnode states, starting from the constant guess (every subnode holds y_n):

* ADER solves the weak-in-time collocation system M a = r(a) by Picard
  iteration ``a <- M^{-1} r(a)`` and reconstructs the endpoint with the basis
  values at 1 (which collapses to the last subnode state for families that
  contain the right endpoint).
* DeC sweeps ``a_m <- y_n + dt * sum_r theta[m, r] f(a_r)`` and reads the
  endpoint off the full-slab integral row; the two coincide for families
  containing the endpoint.  For Gauss-Legendre nodes that final integral
  counts as the K-th correction round, which keeps the method at order
  min(M+1, K) with the same iteration cost and the same linear-problem
  polynomial as the other families.

Both iterations gain one order of accuracy per round, capped by the M+1
nodes, hence order min(M+1, K); the default K = p = M+1 delivers order p.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .linalg import LUFactors, condition_1norm, lu_factor, lu_solve
from .nodes import NodeSet, cached_node_set, theta_table
from .odes import DIVERGENCE_LIMIT, DivergenceError, Trajectory

__all__ = [
    "METHODS",
    "StepperConfig",
    "SlabTables",
    "slab_tables",
    "ader_mass_matrix",
    "ader_rhs",
    "ader_step",
    "dec_step",
    "uniform_schedule",
    "geometric_schedule",
    "integrate",
    "step_function",
    "mass_matrix_condition",
]

METHODS = ("ader", "dec", "imdec", "imader")


@dataclass(frozen=True)
class StepperConfig:
    """Selects a method, a node family, the order p (=> p subnodes) and K.

    ``iterations`` defaults to ``order``: as many correction rounds as the
    target order.  The implicit methods additionally require the system to
    carry a stiff split.
    """

    method: str = "dec"
    family: str = "gauss_lobatto"
    order: int = 3
    iterations: int = None

    def __post_init__(self):
        method = str(self.method).strip().lower()
        if method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "method", method)
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.iterations is None:
            object.__setattr__(self, "iterations", self.order)
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    @property
    def k(self):
        return self.iterations

    @property
    def is_implicit(self):
        return self.method in ("imdec", "imader")


@dataclass(frozen=True)
class SlabTables:
    """Per-(family, order) constants shared by all steppers."""

    ns: NodeSet
    theta: np.ndarray
    theta_end: np.ndarray
    beta: np.ndarray
    mass: np.ndarray
    mass_lu: LUFactors
    phi0: np.ndarray  # basis values at 0
    phi1: np.ndarray  # basis values at 1
    endpoint_included: bool


def ader_mass_matrix(ns):
    """Time mass matrix M[m,l] = phi_m(1) phi_l(1) - sum_z w_z phi_m'(t_z) phi_l(t_z).

    Quadrature nodes coincide with the basis nodes, so the matrix only
    depends on the node family and count, never on the step size.
    """
    phi1 = ns.basis_values(1.0)
    mass = np.outer(phi1, phi1)
    vals = ns.basis_values(ns.nodes)  # (basis, node)
    derivs = ns.basis_derivs(ns.nodes)
    for z in range(ns.count):
        mass -= ns.weights[z] * np.outer(derivs[:, z], vals[:, z])
    return mass


@lru_cache(maxsize=None)
def _tables(family, order):
    ns = cached_node_set(family, order)
    tt = theta_table(ns)
    mass = ader_mass_matrix(ns)
    return SlabTables(
        ns=ns,
        theta=tt.theta,
        theta_end=tt.theta_end,
        beta=tt.beta,
        mass=mass,
        mass_lu=lu_factor(mass),
        phi0=ns.basis_values(0.0),
        phi1=ns.basis_values(1.0),
        endpoint_included=ns.endpoint_included,
    )


def slab_tables(cfg):
    """Cached :class:`SlabTables` for a stepper configuration."""
    from .nodes import normalize_family

    return _tables(normalize_family(cfg.family), cfg.order)


def mass_matrix_condition(family, order):
    """1-norm condition number of the time mass matrix for diagnostics."""
    return condition_1norm(_tables(family, order).mass)


def _eval_rhs(sys, slab, t0, dt, nodes, iteration):
    """rhs at every subnode state; raises on non-finite values."""
    out = np.empty_like(slab)
    for m, tau in enumerate(nodes):
        out[m] = sys.rhs(t0 + tau * dt, slab[m])
    if not np.all(np.isfinite(out)):
        raise DivergenceError(
            f"rhs diverged in iteration {iteration}", time=t0, iteration=iteration
        )
    return out


def _check_state(slab, t0, iteration):
    if not np.all(np.isfinite(slab)) or np.max(np.abs(slab)) > DIVERGENCE_LIMIT:
        raise DivergenceError(
            f"state diverged in iteration {iteration}", time=t0, iteration=iteration
        )


def ader_rhs(ns, y_n, slab, dt, sys, t0=0.0):
    """Right-hand side functional r(a) of the ADER fixed point.

    r_m = phi_m(0) * y_n + dt * w_m * f(t_m, a_m); with quadrature nodes equal
    to basis nodes the inner reconstruction collapses to the subnode state,
    so f is evaluated exactly once per quadrature node.
    """
    phi0 = ns.basis_values(0.0)
    F = _eval_rhs(sys, slab, t0, dt, ns.nodes, iteration=-1)
    return phi0[:, None] * np.asarray(y_n)[None, :] + dt * ns.weights[:, None] * F


def ader_step(sys, y_n, dt, cfg, t0=0.0):
    """Advance one slab with K Picard iterations of the ADER fixed point."""
    tab = slab_tables(cfg)
    y_n = np.atleast_1d(np.asarray(y_n, dtype=float))
    slab = np.tile(y_n, (tab.ns.count, 1))
    for k in range(1, cfg.iterations + 1):
        F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=k)
        r = tab.phi0[:, None] * y_n[None, :] + dt * tab.ns.weights[:, None] * F
        slab = lu_solve(tab.mass_lu, r)
        _check_state(slab, t0, k)
    if tab.endpoint_included:
        return slab[-1].copy()
    # families without the right endpoint reconstruct by extrapolating the
    # time polynomial to 1
    return tab.phi1 @ slab


def dec_step(sys, y_n, dt, cfg, t0=0.0):
    """Advance one slab with K deferred-correction rounds.

    The low-order/high-order operator combination cancels algebraically for
    the explicit operators, leaving the plain sweep
    ``a_m <- y_n + dt * sum_r theta[m, r] f(a_r)``; rounds 1..K-1 update the
    subnode states and the K-th round produces the endpoint through the
    full-slab integral row (identical to the last subnode state for
    endpoint-including families).
    """
    tab = slab_tables(cfg)
    y_n = np.atleast_1d(np.asarray(y_n, dtype=float))
    slab = np.tile(y_n, (tab.ns.count, 1))
    for k in range(1, cfg.iterations):
        F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=k)
        slab = y_n[None, :] + dt * (tab.theta @ F)
        _check_state(slab, t0, k)
    F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=cfg.iterations)
    out = y_n + dt * (tab.theta_end @ F)
    _check_state(out[None, :], t0, cfg.iterations)
    return out


def step_function(cfg):
    """Resolve the one-slab stepper for a configuration."""
    if cfg.method == "ader":
        return ader_step
    if cfg.method == "dec":
        return dec_step
    from . import implicit

    return implicit.imdec_step if cfg.method == "imdec" else implicit.imader_step


@dataclass(frozen=True)
class _Schedule:
    kind: str
    dt: float
    factor: float = 2.0

    def boundaries(self, t0, t_end):
        """Yield the successive slab end times; the last is exactly t_end."""
        span = t_end - t0
        if span <= 0.0:
            return
        if self.kind == "uniform":
            n = max(1, int(round(span / self.dt)))
            # keep times exactly t0 + i*dt; the final slab absorbs the rest
            for i in range(1, n):
                yield t0 + i * self.dt
            yield t_end
        else:
            t = t0
            dt = self.dt
            while True:
                if t + dt >= t_end:
                    yield t_end
                    return
                t += dt
                yield t
                dt *= self.factor


def uniform_schedule(dt):
    """Constant step size; the last step is shortened to land on t_end."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    return _Schedule(kind="uniform", dt=float(dt))


def geometric_schedule(dt0, factor=2.0):
    """Progressively growing steps dt_n = factor * dt_{n-1}, clamped at t_end."""
    if dt0 <= 0.0 or factor <= 1.0:
        raise ValueError("need dt0 > 0 and factor > 1")
    return _Schedule(kind="geometric", dt=float(dt0), factor=float(factor))


def integrate(sys, t0, t_end, schedule, cfg, y0=None):
    """March a system across [t0, t_end], recording every slab endpoint.

    Divergence inside a slab propagates as :class:`DivergenceError` carrying
    the time of the offending slab.
    """
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    step = step_function(cfg)
    y = np.atleast_1d(np.asarray(sys.y0 if y0 is None else y0, dtype=float))
    times = [t0]
    states = [y.copy()]
    t = t0
    for t_next in schedule.boundaries(t0, t_end):
        try:
            y = step(sys, y, t_next - t, cfg, t0=t)
        except DivergenceError as err:
            raise DivergenceError(
                f"{sys.name}: {err} (slab starting at t={t:.6g})",
                time=t,
                iteration=err.iteration,
            ) from None
        t = t_next
        times.append(t)
        states.append(y.copy())
    return Trajectory(times=np.asarray(times), states=np.vstack(states))
