"""Linearized implicit steppers (IMDeC, IMADER) for stiff systems.

Both treat the stiff part of the rhs implicitly through its Jacobian frozen
at the slab's initial state; the residual they drive to zero is the same
high-order operator as in the explicit methods, so with a vanishing stiff
part they reduce exactly to their explicit counterparts.

IMDeC keeps the subnode equations decoupled: each correction round solves one
small dim x dim system per subnode, with matrix I - beta_m * dt * dS(y_n).
IMADER couples the whole slab: a single ((M+1) dim)^2 matrix combining the
time mass matrix with the stiff Jacobian is factored once per slab and reused
across the K iterations.  The extra coupling buys extra accuracy on stiff
runs at the price of the bigger solve.
"""

import numpy as np

from .linalg import SingularMatrixError, lu_factor, lu_solve
from .nodes import NodeSet
from .odes import DivergenceError
from .explicit import StepperConfig, slab_tables, _check_state, _eval_rhs

__all__ = [
    "imdec_step",
    "imader_step",
    "time_gram_matrix",
    "imader_source_tensor",
    "robertson_schedule",
]


class StepFailure(RuntimeError):
    """A per-slab linear system was singular; carries the subnode index."""

    def __init__(self, message, subnode=None):
        self.subnode = subnode
        super().__init__(message)


def _require_split(sys, cfg):
    if sys.stiff_split is None:
        raise ValueError(
            f"{cfg.method} requires an ODESystem with a stiff_split (got {sys.name!r})"
        )
    return sys.stiff_split


def imdec_step(sys, y_n, dt, cfg, t0=0.0):
    """One slab of the implicit DeC method.

    Correction rounds update every subnode m through
    ``a_m <- a_m - J_m^{-1} L2(a)_m`` with J_m = I - beta_m * dt * dS(y_n)
    and L2(a)_m = a_m - y_n - dt * sum_r theta[m, r] f(a_r), f being the full
    rhs.  dS is evaluated once per slab; each J_m is factored once per slab.
    """
    split = _require_split(sys, cfg)
    tab = slab_tables(cfg)
    y_n = np.atleast_1d(np.asarray(y_n, dtype=float))
    dim = len(y_n)
    dS = np.asarray(split.stiff_jac(t0, y_n), dtype=float)
    eye = np.eye(dim)
    factors = []
    for m, beta in enumerate(tab.beta):
        try:
            factors.append(lu_factor(eye - beta * dt * dS))
        except SingularMatrixError as err:
            raise StepFailure(
                f"singular implicit matrix at subnode {m} (t={t0:.6g}): {err}",
                subnode=m,
            ) from None

    slab = np.tile(y_n, (tab.ns.count, 1))
    n_sweeps = cfg.iterations if tab.endpoint_included else cfg.iterations - 1
    for k in range(1, n_sweeps + 1):
        F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=k)
        resid = slab - y_n[None, :] - dt * (tab.theta @ F)
        slab = np.vstack([slab[m] - lu_solve(factors[m], resid[m]) for m in range(tab.ns.count)])
        _check_state(slab, t0, k)
    if tab.endpoint_included:
        return slab[-1].copy()
    # Gauss-Legendre: the full-slab integral of the last iterate is the final
    # correction round, mirroring the explicit DeC convention
    F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=cfg.iterations)
    out = y_n + dt * (tab.theta_end @ F)
    _check_state(out[None, :], t0, cfg.iterations)
    return out


def time_gram_matrix(ns):
    """G[m,l] = sum_z w_z phi_m(t_z) phi_l(t_z); diagonal when quadrature
    nodes coincide with the basis nodes."""
    vals = ns.basis_values(ns.nodes)
    return (vals * ns.weights[None, :]) @ vals.T


def imader_source_tensor(ns, dt, jac_s):
    """Coupling block dt * G (x) jac_s of the stiff source with the time basis.

    ``jac_s`` is the Jacobian of the source term written on the same side of
    the equation as the time derivative; the caller fixes the sign.
    """
    jac_s = np.asarray(jac_s, dtype=float)
    return dt * np.kron(time_gram_matrix(ns), jac_s)


def imader_step(sys, y_n, dt, cfg, t0=0.0):
    """One slab of the implicit ADER method.

    Iterates ``a <- a - J^{-1} L2(a)`` with the coupled matrix
    J = M (x) I - dt * G (x) dS(y_n) factored once per slab and
    L2(a) = M a - r(a), r containing the full rhs at the quadrature nodes.
    The endpoint reconstruction is the same as in the explicit ADER stepper.
    """
    split = _require_split(sys, cfg)
    tab = slab_tables(cfg)
    y_n = np.atleast_1d(np.asarray(y_n, dtype=float))
    dim = len(y_n)
    dS = np.asarray(split.stiff_jac(t0, y_n), dtype=float)
    J = np.kron(tab.mass, np.eye(dim)) - imader_source_tensor(tab.ns, dt, dS)
    try:
        J_lu = lu_factor(J)
    except SingularMatrixError as err:
        raise StepFailure(f"singular coupled implicit matrix (t={t0:.6g}): {err}") from None

    slab = np.tile(y_n, (tab.ns.count, 1))
    for k in range(1, cfg.iterations + 1):
        F = _eval_rhs(sys, slab, t0, dt, tab.ns.nodes, iteration=k)
        r = tab.phi0[:, None] * y_n[None, :] + dt * tab.ns.weights[:, None] * F
        resid = tab.mass @ slab - r
        slab = slab - lu_solve(J_lu, resid.reshape(-1)).reshape(tab.ns.count, dim)
        _check_state(slab, t0, k)
    if tab.endpoint_included:
        return slab[-1].copy()
    return tab.phi1 @ slab


def robertson_schedule(dt0=1e-6, factor=2.0):
    """Default progressively-doubling schedule for the Robertson benchmark."""
    from .explicit import geometric_schedule

    return geometric_schedule(dt0, factor)
