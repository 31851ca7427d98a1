"""Node families on the reference slab [0,1], Lagrange bases and integral tables.

Every time integrator in this package works on the unit reference slab: a
node family (equispaced, Gauss-Lobatto or Gauss-Legendre), the Lagrange basis
built on those nodes, the interpolatory quadrature weights, and the partial
integrals of the basis polynomials up to each node.  The physical step size
enters only in the steppers.

Point values and derivatives of the basis use the plain product form, which
is stable for any node count we support.  The integral tables come from the
monomial expansion of the basis integrated term by term; that expansion is
badly conditioned in double precision from ~10 nodes on, so it is carried
out in 50-digit arithmetic (construction only, results rounded to float).
"""

from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.special import roots_jacobi

__all__ = [
    "MAX_NODES",
    "FAMILIES",
    "NodeSet",
    "ThetaTable",
    "make_node_set",
    "lagrange_eval",
    "lagrange_deriv",
    "lagrange_basis",
    "theta_table",
    "normalize_family",
    "cached_node_set",
]

# Beyond 13 nodes even the extended-precision tables cannot rescue the
# double-precision evaluation paths reliably.
MAX_NODES = 13

_MP_DIGITS = 50

FAMILIES = ("equispaced", "gauss_lobatto", "gauss_legendre")

_ALIASES = {
    "equispaced": "equispaced",
    "equi": "equispaced",
    "eq": "equispaced",
    "gauss_lobatto": "gauss_lobatto",
    "gausslobatto": "gauss_lobatto",
    "lobatto": "gauss_lobatto",
    "glb": "gauss_lobatto",
    "gauss_legendre": "gauss_legendre",
    "gausslegendre": "gauss_legendre",
    "legendre": "gauss_legendre",
    "gl": "gauss_legendre",
}


def normalize_family(family):
    """Map a family name or alias to its canonical name."""
    key = str(family).strip().lower().replace("-", "_")
    try:
        return _ALIASES[key]
    except KeyError:
        raise ValueError(
            f"unknown node family {family!r}; expected one of {FAMILIES}"
        ) from None


class _LagrangeBasis:
    """Product-form evaluation of the Lagrange basis on arbitrary nodes."""

    def __init__(self, nodes):
        self.nodes = np.asarray(nodes, dtype=float)
        self.n = len(self.nodes)

    def values(self, t):
        """Basis values at ``t``; shape (n,) + t.shape."""
        t = np.asarray(t, dtype=float)
        out = np.empty((self.n,) + t.shape)
        for r in range(self.n):
            prod = np.ones_like(t)
            xr = self.nodes[r]
            for j in range(self.n):
                if j != r:
                    prod = prod * (t - self.nodes[j]) / (xr - self.nodes[j])
            out[r] = prod
        return out

    def derivs(self, t):
        """First derivatives of the basis at ``t``; shape (n,) + t.shape."""
        t = np.asarray(t, dtype=float)
        out = np.zeros((self.n,) + t.shape)
        for r in range(self.n):
            xr = self.nodes[r]
            for k in range(self.n):
                if k == r:
                    continue
                term = np.full_like(t, 1.0 / (xr - self.nodes[k]))
                for j in range(self.n):
                    if j != r and j != k:
                        term = term * (t - self.nodes[j]) / (xr - self.nodes[j])
                out[r] += term
        return out


def lagrange_basis(nodes):
    """Product-form Lagrange evaluator for an arbitrary node layout."""
    return _LagrangeBasis(nodes)


@dataclass(frozen=True)
class NodeSet:
    """Nodes and interpolatory quadrature weights on [0,1]."""

    family: str
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self):
        return len(self.nodes)

    @property
    def degree(self):
        return len(self.nodes) - 1

    @property
    def endpoint_included(self):
        return bool(abs(self.nodes[0]) < 1e-14 and abs(self.nodes[-1] - 1.0) < 1e-14)

    @property
    def negative_weights(self):
        """True when the interpolatory weights contain a negative entry.

        Happens for equispaced nodes from 9 points on and is a known source
        of trouble for high-order runs on that family.
        """
        return bool(np.any(self.weights < 0.0))

    def basis_values(self, t):
        return _LagrangeBasis(self.nodes).values(t)

    def basis_derivs(self, t):
        return _LagrangeBasis(self.nodes).derivs(t)


@dataclass(frozen=True)
class ThetaTable:
    """Partial integrals of the Lagrange basis used by the correction sweeps.

    ``theta[m, r]`` is the integral of basis polynomial r from 0 to node m,
    ``theta_end[r]`` the integral over the whole slab, and ``beta[m]`` the
    node position itself.
    """

    theta: np.ndarray
    theta_end: np.ndarray
    beta: np.ndarray


def _mp_basis_integrals(nodes):
    """Integrals of every Lagrange basis polynomial from 0 to each node and
    to 1, via exact monomial integration of the centered expansion."""
    n = len(nodes)
    with mp.workdps(_MP_DIGITS):
        # expand around 1/2: far better conditioned on [0,1]
        s = [mp.mpf(x) - mp.mpf(0.5) for x in nodes]
        half = mp.mpf(0.5)
        theta = [[mp.mpf(0)] * n for _ in range(n)]
        theta_end = [mp.mpf(0)] * n
        for r in range(n):
            # numerator polynomial prod_{j != r} (X - s_j), ascending coeffs
            coeff = [mp.mpf(1)]
            denom = mp.mpf(1)
            for j in range(n):
                if j == r:
                    continue
                coeff = [mp.mpf(0)] + coeff
                for k in range(len(coeff) - 1):
                    coeff[k] = coeff[k] - s[j] * coeff[k + 1]
                denom *= s[r] - s[j]
            coeff = [c / denom for c in coeff]
            # antiderivative evaluated between s = -1/2 and s = node - 1/2
            lower = [(-half) ** (k + 1) / (k + 1) for k in range(len(coeff))]
            for m in range(n):
                acc = mp.mpf(0)
                for k, c in enumerate(coeff):
                    acc += c * (s[m] ** (k + 1) / (k + 1) - lower[k])
                theta[m][r] = acc
            acc = mp.mpf(0)
            for k, c in enumerate(coeff):
                acc += c * (half ** (k + 1) / (k + 1) - lower[k])
            theta_end[r] = acc
        theta = np.array([[float(v) for v in row] for row in theta])
        theta_end = np.array([float(v) for v in theta_end])
    return theta, theta_end


def _gauss_legendre_nodes(count):
    x, _ = np.polynomial.legendre.leggauss(count)
    return 0.5 * (x + 1.0)


def _gauss_lobatto_nodes(count):
    if count == 2:
        return np.array([0.0, 1.0])
    # interior Lobatto nodes are the roots of P'_{n-1}, i.e. of the
    # Jacobi(1,1) polynomial of degree n-2
    interior, _ = roots_jacobi(count - 2, 1.0, 1.0)
    return np.concatenate(([0.0], 0.5 * (interior + 1.0), [1.0]))


def make_node_set(family, count):
    """Build a :class:`NodeSet` of ``count`` nodes of the given family.

    Gauss nodes come from the roots of the orthogonal polynomials (accurate
    to ~1e-15); the weights are the exact integrals of the Lagrange basis
    over [0,1], which reproduces the Gaussian weights for the Gauss families
    and the Newton-Cotes weights for equispaced nodes.
    """
    family = normalize_family(family)
    count = int(count)
    if count < 1:
        raise ValueError("need at least one node")
    if count > MAX_NODES:
        raise ValueError(f"at most {MAX_NODES} nodes supported, got {count}")
    if family == "gauss_lobatto" and count < 2:
        raise ValueError("Gauss-Lobatto needs at least 2 nodes")

    if family == "equispaced":
        nodes = np.linspace(0.0, 1.0, count) if count > 1 else np.array([0.0])
    elif family == "gauss_lobatto":
        nodes = _gauss_lobatto_nodes(count)
    else:
        nodes = _gauss_legendre_nodes(count)

    _, weights = _mp_basis_integrals(nodes)
    return NodeSet(family=family, nodes=nodes, weights=weights)


def lagrange_eval(ns, r, t):
    """Value of the r-th Lagrange polynomial of ``ns`` at ``t``.

    Extrapolation outside [0,1] is allowed; the Gauss-Legendre endpoint
    reconstruction relies on it.
    """
    if not 0 <= r < ns.count:
        raise IndexError(f"basis index {r} out of range 0..{ns.count - 1}")
    scalar = np.isscalar(t)
    out = ns.basis_values(np.atleast_1d(np.asarray(t, dtype=float)))[r]
    return float(out[0]) if scalar else out


def lagrange_deriv(ns, r, t):
    """Derivative of the r-th Lagrange polynomial of ``ns`` at ``t``."""
    if not 0 <= r < ns.count:
        raise IndexError(f"basis index {r} out of range 0..{ns.count - 1}")
    scalar = np.isscalar(t)
    out = ns.basis_derivs(np.atleast_1d(np.asarray(t, dtype=float)))[r]
    return float(out[0]) if scalar else out


def theta_table(ns):
    """Integral table of the basis of ``ns``.

    Analytic monomial integration (in extended precision), so the table is
    exact to round-off and no quadrature error enters the correction sweeps.
    """
    theta, theta_end = _mp_basis_integrals(ns.nodes)
    if ns.endpoint_included:
        # keep the last row and the full-slab integrals bit-identical
        theta[-1] = theta_end
    return ThetaTable(theta=theta, theta_end=theta_end, beta=ns.nodes.copy())


@lru_cache(maxsize=None)
def cached_node_set(family, count):
    """Cached constructor used by the steppers (NodeSet is immutable)."""
    return make_node_set(family, count)
