"""ODE system abstraction and the catalog of test problems.

All systems are posed as y' = rhs(t, y).  Stiff problems additionally carry a
split rhs = explicit_part + stiff_part together with the Jacobian of the
stiff part, which is what the linearized implicit steppers consume.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ODESystem",
    "StiffSplit",
    "Trajectory",
    "DivergenceError",
    "make_scalar_linear",
    "make_scalar_nonlinear",
    "make_biomass",
    "make_lotka_volterra",
    "make_robertson",
    "make_problem",
    "PROBLEM_NAMES",
    "fd_jacobian",
]

# a run is declared diverged once any component passes this magnitude
DIVERGENCE_LIMIT = 1e100


class DivergenceError(RuntimeError):
    """A stepper produced a non-finite or absurdly large state."""

    def __init__(self, message, time=None, iteration=None):
        self.time = time
        self.iteration = iteration
        super().__init__(message)


@dataclass(frozen=True)
class StiffSplit:
    """rhs = explicit_part + stiff_part, with the Jacobian of the stiff part."""

    explicit_part: callable
    stiff_part: callable
    stiff_jac: callable


@dataclass(frozen=True)
class ODESystem:
    """An initial value problem y' = rhs(t, y) with optional extras.

    ``jac`` is the Jacobian of the full rhs; ``analytic`` maps t to the exact
    solution when one is known; ``invariant`` is a conserved functional used
    as an accuracy proxy (Lotka-Volterra).
    """

    name: str
    dim: int
    rhs: callable
    y0: np.ndarray
    jac: callable = None
    stiff_split: StiffSplit = None
    analytic: callable = None
    invariant: callable = None


@dataclass(frozen=True)
class Trajectory:
    """Slab-endpoint samples of a run: times (N+1,), states (N+1, dim)."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self):
        return len(self.times)


def _vec(*components):
    return np.array(components, dtype=float)


def make_scalar_linear(lam=10.0):
    """y' = lam * y with y(0) = 1 and the exact exponential solution."""
    lam = float(lam)

    def rhs(t, y):
        return lam * y

    def jac(t, y):
        return np.array([[lam]])

    def analytic(t):
        return np.array([np.exp(lam * t)])

    split = StiffSplit(
        explicit_part=lambda t, y: np.zeros_like(y),
        stiff_part=rhs,
        stiff_jac=jac,
    )
    return ODESystem(
        name=f"scalar-linear(lambda={lam:g})",
        dim=1,
        rhs=rhs,
        y0=_vec(1.0),
        jac=jac,
        stiff_split=split,
        analytic=analytic,
    )


def make_scalar_nonlinear(k=10.0):
    """y' = -k |y| y with y(0) = 1; solution 1/(1 + k t) for y(0) = 1, k > 0.

    The absolute value keeps the closed form valid only for y(0) >= 0, which
    covers the catalog use.
    """
    k = float(k)

    def rhs(t, y):
        return -k * np.abs(y) * y

    def jac(t, y):
        return np.array([[-2.0 * k * np.abs(y[0])]])

    def analytic(t):
        return np.array([1.0 / (1.0 + k * t)])

    return ODESystem(
        name=f"scalar-nonlinear(k={k:g})",
        dim=1,
        rhs=rhs,
        y0=_vec(1.0),
        jac=jac,
        analytic=analytic,
    )


_BIOMASS_MATRIX = np.array(
    [
        [-1.0, 3.0, 0.0],
        [0.0, -3.0, 5.0],
        [0.0, 0.0, -5.0],
    ]
)


def make_biomass():
    """Linear 3-compartment biomass transfer model, start state (0, 0, 10)."""

    def rhs(t, y):
        return _BIOMASS_MATRIX @ y

    def jac(t, y):
        return _BIOMASS_MATRIX.copy()

    y30 = 10.0

    def analytic(t):
        e1, e3, e5 = np.exp(-t), np.exp(-3.0 * t), np.exp(-5.0 * t)
        return np.array(
            [
                15.0 / 8.0 * y30 * (e5 - 2.0 * e3 + e1),
                5.0 / 2.0 * y30 * (-e5 + e3),
                y30 * e5,
            ]
        )

    split = StiffSplit(
        explicit_part=lambda t, y: np.zeros_like(y),
        stiff_part=rhs,
        stiff_jac=jac,
    )
    return ODESystem(
        name="biomass",
        dim=3,
        rhs=rhs,
        y0=_vec(0.0, 0.0, y30),
        jac=jac,
        stiff_split=split,
        analytic=analytic,
    )


def make_lotka_volterra(alpha=1.0, beta=0.2, delta=0.5, gamma=0.2):
    """Predator-prey system with conserved functional exposed for testing.

    V(y) = delta*y1 - gamma*ln y1 + beta*y2 - alpha*ln y2 is constant along
    exact solutions and serves as an accuracy proxy where no closed-form
    solution exists.
    """
    a, b, d, g = float(alpha), float(beta), float(delta), float(gamma)

    def rhs(t, y):
        y1, y2 = y
        return np.array([a * y1 - b * y1 * y2, -g * y2 + d * y1 * y2])

    def jac(t, y):
        y1, y2 = y
        return np.array([[a - b * y2, -b * y1], [d * y2, -g + d * y1]])

    def invariant(y):
        y1, y2 = y
        return d * y1 - g * np.log(y1) + b * y2 - a * np.log(y2)

    return ODESystem(
        name="lotka-volterra",
        dim=2,
        rhs=rhs,
        y0=_vec(1.0, 2.0),
        jac=jac,
        invariant=invariant,
    )


def make_robertson():
    """Robertson chemical kinetics, the stiff benchmark on [0, 1e11].

    The whole rhs is taken as the stiff part and the Jacobian is analytic;
    finite differences are useless at the 3e7*y2^2 scales involved.
    """

    def rhs(t, y):
        y1, y2, y3 = y
        r1 = 1e4 * y2 * y3 - 0.04 * y1
        r3 = 3e7 * y2 * y2
        return np.array([r1, -r1 - r3, r3])

    def jac(t, y):
        y1, y2, y3 = y
        return np.array(
            [
                [-0.04, 1e4 * y3, 1e4 * y2],
                [0.04, -1e4 * y3 - 6e7 * y2, -1e4 * y2],
                [0.0, 6e7 * y2, 0.0],
            ]
        )

    split = StiffSplit(
        explicit_part=lambda t, y: np.zeros_like(y),
        stiff_part=rhs,
        stiff_jac=jac,
    )
    return ODESystem(
        name="robertson",
        dim=3,
        rhs=rhs,
        y0=_vec(1.0, 0.0, 0.0),
        jac=jac,
        stiff_split=split,
    )


_PROBLEM_FACTORIES = {
    "linear": make_scalar_linear,
    "nonlinear": make_scalar_nonlinear,
    "biomass": make_biomass,
    "lotka-volterra": make_lotka_volterra,
    "robertson": make_robertson,
}

PROBLEM_NAMES = tuple(sorted(_PROBLEM_FACTORIES))


def make_problem(name, **params):
    """Instantiate a catalog problem by name (see :data:`PROBLEM_NAMES`)."""
    key = str(name).strip().lower()
    if key in ("lotka", "lotka_volterra", "lotkavolterra"):
        key = "lotka-volterra"
    try:
        factory = _PROBLEM_FACTORIES[key]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}"
        ) from None
    return factory(**params)


def fd_jacobian(sys, t, y):
    """Central-difference Jacobian of sys.rhs, fallback when jac is absent."""
    y = np.asarray(y, dtype=float)
    base = np.asarray(sys.rhs(t, y), dtype=float)
    if not np.all(np.isfinite(base)):
        raise DivergenceError("rhs not finite at linearization point", time=t)
    J = np.empty((sys.dim, sys.dim))
    for j in range(sys.dim):
        h = max(1e-7, 1e-7 * abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += h
        ym[j] -= h
        J[:, j] = (np.asarray(sys.rhs(t, yp)) - np.asarray(sys.rhs(t, ym))) / (2.0 * h)
    return J
