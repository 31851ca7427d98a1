"""Small dense linear algebra: LU factorization, solves, inversion.

Backed by LAPACK through scipy; the wrappers add the singularity reporting
and the 1-norm condition estimate the integrators need.  Matrices here are
tiny ((M+1)*I at most, ~60x60 for the stiff runs), so no attention is paid
to performance beyond vectorized solves.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "SingularMatrixError",
    "LUFactors",
    "lu_factor",
    "lu_solve",
    "invert",
    "condition_1norm",
]

# pivots below this fraction of the largest entry are treated as singular
_PIVOT_TOL = 1e-14


class SingularMatrixError(ValueError):
    """Raised when a pivot is (numerically) zero.

    ``pivot_index`` is the index of the failing pivot.
    """

    def __init__(self, pivot_index, pivot, scale):
        self.pivot_index = int(pivot_index)
        self.pivot = float(pivot)
        super().__init__(
            f"matrix numerically singular: pivot {pivot_index} has magnitude "
            f"{abs(pivot):.3e} < {_PIVOT_TOL:.0e} * max|entry| = {scale:.3e}"
        )


@dataclass(frozen=True)
class LUFactors:
    """Combined L/U storage with pivot bookkeeping (value object)."""

    lu: np.ndarray
    piv: np.ndarray
    sign: int  # parity of the pivot permutation

    @property
    def n(self):
        return self.lu.shape[0]


def _as_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def lu_factor(a):
    """Partial-pivoting LU factorization of a square matrix.

    Raises :class:`SingularMatrixError` (carrying the failing pivot index)
    when a pivot falls below 1e-14 times the largest entry of ``a``.
    """
    a = _as_square(a)
    with warnings.catch_warnings():
        # exact singularity is detected below and raised with the pivot index
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    scale = np.max(np.abs(a)) if a.size else 0.0
    diag = np.abs(np.diag(lu))
    bad = np.nonzero(diag < _PIVOT_TOL * scale)[0]
    if scale == 0.0 or bad.size:
        idx = int(bad[0]) if bad.size else 0
        raise SingularMatrixError(idx, np.diag(lu)[idx] if a.size else 0.0, scale)
    sign = 1 if np.count_nonzero(piv != np.arange(len(piv))) % 2 == 0 else -1
    return LUFactors(lu=lu, piv=piv, sign=sign)


def lu_solve(factors, b):
    """Solve A x = b reusing the factorization; b may carry multiple columns."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != factors.n:
        raise ValueError(f"rhs has leading dimension {b.shape[0]}, expected {factors.n}")
    return scipy.linalg.lu_solve((factors.lu, factors.piv), b, check_finite=False)


def invert(a):
    """Inverse of a small nonsingular matrix via its LU factorization."""
    f = lu_factor(a)
    return lu_solve(f, np.eye(f.n))


def condition_1norm(a):
    """1-norm condition number; reported alongside mass-matrix diagnostics."""
    a = _as_square(a)
    try:
        inv = invert(a)
    except SingularMatrixError:
        return np.inf
    return float(np.linalg.norm(a, 1) * np.linalg.norm(inv, 1))
