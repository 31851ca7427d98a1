"""Amplification factors and A-stability regions on the linear test equation.

One step of the configured method is run on y' = z y with dt = 1 and y(0) = 1
for complex z; the modulus of the result is the amplification factor and the
region where it stays below 1 is the A-stability region.  Complex dynamics
are realized through the 2x2 real rotation embedding

    d/dt (Re y, Im y) = [[Re z, -Im z], [Im z, Re z]] (Re y, Im y)

so the steppers themselves stay real-valued and conjugate inputs produce
exactly mirrored outputs.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .explicit import StepperConfig, step_function
from .odes import DivergenceError, ODESystem, StiffSplit

__all__ = [
    "DEFAULT_BOUNDS",
    "DEFAULT_RESOLUTION",
    "StabilityGrid",
    "embedding_system",
    "amplification",
    "stability_grid",
    "region_members",
    "boundary_cells",
    "grid_to_csv",
    "grid_summary",
    "write_grid_summary",
]

# contains every region of order <= 5 with margin
DEFAULT_BOUNDS = (-6.0, 1.0, -4.0, 4.0)
DEFAULT_RESOLUTION = (101, 101)

# |amp - 1| below this marks a boundary cell, reported separately from the
# strict amp < 1 membership
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class StabilityGrid:
    """Amplification magnitudes on a rectangular grid in the complex plane.

    ``amp[iy, ix]`` belongs to z = re[ix] + 1j * im[iy]; diverged evaluations
    hold +inf sentinels.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int
    amp: np.ndarray

    @property
    def re(self):
        return np.linspace(self.re_min, self.re_max, self.nx)

    @property
    def im(self):
        return np.linspace(self.im_min, self.im_max, self.ny)


def _rotation(z):
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def embedding_system(z):
    """The 2D real embedding of y' = z y (with stiff split, so implicit
    configurations can be scanned as well)."""
    A = _rotation(complex(z))

    def rhs(t, y):
        return A @ y

    def jac(t, y):
        return A.copy()

    split = StiffSplit(
        explicit_part=lambda t, y: np.zeros_like(y),
        stiff_part=rhs,
        stiff_jac=jac,
    )
    return ODESystem(
        name=f"linear-test(z={z})",
        dim=2,
        rhs=rhs,
        y0=np.array([1.0, 0.0]),
        jac=jac,
        stiff_split=split,
    )


def amplification(cfg, z):
    """|phi(z)|: norm of one dt=1 step on the embedded test equation.

    Returns +inf when the step diverges.
    """
    sys = embedding_system(z)
    step = step_function(cfg)
    try:
        out = step(sys, sys.y0, 1.0, cfg)
    except Exception:
        return np.inf
    if not np.all(np.isfinite(out)):
        return np.inf
    return float(np.hypot(out[0], out[1]))


def _batched_explicit_grid(cfg, zs):
    """All grid points at once as one block-diagonal rotation system.

    Each point occupies two state components; the elementwise arithmetic is
    identical to the per-point evaluation, so results match exactly.
    """
    a = zs.real.ravel()
    b = zs.imag.ravel()
    npts = a.size

    def rhs(t, y):
        yy = y.reshape(npts, 2)
        out = np.empty_like(yy)
        out[:, 0] = a * yy[:, 0] - b * yy[:, 1]
        out[:, 1] = b * yy[:, 0] + a * yy[:, 1]
        return out.reshape(-1)

    sys = ODESystem(
        name="stability-batch",
        dim=2 * npts,
        rhs=rhs,
        y0=np.tile([1.0, 0.0], npts),
    )
    step = step_function(cfg)
    out = step(sys, sys.y0, 1.0, cfg).reshape(npts, 2)
    return np.hypot(out[:, 0], out[:, 1]).reshape(zs.shape)


def stability_grid(cfg, bounds=DEFAULT_BOUNDS, resolution=DEFAULT_RESOLUTION):
    """Scan the amplification factor over a rectangle of the complex plane."""
    re_min, re_max, im_min, im_max = (float(v) for v in bounds)
    nx, ny = (int(v) for v in resolution)
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 grid points per axis")
    re = np.linspace(re_min, re_max, nx)
    im = np.linspace(im_min, im_max, ny)
    zs = re[None, :] + 1j * im[:, None]
    if cfg.is_implicit:
        amp = np.empty((ny, nx))
        for iy in range(ny):
            for ix in range(nx):
                amp[iy, ix] = amplification(cfg, zs[iy, ix])
    else:
        # explicit one-step maps are polynomials in z: always finite
        amp = _batched_explicit_grid(cfg, zs)
    return StabilityGrid(
        re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max,
        nx=nx, ny=ny, amp=amp,
    )


def region_members(grid):
    """Boolean membership grid of the stability region, strict amp < 1."""
    return grid.amp < 1.0


def boundary_cells(grid):
    """Cells sitting on the unit-amplification contour within round-off."""
    return np.abs(grid.amp - 1.0) < BOUNDARY_TOL


def grid_to_csv(grid, path):
    """Write rows (re, im, amp) with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "amp"])
        re, im = grid.re, grid.im
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                writer.writerow(
                    [f"{re[ix]:.17g}", f"{im[iy]:.17g}", f"{grid.amp[iy, ix]:.17g}"]
                )


def grid_summary(grid):
    return {
        "bounds": [grid.re_min, grid.re_max, grid.im_min, grid.im_max],
        "resolution": [grid.nx, grid.ny],
        "member_cells": int(np.count_nonzero(region_members(grid))),
        "boundary_cells": int(np.count_nonzero(boundary_cells(grid))),
    }


def write_grid_summary(grid, path):
    with open(path, "w") as fh:
        json.dump(grid_summary(grid), fh, indent=2)
        fh.write("\n")
