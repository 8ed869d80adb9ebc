"""Cell-centered rectangular grids and discrete operators with zero-flux walls.

Domains are axis-aligned boxes centered at the origin, ``[-L_a/2, L_a/2]``
per axis, split into uniform cells. Scalars live at cell centers (`Field`),
normal fluxes live on faces (`FaceFluxes`) with boundary faces pinned to
zero, which makes discrete mass conservation exact rather than approximate.
All reductions run in a fixed order so repeated evaluations are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import GridMismatchError


def _as_float_tuple(xs) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centered grid on a centered box, 1D or 2D."""

    lengths: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", _as_float_tuple(self.lengths))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        if len(self.lengths) != len(self.cells):
            raise ValueError("lengths and cells must have one entry per axis")
        if self.dim not in (1, 2):
            raise ValueError(f"only 1D and 2D grids are supported, got dim={self.dim}")
        for L in self.lengths:
            if not (L > 0.0) or not np.isfinite(L):
                raise ValueError(f"axis length must be positive and finite, got {L}")
        for n in self.cells:
            if n < 3:
                raise ValueError(f"need at least 3 cells per axis for the stencils, got {n}")

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def n_cells(self) -> int:
        n = 1
        for c in self.cells:
            n *= c
        return n

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for h in self.spacing:
            v *= h
        return v

    def centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim={self.dim}")
        L = self.lengths[axis]
        h = self.spacing[axis]
        return -0.5 * L + (np.arange(self.cells[axis]) + 0.5) * h

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Per-axis coordinate arrays broadcast to the full cell shape."""
        axes = [self.centers(a) for a in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True)
class Field:
    """One scalar value per cell, row-major over the grid axes."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.isfinite(v).all():
            raise ValueError("field values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Field":
        return cls(grid, fn(*grid.meshes()))

    @classmethod
    def full(cls, grid: GridSpec, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))


def _face_shape(grid: GridSpec, axis: int) -> tuple[int, ...]:
    s = list(grid.shape)
    s[axis] += 1
    return tuple(s)


@dataclass(frozen=True)
class FaceFluxes:
    """Face-normal flux values per axis; boundary faces are identically zero."""

    grid: GridSpec
    per_axis: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.per_axis) != self.grid.dim:
            raise ValueError("need one face array per axis")
        checked = []
        for axis, f in enumerate(self.per_axis):
            f = np.ascontiguousarray(f, dtype=np.float64)
            if f.shape != _face_shape(self.grid, axis):
                raise ValueError(
                    f"axis {axis} face array has shape {f.shape}, "
                    f"expected {_face_shape(self.grid, axis)}")
            first = np.take(f, 0, axis=axis)
            last = np.take(f, -1, axis=axis)
            if np.any(first != 0.0) or np.any(last != 0.0):
                raise ValueError("boundary faces must carry exactly zero flux")
            f = f.copy()
            f.setflags(write=False)
            checked.append(f)
        object.__setattr__(self, "per_axis", tuple(checked))


def require_same_grid(*fields: Field) -> GridSpec:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatchError("fields do not share a grid")
    return g


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def face_gradient(u: Field, axis: int) -> np.ndarray:
    """Two-point face gradient along ``axis``; boundary faces are zero."""
    g = u.grid
    if not 0 <= axis < g.dim:
        raise ValueError(f"axis {axis} out of range for dim={g.dim}")
    k = kernels.get_backend()
    if g.dim == 1:
        return k.face_gradient_1d(u.values, g.spacing[0])
    if axis == 0:
        return k.face_gradient_2d_x(u.values, g.spacing[0])
    return k.face_gradient_2d_y(u.values, g.spacing[1])


def divergence(F: FaceFluxes) -> Field:
    """Per-cell flux balance; volume-weighted sum is zero by telescoping."""
    g = F.grid
    k = kernels.get_backend()
    if g.dim == 1:
        out = k.divergence_1d(F.per_axis[0], g.spacing[0])
    else:
        out = k.divergence_2d(F.per_axis[0], F.per_axis[1], g.spacing[0], g.spacing[1])
    return Field(g, out)


def laplacian_neumann(u: Field) -> Field:
    """divergence(face_gradient(u)) summed over axes."""
    g = u.grid
    k = kernels.get_backend()
    if g.dim == 1:
        out = k.laplacian_1d(u.values, g.spacing[0])
    else:
        out = k.laplacian_2d(u.values, g.spacing[0], g.spacing[1])
    return Field(g, out)


def integrate_cells(u: Field) -> float:
    """Midpoint quadrature: (fixed-order sum of cell values) * cell volume."""
    return float(u.values.sum()) * u.grid.cell_volume


def mean_value(u: Field) -> float:
    """Volume-weighted mean; uniform volumes cancel exactly."""
    return float(u.values.sum()) / u.grid.n_cells
