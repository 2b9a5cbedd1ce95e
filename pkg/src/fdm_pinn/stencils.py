"""Finite-difference stencils and the Laplace / Burgers residuals built from them.

Two views of the same formulas live here: scalar functions that read a
:class:`ScalarField` at one node (with reach checks), and vectorized
``*_from_footprint`` functions that take the stencil values of many nodes at
once, used by the training loop where values come from network evaluations
rather than a stored field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, StencilOutOfBounds
from .grid import ScalarField, UniformGrid2D

BURGERS_NU = 0.01 / math.pi


class StencilAxis(enum.Enum):
    AXIS0 = 0
    AXIS1 = 1


class PdeKind(str, enum.Enum):
    LAPLACE = "laplace"
    BURGERS = "burgers"


# Footprint offsets; the centre node is always first.
LAPLACE_FOOTPRINT = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))
BURGERS_FOOTPRINT = ((0, 0), (0, 1), (0, 2), (1, 0), (2, 0), (-1, 0))


def _step(axis: StencilAxis) -> tuple[int, int]:
    return (1, 0) if axis is StencilAxis.AXIS0 else (0, 1)


def _spacing(grid: UniformGrid2D, axis: StencilAxis) -> float:
    return grid.h_i if axis is StencilAxis.AXIS0 else grid.h_j


def _check_reach(grid, i, j, offsets, what):
    for di, dj in offsets:
        ii, jj = i + di, j + dj
        if not (0 <= ii < grid.n_i and 0 <= jj < grid.n_j):
            raise StencilOutOfBounds(i, j, f"{what} needs node ({ii}, {jj})")


def forward_diff1(field: ScalarField, i: int, j: int, axis: StencilAxis) -> float:
    """One-sided three-point first derivative ``(-3u0 + 4u1 - u2) / 2h``."""
    di, dj = _step(axis)
    _check_reach(field.grid, i, j, [(0, 0), (di, dj), (2 * di, 2 * dj)],
                 f"forward_diff1 along {axis.name.lower()}")
    v = field.values
    h = _spacing(field.grid, axis)
    return (-3.0 * v[i, j] + 4.0 * v[i + di, j + dj] - v[i + 2 * di, j + 2 * dj]) / (2.0 * h)


def central_diff2(field: ScalarField, i: int, j: int, axis: StencilAxis) -> float:
    """Central second derivative ``(u-1 - 2u0 + u+1) / h^2``."""
    di, dj = _step(axis)
    _check_reach(field.grid, i, j, [(-di, -dj), (0, 0), (di, dj)],
                 f"central_diff2 along {axis.name.lower()}")
    v = field.values
    h = _spacing(field.grid, axis)
    return (v[i - di, j - dj] - 2.0 * v[i, j] + v[i + di, j + dj]) / (h * h)


def _require_isotropic(grid: UniformGrid2D):
    if not grid.is_isotropic(1e-12):
        raise ConfigurationError(
            f"laplace residual assumes one spacing, grid has h_i={grid.h_i}, h_j={grid.h_j}"
        )


def laplace_residual(field: ScalarField, i: int, j: int) -> float:
    grid = field.grid
    _require_isotropic(grid)
    _check_reach(grid, i, j, LAPLACE_FOOTPRINT, "laplace residual")
    v = field.values
    h = grid.h_i
    return (v[i - 1, j] + v[i + 1, j] + v[i, j - 1] + v[i, j + 1] - 4.0 * v[i, j]) / (h * h)


def burgers_residual(field: ScalarField, i: int, j: int, nu: float = BURGERS_NU) -> float:
    """``u_t + u u_x - nu u_xx`` with axis 0 = x and axis 1 = t."""
    _check_reach(field.grid, i, j, BURGERS_FOOTPRINT, "burgers residual")
    u_t = forward_diff1(field, i, j, StencilAxis.AXIS1)
    u_x = forward_diff1(field, i, j, StencilAxis.AXIS0)
    u_xx = central_diff2(field, i, j, StencilAxis.AXIS0)
    return u_t + field.values[i, j] * u_x - nu * u_xx


@dataclass(frozen=True)
class CollocationSet:
    pde: PdeKind
    nodes: np.ndarray  # (N, 2) int array of (i, j)

    def __len__(self):
        return len(self.nodes)


def collocation_nodes(grid: UniformGrid2D, pde) -> CollocationSet:
    """Every node whose full residual stencil lies inside the grid."""
    pde = PdeKind(pde)
    if pde is PdeKind.LAPLACE:
        i_range, j_range = range(1, grid.n_i - 1), range(1, grid.n_j - 1)
    else:
        i_range, j_range = range(1, grid.n_i - 2), range(0, grid.n_j - 2)
    nodes = np.array([(i, j) for i in i_range for j in j_range], dtype=int).reshape(-1, 2)
    if len(nodes) == 0:
        raise ConfigurationError(f"{grid.n_i}x{grid.n_j} grid has no valid {pde.value} nodes")
    return CollocationSet(pde, nodes)


def footprint(pde) -> tuple[tuple[int, int], ...]:
    return LAPLACE_FOOTPRINT if PdeKind(pde) is PdeKind.LAPLACE else BURGERS_FOOTPRINT


def laplace_from_footprint(vals: np.ndarray, h: float):
    """Residuals and their partials w.r.t. each footprint value.

    ``vals`` has shape ``(B, 5)`` ordered as :data:`LAPLACE_FOOTPRINT`.
    """
    inv = 1.0 / (h * h)
    gamma = (vals[:, 1] + vals[:, 2] + vals[:, 3] + vals[:, 4] - 4.0 * vals[:, 0]) * inv
    partials = np.broadcast_to(np.array([-4.0, 1.0, 1.0, 1.0, 1.0]) * inv, vals.shape)
    return gamma, partials


def burgers_from_footprint(vals: np.ndarray, h_x: float, h_t: float, nu: float = BURGERS_NU):
    """Burgers residuals for ``vals`` of shape ``(B, 6)`` ordered as :data:`BURGERS_FOOTPRINT`."""
    u0, ut1, ut2, ux1, ux2, uxm = (vals[:, k] for k in range(6))
    u_t = (-3.0 * u0 + 4.0 * ut1 - ut2) / (2.0 * h_t)
    u_x = (-3.0 * u0 + 4.0 * ux1 - ux2) / (2.0 * h_x)
    u_xx = (uxm - 2.0 * u0 + ux1) / (h_x * h_x)
    gamma = u_t + u0 * u_x - nu * u_xx

    partials = np.empty_like(vals)
    partials[:, 0] = -1.5 / h_t + u_x - 1.5 * u0 / h_x + 2.0 * nu / (h_x * h_x)
    partials[:, 1] = 2.0 / h_t
    partials[:, 2] = -0.5 / h_t
    partials[:, 3] = 2.0 * u0 / h_x - nu / (h_x * h_x)
    partials[:, 4] = -0.5 * u0 / h_x
    partials[:, 5] = -nu / (h_x * h_x)
    return gamma, partials


def residuals_from_footprint(pde, vals: np.ndarray, grid: UniformGrid2D, nu: float = BURGERS_NU):
    if PdeKind(pde) is PdeKind.LAPLACE:
        _require_isotropic(grid)
        return laplace_from_footprint(vals, grid.h_i)
    return burgers_from_footprint(vals, grid.h_i, grid.h_j, nu)


def residual_field(field: ScalarField, pde, nu: float = BURGERS_NU) -> np.ndarray:
    """Residuals at every collocation node of ``field``'s grid, in collocation order."""
    coll = collocation_nodes(field.grid, pde)
    offs = np.array(footprint(pde))
    idx = coll.nodes[:, None, :] + offs[None, :, :]
    vals = field.values[idx[..., 0], idx[..., 1]]
    gamma, _ = residuals_from_footprint(pde, vals, field.grid, nu)
    return gamma
