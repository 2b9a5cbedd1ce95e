"""Uniform 2D grids and scalar fields stored on them.

Axis 0 (index ``i``) is the first coordinate (x for both problems), axis 1
(index ``j``) the second (y for Laplace, t for Burgers).  Field values are a
``(n_i, n_j)`` float array, so ``values[i, j]`` is node ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericError


@dataclass(frozen=True)
class UniformGrid2D:
    n_i: int
    n_j: int
    range_i: tuple[float, float]
    range_j: tuple[float, float]

    def __post_init__(self):
        if int(self.n_i) != self.n_i or int(self.n_j) != self.n_j:
            raise ConfigurationError("node counts must be integers")
        if self.n_i < 3 or self.n_j < 3:
            raise ConfigurationError(
                f"need at least 3 nodes per axis, got {self.n_i}x{self.n_j}"
            )
        for name, (lo, hi) in (("range_i", self.range_i), ("range_j", self.range_j)):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ConfigurationError(f"{name} must be a nonempty interval, got {(lo, hi)}")
        object.__setattr__(self, "range_i", (float(self.range_i[0]), float(self.range_i[1])))
        object.__setattr__(self, "range_j", (float(self.range_j[0]), float(self.range_j[1])))

    @property
    def h_i(self) -> float:
        return (self.range_i[1] - self.range_i[0]) / (self.n_i - 1)

    @property
    def h_j(self) -> float:
        return (self.range_j[1] - self.range_j[0]) / (self.n_j - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_i, self.n_j)

    def axis_coords(self, axis: int) -> np.ndarray:
        """Node coordinates along one axis; the last entry is exactly the range max."""
        lo, hi = self.range_i if axis == 0 else self.range_j
        n = self.n_i if axis == 0 else self.n_j
        h = self.h_i if axis == 0 else self.h_j
        c = lo + np.arange(n) * h
        c[-1] = hi
        return c

    def is_isotropic(self, tol: float = 1e-12) -> bool:
        return abs(self.h_i - self.h_j) <= tol

    def nearest_node(self, x: float, y: float) -> tuple[int, int]:
        i = int(round((x - self.range_i[0]) / self.h_i))
        j = int(round((y - self.range_j[0]) / self.h_j))
        return min(max(i, 0), self.n_i - 1), min(max(j, 0), self.n_j - 1)


def make_grid(n_i, n_j, range_i, range_j) -> UniformGrid2D:
    return UniformGrid2D(n_i, n_j, tuple(range_i), tuple(range_j))


def node_coords(grid: UniformGrid2D, i: int, j: int) -> tuple[float, float]:
    if not (0 <= i < grid.n_i and 0 <= j < grid.n_j):
        raise IndexError(f"node ({i}, {j}) outside {grid.n_i}x{grid.n_j} grid")
    x = grid.range_i[1] if i == grid.n_i - 1 else grid.range_i[0] + i * grid.h_i
    y = grid.range_j[1] if j == grid.n_j - 1 else grid.range_j[0] + j * grid.h_j
    return x, y


def mesh(grid: UniformGrid2D) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate arrays ``(X, Y)`` of shape ``grid.shape`` (``ij`` indexing)."""
    return np.meshgrid(grid.axis_coords(0), grid.axis_coords(1), indexing="ij")


class ScalarField:
    """A real value per grid node."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: UniformGrid2D, values):
        values = np.array(values, dtype=float)
        if values.size != grid.n_i * grid.n_j:
            raise ConfigurationError(
                f"expected {grid.n_i * grid.n_j} values for {grid.n_i}x{grid.n_j} grid, "
                f"got {values.size}"
            )
        values = values.reshape(grid.shape)
        bad = np.argwhere(~np.isfinite(values))
        if len(bad):
            i, j = bad[0]
            raise NumericError(f"non-finite value {values[i, j]} at node ({i}, {j})")
        self.grid = grid
        self.values = values

    def __getitem__(self, ij):
        return self.values[ij]

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def __eq__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"ScalarField({self.grid.n_i}x{self.grid.n_j})"


def field_from_fn(grid: UniformGrid2D, f) -> ScalarField:
    """Sample ``f(x, y)`` at every node. ``f`` is called on scalars, node by node."""
    out = np.empty(grid.shape)
    xs, ys = grid.axis_coords(0), grid.axis_coords(1)
    for i in range(grid.n_i):
        for j in range(grid.n_j):
            v = float(f(xs[i], ys[j]))
            if not np.isfinite(v):
                raise NumericError(
                    f"f returned {v} at node ({i}, {j}) = ({xs[i]}, {ys[j]})"
                )
            out[i, j] = v
    return ScalarField(grid, out)


def laplace_grid(n: int = 41) -> UniformGrid2D:
    """Unit-square trough grid."""
    return make_grid(n, n, (0.0, 1.0), (0.0, 1.0))


def burgers_grid(n_x: int = 64, n_t: int = 25) -> UniformGrid2D:
    return make_grid(n_x, n_t, (-1.0, 1.0), (0.0, 1.0))
