"""Successive over-relaxation for the rectangular conducting trough.

The trough is the unit square with three grounded walls and the top wall
(``y = 1``) held at unit potential.  The series solution in
:func:`analytic_trough` is kept alongside as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError, NonConvergenceError
from .grid import ScalarField, laplace_grid


@dataclass(frozen=True)
class TroughBoundary:
    v_left: float = 0.0
    v_bottom: float = 0.0
    v_right: float = 0.0
    v_top: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.v_left, self.v_bottom, self.v_right, self.v_top)):
            raise ConfigurationError("boundary values must be finite")

    def apply(self, values: np.ndarray) -> None:
        # later edges own the corners: left, bottom, right, top
        values[0, :] = self.v_left
        values[:, 0] = self.v_bottom
        values[-1, :] = self.v_right
        values[:, -1] = self.v_top


def optimal_omega(n: int) -> float:
    return 2.0 / (1.0 + math.sin(math.pi / (n - 1)))


@dataclass(frozen=True)
class SorConfig:
    omega: float
    tol: float = 1e-8
    max_iter: int = 10_000

    def __post_init__(self):
        if not 1.0 <= self.omega < 2.0:
            raise ConfigurationError(f"omega must lie in [1, 2), got {self.omega}")
        if not self.tol > 0:
            raise ConfigurationError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")

    @classmethod
    def default(cls, n: int) -> "SorConfig":
        return cls(omega=optimal_omega(n), tol=1e-8, max_iter=100 * n * n)


def sor_sweep(field: ScalarField, boundary: TroughBoundary, omega: float):
    """One lexicographic Gauss-Seidel pass over the interior, in place.

    Each node moves by ``omega * R`` with ``R = mean(neighbours) - V``.
    Edge nodes are not touched (``boundary`` is expected to be imposed already
    and is only part of the signature so callers can't forget it).
    Returns ``(field, max |omega * R|)``.
    """
    if not field.grid.is_isotropic():
        raise ConfigurationError("SOR trough solve needs an isotropic grid")
    v = field.values.tolist()
    n_i, n_j = field.grid.shape
    max_update = 0.0
    for i in range(1, n_i - 1):
        row, up, down = v[i], v[i - 1], v[i + 1]
        for j in range(1, n_j - 1):
            du = omega * (0.25 * (up[j] + down[j] + row[j - 1] + row[j + 1]) - row[j])
            row[j] += du
            if abs(du) > max_update:
                max_update = abs(du)
    if not math.isfinite(max_update):
        bad = np.argwhere(~np.isfinite(np.array(v)))
        raise DivergenceError(f"non-finite value during SOR sweep at node {tuple(bad[0])}")
    field.values[...] = v
    return field, max_update


def solve_trough(n: int = 41, config: SorConfig | None = None,
                 boundary: TroughBoundary | None = None):
    """Converged trough potential on an ``n x n`` unit grid and the sweep count."""
    if n < 3:
        raise ConfigurationError("trough grid needs n >= 3")
    config = config or SorConfig.default(n)
    boundary = boundary or TroughBoundary()
    grid = laplace_grid(n)
    values = np.zeros(grid.shape)
    boundary.apply(values)
    field = ScalarField(grid, values)
    update = math.inf
    for sweep in range(1, config.max_iter + 1):
        _, update = sor_sweep(field, boundary, config.omega)
        if update < config.tol:
            return field, sweep
    raise NonConvergenceError(
        f"SOR did not reach tol={config.tol} in {config.max_iter} sweeps "
        f"(last max update {update:.3e})",
        last_update=update,
    )


def _sinh_ratio(k, y):
    """sinh(k*pi*y) / sinh(k*pi) without overflow."""
    a = k * math.pi
    return np.exp(a * (y - 1.0)) * (-np.expm1(-2.0 * a * y)) / (-math.expm1(-2.0 * a))


def analytic_trough(x, y, n_terms: int = 200):
    """Truncated Fourier-sine series of the trough potential (scalar or array)."""
    if n_terms < 1:
        raise ConfigurationError("n_terms must be >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for k in range(1, 2 * n_terms, 2):
        total += 4.0 / (k * math.pi) * np.sin(k * math.pi * x) * _sinh_ratio(k, y)
    return total if total.ndim else float(total)
