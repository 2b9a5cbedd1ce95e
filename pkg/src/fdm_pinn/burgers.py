"""Fine-grid reference solution of the viscous Burgers problem.

``u_t + u u_x = nu u_xx`` on ``x in [-1, 1], t in [0, 1]`` with
``u(x, 0) = -sin(pi x)`` and ``u(+-1, t) = 0``.  Method of lines: second-order
central differences in x, classical RK4 in t.  The fine solve is then picked
down to the coarse evaluation grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError, RestrictionError
from .grid import ScalarField, UniformGrid2D, burgers_grid, make_grid
from .stencils import BURGERS_NU

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BurgersProblem:
    nu: float = BURGERS_NU
    x_range: tuple[float, float] = (-1.0, 1.0)
    t_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigurationError("viscosity must be positive")

    @staticmethod
    def initial(x):
        return -np.sin(np.pi * np.asarray(x, dtype=float))

    @staticmethod
    def boundary(t):
        return np.zeros_like(np.asarray(t, dtype=float))


def max_stable_dt(problem: BurgersProblem, fine_nx: int, u_max: float = 1.0) -> float:
    h = (problem.x_range[1] - problem.x_range[0]) / (fine_nx - 1)
    return min(0.4 * h * h / problem.nu, 0.4 * h / u_max)


def min_fine_nt(problem: BurgersProblem, fine_nx: int) -> int:
    span = problem.t_range[1] - problem.t_range[0]
    return math.ceil(span / max_stable_dt(problem, fine_nx)) + 1


def _rhs(u, h, nu, out):
    # interior only; the two end entries stay 0 (Dirichlet)
    ui = u[1:-1]
    out[1:-1] = (nu * (u[2:] - 2.0 * ui + u[:-2]) / (h * h)
                 - ui * (u[2:] - u[:-2]) / (2.0 * h))
    return out


def solve_burgers_fine(problem: BurgersProblem = BurgersProblem(),
                       fine_nx: int = 1009, fine_nt: int | None = None) -> ScalarField:
    """March the PDE with one RK4 step per stored time level.

    ``fine_nt`` defaults to the smallest count meeting the explicit step bound
    ``dt <= min(0.4 h^2 / nu, 0.4 h / max|u|)``.
    """
    if fine_nx < 257:
        raise ConfigurationError(f"fine_nx must be >= 257, got {fine_nx}")
    need = min_fine_nt(problem, fine_nx)
    if fine_nt is None:
        fine_nt = need
    if fine_nt < need:
        raise ConfigurationError(
            f"fine_nt={fine_nt} violates the step bound for fine_nx={fine_nx}; "
            f"need fine_nt >= {need}"
        )
    grid = make_grid(fine_nx, fine_nt, problem.x_range, problem.t_range)
    x = grid.axis_coords(0)
    h, dt, nu = grid.h_i, grid.h_j, problem.nu

    out = np.empty((fine_nx, fine_nt))
    u = problem.initial(x)
    u[0] = u[-1] = 0.0
    out[:, 0] = u
    k1, k2, k3, k4 = (np.zeros(fine_nx) for _ in range(4))
    for n in range(1, fine_nt):
        _rhs(u, h, nu, k1)
        _rhs(u + 0.5 * dt * k1, h, nu, k2)
        _rhs(u + 0.5 * dt * k2, h, nu, k3)
        _rhs(u + dt * k3, h, nu, k4)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite solution at time step {n}")
        out[:, n] = u
    return ScalarField(grid, out)


def _pickup_indices(fine_c: np.ndarray, target_c: np.ndarray, tol: float):
    h = fine_c[1] - fine_c[0]
    idx = np.rint((target_c - fine_c[0]) / h).astype(int)
    idx = np.clip(idx, 0, len(fine_c) - 1)
    mismatch = np.abs(fine_c[idx] - target_c) > tol
    return idx, mismatch


def restrict_to_grid(fine: ScalarField, target: UniformGrid2D,
                     interpolate: bool = False, tol: float = 1e-9) -> ScalarField:
    """Pick fine values at the target nodes, or bilinearly interpolate when allowed."""
    fx, ft = fine.grid.axis_coords(0), fine.grid.axis_coords(1)
    tx, tt = target.axis_coords(0), target.axis_coords(1)
    if (tx[0] < fx[0] - tol or tx[-1] > fx[-1] + tol
            or tt[0] < ft[0] - tol or tt[-1] > ft[-1] + tol):
        raise RestrictionError("target grid extends outside the fine grid")
    ix, bad_x = _pickup_indices(fx, tx, tol)
    it, bad_t = _pickup_indices(ft, tt, tol)
    if not (bad_x.any() or bad_t.any()):
        return ScalarField(target, fine.values[np.ix_(ix, it)])
    if not interpolate:
        i = int(np.argmax(bad_x)) if bad_x.any() else 0
        j = int(np.argmax(bad_t)) if bad_t.any() else 0
        raise RestrictionError(
            f"target node ({i}, {j}) at ({tx[i]}, {tt[j]}) is not a fine-grid node; "
            "enable interpolation to resample"
        )
    log.info("restricting %s onto %s by bilinear interpolation", fine, target)
    # interpolate along x for every fine time level, then along t
    along_x = np.stack([np.interp(tx, fx, fine.values[:, n]) for n in range(len(ft))], axis=1)
    values = np.stack([np.interp(tt, ft, along_x[m, :]) for m in range(len(tx))], axis=0)
    return ScalarField(target, values)


def aligned_fine_size(target: UniformGrid2D, refine: int, problem=BurgersProblem()):
    """Fine node counts whose nodes include every target node.

    ``refine`` subdivides each target x-cell; the time refinement is the
    smallest integer multiple of the target's that meets the step bound.
    """
    fine_nx = (target.n_i - 1) * refine + 1
    need = min_fine_nt(problem, fine_nx)
    m = math.ceil((need - 1) / (target.n_j - 1))
    return fine_nx, (target.n_j - 1) * m + 1


def burgers_reference(target: UniformGrid2D | None = None, refine: int = 16,
                      problem: BurgersProblem = BurgersProblem()) -> ScalarField:
    """Ground-truth field on the evaluation grid (64 x 25 by default)."""
    target = target or burgers_grid()
    nx, nt = aligned_fine_size(target, refine, problem)
    fine = solve_burgers_fine(problem, nx, nt)
    return restrict_to_grid(fine, target)


def load_field_csv(path) -> ScalarField:
    from .fieldio import read_field_csv

    return read_field_csv(path)
