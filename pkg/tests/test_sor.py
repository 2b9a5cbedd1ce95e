import math

import numpy as np
import pytest

from fdm_pinn.errors import ConfigurationError, NonConvergenceError
from fdm_pinn.grid import ScalarField, laplace_grid, mesh
from fdm_pinn.sor import (SorConfig, TroughBoundary, analytic_trough, optimal_omega, solve_trough,
                          sor_sweep)
from fdm_pinn.stencils import residual_field


def trough_start(n):
    grid = laplace_grid(n)
    v = np.zeros(grid.shape)
    TroughBoundary().apply(v)
    return ScalarField(grid, v)


def test_boundary_corners_follow_top():
    v = np.zeros((5, 5))
    TroughBoundary().apply(v)
    assert v[0, -1] == v[-1, -1] == 1.0
    assert v[0, 0] == v[-1, 0] == 0.0
    assert np.all(v[1:-1, -1] == 1.0)


def test_single_sweep_3x3():
    f, upd = sor_sweep(trough_start(3), TroughBoundary(), 1.0)
    assert f.values[1, 1] == 0.25
    assert upd == 0.25


def test_single_sweep_3x3_over_relaxed():
    f, _ = sor_sweep(trough_start(3), TroughBoundary(), 1.5)
    assert f.values[1, 1] == pytest.approx(0.375, abs=1e-15)


def test_sweep_leaves_boundary_untouched():
    f0 = trough_start(9)
    edges = f0.values.copy()
    f, _ = sor_sweep(f0, TroughBoundary(), 1.7)
    interior = np.zeros_like(edges, dtype=bool)
    interior[1:-1, 1:-1] = True
    np.testing.assert_array_equal(f.values[~interior], edges[~interior])


def test_fixed_point_has_tiny_update():
    f, _ = solve_trough(21)
    _, upd = sor_sweep(f, TroughBoundary(), optimal_omega(21))
    assert upd < 1e-8


def test_solve_3x3():
    f, sweeps = solve_trough(3, SorConfig(omega=1.0))
    assert sweeps <= 2
    assert f.values[1, 1] == 0.25


def test_centre_value_is_quarter():
    f, _ = solve_trough(41)
    assert f.values[20, 20] == pytest.approx(0.25, abs=1e-3)


def test_maximum_principle_and_residual():
    f, _ = solve_trough(41)
    inner = f.values[1:-1, 1:-1]
    assert inner.min() > 0.0 and inner.max() < 1.0
    # update < 1e-8 means |R| < 1e-8 / omega, and Gamma = 4 R / h^2
    assert np.max(np.abs(residual_field(f, "laplace"))) < 4 * 1e-8 / 0.025 ** 2


def test_sweep_count_drops_with_omega():
    counts = [solve_trough(21, SorConfig(omega=w, max_iter=10_000))[1]
              for w in (1.0, 1.5, optimal_omega(21))]
    assert counts[0] > counts[1] > counts[2]


def test_non_convergence_reports_last_update():
    with pytest.raises(NonConvergenceError) as info:
        solve_trough(41, SorConfig(omega=1.0, max_iter=3))
    assert info.value.last_update > 1e-8


@pytest.mark.parametrize("omega", [0.9, 2.0])
def test_config_validation(omega):
    with pytest.raises(ConfigurationError):
        SorConfig(omega=omega)


def test_self_convergence_41_vs_81():
    # compare on the common (41-grid) nodes, away from the discontinuous corners
    c, _ = solve_trough(41)
    f, _ = solve_trough(81)
    ff, _ = solve_trough(161)
    e_coarse = np.abs(c.values - ff.values[::4, ::4])[1:-1, 1:-5]
    e_fine = np.abs(f.values[::2, ::2] - ff.values[::4, ::4])[1:-1, 1:-5]
    ratio = e_coarse.max() / e_fine.max()
    # Richardson: (h^2 - h^2/16) / (h^2/4 - h^2/16) = 5
    assert 4.0 < ratio < 6.0


def test_analytic_centre_and_bottom():
    assert analytic_trough(0.5, 0.5, 200) == pytest.approx(0.25, abs=1e-9)
    assert analytic_trough(0.3, 0.0, 7) == 0.0
    with pytest.raises(ConfigurationError):
        analytic_trough(0.5, 0.5, 0)


def test_analytic_no_overflow_near_top():
    v = analytic_trough(np.linspace(0, 1, 11), 0.999, 5000)
    assert np.all(np.isfinite(v))


def jacobi_dense(n, sweeps):
    v = np.zeros((n, n))
    TroughBoundary().apply(v)
    for _ in range(sweeps):
        v[1:-1, 1:-1] = 0.25 * (v[:-2, 1:-1] + v[2:, 1:-1] + v[1:-1, :-2] + v[1:-1, 2:])
    return v


def test_analytic_matches_dense_jacobi():
    n = 81
    v = jacobi_dense(n, 30_000)
    assert v[40, 60] == pytest.approx(analytic_trough(0.5, 0.75, 200), abs=1e-4)


def _window_error(n):
    f, _ = solve_trough(n)
    X, Y = mesh(f.grid)
    s = (n - 1) // 40
    err = np.abs(f.values - analytic_trough(X, Y, 400))[::s, ::s]
    return err[1:-1, 1:31].max()  # 41-grid interior nodes with y <= 0.75


def test_sor_converges_to_analytic_in_fixed_window():
    e41, e81 = _window_error(41), _window_error(81)
    assert e41 < 1e-3
    assert 3.5 < e41 / e81 < 4.5
