import numpy as np
import pytest

from fdm_pinn.errors import ConfigurationError, SamplingError, TrainingError
from fdm_pinn.grid import ScalarField, burgers_grid, laplace_grid
from fdm_pinn.mlp import init_mlp
from fdm_pinn.sor import solve_trough
from fdm_pinn.stencils import collocation_nodes, residual_field
from fdm_pinn.training import (TrainConfig, centre_coefficient, mse_loss, physics_loss,
                               physics_seed_batch, predict_field, sample_supervised_data, train)


@pytest.fixture(scope="module")
def trough():
    return solve_trough(41)[0]


@pytest.fixture(scope="module")
def burgers_zero():
    g = burgers_grid()
    return ScalarField(g, np.zeros(g.shape))


def test_mse_loss():
    assert mse_loss([0.5, 2], [0.5, 2]) == 0
    assert mse_loss([1], [0]) == 1
    assert mse_loss([1, 3], [0, 1]) == 2.5
    with pytest.raises(ConfigurationError):
        mse_loss([], [])


def test_physics_loss():
    assert physics_loss([0, 0]) == 0
    assert physics_loss([2]) == 4
    assert physics_loss([1, -1, 2]) == 2
    with pytest.raises(ConfigurationError):
        physics_loss([])


def test_physics_seed_batch():
    assert physics_seed_batch([0.0], 0.7, 1)[0] == 0
    assert physics_seed_batch([1.0], 0.7, 1)[0] == pytest.approx(1.4)
    np.testing.assert_allclose(physics_seed_batch([1.0, 1.0], 1.0, 2), [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        physics_seed_batch([1.0, 2.0], 1.0, 3)


def test_centre_coefficient():
    assert centre_coefficient("laplace", laplace_grid(41)) == pytest.approx(-6400.0)
    g = burgers_grid()
    assert centre_coefficient("burgers", g) == pytest.approx(-36 + 2 * 0.01 / np.pi * (63 / 2) ** 2)


def test_problem_defaults():
    lap = TrainConfig.for_problem("laplace")
    assert lap.architecture == (2, 50, 50, 50, 1)
    assert (lap.minibatch_f, lap.minibatch_mu, lap.lam, lap.iterations) == (32, 4, 0.7, 10_000)
    bur = TrainConfig.for_problem("burgers")
    assert bur.architecture == (2, 30, 30, 30, 1)
    assert (bur.minibatch_f, bur.minibatch_mu, bur.gamma_mu) == (8, 8, 0.1)
    assert 1e-5 <= bur.gamma_f <= 1e-3 and 1e-5 <= lap.gamma_f <= 1e-3
    assert lap.exact_stencil_backprop and lap.momentum == 0.5


@pytest.mark.parametrize("bad", [dict(lam=-1), dict(minibatch_f=0), dict(arm="ad-pinn"),
                                 dict(n_ini=1, n_bc=1), dict(momentum=1.0)])
def test_config_validation(bad):
    with pytest.raises(ConfigurationError):
        TrainConfig.for_problem("laplace", **bad)


def test_laplace_sampling(trough):
    cfg = TrainConfig.for_problem("laplace", n_ini=30, n_bc=20)
    ini, bc = sample_supervised_data(cfg, trough, 5)
    assert ini.kind == "subsampled-truth" and len(ini) == 30
    assert len({tuple(p) for p in ini.inputs}) == 30
    for (x, y), v in zip(ini.inputs, ini.targets):
        i, j = trough.grid.nearest_node(x, y)
        assert 0 < i < 40 and 0 < j < 40 and v == trough.values[i, j]
    assert bc.kind == "boundary" and len(bc) == 20
    x, y = bc.inputs.T
    on_edge = [(x == 0), (y == 0), (x == 1), (y == 1)]
    assert [int(m.sum()) for m in on_edge] == [5, 5, 5, 5]
    np.testing.assert_array_equal(bc.targets[y == 1], 1.0)
    np.testing.assert_array_equal(bc.targets[y < 1], 0.0)


def test_burgers_sampling(burgers_zero):
    cfg = TrainConfig.for_problem("burgers", n_ini=10, n_bc=10)
    ini, bc = sample_supervised_data(cfg, burgers_zero, 1)
    assert len(ini) == 10 and np.all(ini.inputs[:, 1] == 0)
    np.testing.assert_allclose(ini.targets, -np.sin(np.pi * ini.inputs[:, 0]))
    assert np.all(np.abs(ini.targets) <= 1)
    assert sorted(np.unique(bc.inputs[:, 0]).tolist()) == [-1.0, 1.0]
    assert (bc.inputs[:, 0] == -1).sum() == 5 and np.all(bc.targets == 0)
    assert np.all((bc.inputs[:, 1] >= 0) & (bc.inputs[:, 1] <= 1))


def test_sampling_deterministic(trough):
    cfg = TrainConfig.for_problem("laplace", n_ini=50)
    a = sample_supervised_data(cfg, trough, 9)
    b = sample_supervised_data(cfg, trough, 9)
    for s, t in zip(a, b):
        np.testing.assert_array_equal(s.inputs, t.inputs)
        np.testing.assert_array_equal(s.targets, t.targets)


def test_sampling_too_many(trough):
    with pytest.raises(SamplingError):
        sample_supervised_data(TrainConfig.for_problem("laplace", n_ini=1522), trough, 0)


def test_predict_field_constant_nets():
    g = laplace_grid(11)
    p = init_mlp([2, 5, 1], 0).zeros_like()
    assert np.all(predict_field(p, g).values == 0)
    p.biases[-1][:] = 0.3
    f = predict_field(p, g)
    assert np.all(f.values == 0.3)
    assert np.all(residual_field(f, "laplace") == 0)


def test_nn_only_fits_constant_target():
    g = laplace_grid(41)
    truth = ScalarField(g, np.full(g.shape, 0.4))
    # a batch covering every sample is plain gradient descent: monotone for a small step
    cfg = TrainConfig.for_problem("laplace", arm="nn-only", iterations=100, n_ini=100, n_bc=0,
                             minibatch_mu=100, momentum=0.0)
    _, hist = train(cfg, truth)
    assert all(b <= a for a, b in zip(hist.loss_mu, hist.loss_mu[1:]))
    # default minibatch and momentum: noisy, but clearly decreasing
    _, hist = train(cfg.with_(minibatch_mu=4, momentum=0.9), truth)
    assert np.mean(hist.loss_mu[-20:]) < 0.5 * np.mean(hist.loss_mu[:20])


def test_zero_output_layer_has_zero_physics_loss(trough, monkeypatch):
    import fdm_pinn.training as tr

    def zero_init(sizes, seed):
        p = init_mlp(sizes, seed)
        p.weights[-1][:] = 0.0
        return p

    monkeypatch.setattr(tr, "init_mlp", zero_init)
    cfg = TrainConfig.for_problem("laplace", iterations=1)
    _, hist = train(cfg, trough)
    assert hist.loss_f[0] == 0.0


def test_history_lengths_and_residual_consistency(trough):
    cfg = TrainConfig.for_problem("laplace", iterations=30)
    _, hist = train(cfg, trough, keep_residuals=True)
    assert len(hist) == len(hist.loss_f) == len(hist.seconds) == 30
    for lf, res in zip(hist.loss_f, hist.residuals):
        assert lf == physics_loss(res)
        assert len(res) == cfg.minibatch_f


@pytest.mark.parametrize("problem", ["laplace", "burgers"])
def test_seed_determinism(problem, trough, burgers_zero):
    truth = trough if problem == "laplace" else burgers_zero
    cfg = TrainConfig.for_problem(problem, iterations=40, seed=3)
    p1, h1 = train(cfg, truth)
    p2, h2 = train(cfg, truth)
    assert h1.loss_mu == h2.loss_mu and h1.loss_f == h2.loss_f
    np.testing.assert_array_equal(p1.flat(), p2.flat())


@pytest.mark.parametrize("problem", ["laplace", "burgers"])
def test_gamma_f_zero_matches_nn_only_bitwise(problem, trough, burgers_zero):
    truth = trough if problem == "laplace" else burgers_zero
    base = TrainConfig.for_problem(problem, iterations=60, seed=4)
    p_nn, h_nn = train(base.with_(arm="nn-only"), truth)
    p_f, h_f = train(base.with_(arm="fdm-pinn", gamma_f=0.0), truth)
    np.testing.assert_array_equal(p_nn.flat(), p_f.flat())
    assert h_nn.loss_mu == h_f.loss_mu


def test_stencil_footprint_evaluations(trough, monkeypatch):
    """The network is queried exactly at the stencil nodes of each sampled centre."""
    import fdm_pinn.training as tr
    seen = []
    real_forward = tr.forward

    def spy(params, x, *a, **k):
        seen.append(np.array(x))
        return real_forward(params, x, *a, **k)

    monkeypatch.setattr(tr, "forward", spy)
    train(TrainConfig.for_problem("laplace", iterations=1), trough)
    pts = seen[1].reshape(32, 5, 2)
    h = trough.grid.h_i
    for stencil in pts:
        c = stencil[0]
        expected = c + h * np.array([[0, 0], [-1, 0], [1, 0], [0, -1], [0, 1]])
        np.testing.assert_allclose(stencil, expected, atol=1e-12)
        i, j = trough.grid.nearest_node(*c)
        assert 1 <= i <= 39 and 1 <= j <= 39


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises_with_partial_history(trough):
    cfg = TrainConfig.for_problem("laplace", iterations=200, gamma_mu=1e6, momentum=0.9)
    with pytest.raises(TrainingError) as info:
        train(cfg, trough)
    hist = info.value.history
    assert hist is not None and len(hist) == info.value.iteration
    assert all(np.isfinite(hist.loss_mu))


def test_fdm_arm_requires_collocation(trough):
    from fdm_pinn.stencils import CollocationSet, PdeKind
    empty = CollocationSet(PdeKind.LAPLACE, np.zeros((0, 2), dtype=int))
    with pytest.raises(ConfigurationError):
        train(TrainConfig.for_problem("laplace", iterations=1), trough, empty)


def test_eval_trace(trough):
    from fdm_pinn.metrics import l2_laplace
    _, hist = train(TrainConfig.for_problem("laplace", iterations=20), trough,
                    eval_every=10, metric=l2_laplace)
    assert [k for k, _ in hist.l2_trace] == [10, 20]


def test_centre_only_seed_uses_kappa(trough, monkeypatch):
    import fdm_pinn.training as tr
    seen = []
    real = tr.physics_seed_batch
    monkeypatch.setattr(tr, "physics_seed_batch",
                        lambda g, lam, b, kappa=1.0: seen.append(kappa) or real(g, lam, b, kappa))
    base = TrainConfig.for_problem("laplace", iterations=1, exact_stencil_backprop=False)
    train(base, trough)
    train(base.with_(kappa=None), trough)
    assert seen == [1.0, pytest.approx(-4 * 40 ** 2)]
