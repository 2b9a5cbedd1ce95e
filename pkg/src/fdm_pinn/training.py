"""PINN objective, training-data sampling and the training loop.

The physics term is a finite-difference residual of the network evaluated on
grid nodes, so autodiff is never applied to the network inputs.  By default
the residual gradient is pushed to every node of the stencil footprint with
the exact stencil partials (``exact_stencil_backprop``).  With it switched
off, only the stencil centre receives a gradient, ``dL_f/dGamma * kappa``,
where ``kappa`` is a fixed stand-in for ``dGamma/dV`` (1 by default, or the
stencil's centre coefficient when set to None).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigurationError, NumericError, SamplingError, TrainingError
from .grid import ScalarField, UniformGrid2D, mesh
from .mlp import MlpParams, MomentumState, backward_from_output_seeds, forward, init_mlp, sga_update
from .stencils import (BURGERS_NU, CollocationSet, PdeKind, collocation_nodes, footprint,
                       residuals_from_footprint)

ARMS = ("nn-only", "fdm-pinn")


@dataclass(frozen=True)
class TrainConfig:
    problem: str = "laplace"
    arm: str = "fdm-pinn"
    lam: float = 0.7
    gamma_mu: float = 1e-1
    gamma_f: float = 1e-4
    minibatch_mu: int = 4
    minibatch_f: int = 32
    iterations: int = 10_000
    n_ini: int = 100
    n_bc: int = 20
    seed: int = 0
    architecture: tuple[int, ...] = (2, 50, 50, 50, 1)
    momentum: float = 0.5
    kappa: float | None = 1.0  # None: the stencil's own centre coefficient
    exact_stencil_backprop: bool = True
    nu: float = BURGERS_NU

    def __post_init__(self):
        object.__setattr__(self, "architecture", tuple(int(a) for a in self.architecture))
        PdeKind(self.problem)
        if self.arm not in ARMS:
            raise ConfigurationError(f"arm must be one of {ARMS}, got {self.arm!r}")
        if self.lam < 0:
            raise ConfigurationError("lambda must be >= 0")
        if self.gamma_mu <= 0 or self.gamma_f < 0:
            raise ConfigurationError("learning rates must be gamma_mu > 0, gamma_f >= 0")
        if self.minibatch_mu < 1 or self.minibatch_f < 1:
            raise ConfigurationError("minibatch sizes must be >= 1")
        if self.iterations < 0:
            raise ConfigurationError("iterations must be >= 0")
        if self.n_ini < 0 or self.n_bc < 0 or self.n_ini + self.n_bc == 0:
            raise ConfigurationError("need at least one supervised sample")
        if self.minibatch_mu > self.n_ini + self.n_bc:
            raise ConfigurationError("minibatch_mu exceeds the number of supervised samples")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigurationError("momentum must lie in [0, 1)")

    @classmethod
    def for_problem(cls, problem: str, **overrides) -> "TrainConfig":
        """Default setup for one problem, with optional overrides."""
        if PdeKind(problem) is PdeKind.LAPLACE:
            base = dict(problem="laplace", architecture=(2, 50, 50, 50, 1),
                        minibatch_mu=4, minibatch_f=32, n_ini=100, n_bc=20, gamma_f=1e-5)
        else:
            base = dict(problem="burgers", architecture=(2, 30, 30, 30, 1),
                        minibatch_mu=8, minibatch_f=8, n_ini=100, n_bc=100, gamma_f=1e-3)
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_(self, **changes) -> "TrainConfig":
        return replace(self, **changes)


@dataclass
class SampleSet:
    inputs: np.ndarray  # (M, 2)
    targets: np.ndarray  # (M,)
    kind: str  # "initial" | "boundary" | "subsampled-truth"

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float).reshape(-1, 2)
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if len(self.inputs) != len(self.targets):
            raise ConfigurationError("inputs and targets differ in length")

    def __len__(self):
        return len(self.targets)


@dataclass
class TrainHistory:
    loss_mu: list[float] = field(default_factory=list)
    loss_f: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)
    residuals: list[np.ndarray] | None = None
    l2_trace: list[tuple[int, float]] = field(default_factory=list)
    params: MlpParams | None = None

    def __len__(self):
        return len(self.loss_mu)


def mse_loss(preds, targets) -> float:
    preds, targets = np.asarray(preds, dtype=float), np.asarray(targets, dtype=float)
    if preds.size == 0 or preds.shape != targets.shape:
        raise ConfigurationError("mse_loss needs equal-length, non-empty batches")
    return float(np.mean((preds - targets) ** 2))


def physics_loss(residuals) -> float:
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size == 0:
        raise ConfigurationError("physics_loss needs a non-empty batch")
    return float(np.mean(residuals ** 2))


def physics_seed_batch(residuals, lam: float, batch_size: int, kappa: float = 1.0) -> np.ndarray:
    """Output-space gradient at each stencil centre: ``lam * 2/B * Gamma * kappa``."""
    residuals = np.asarray(residuals, dtype=float)
    if residuals.ndim != 1 or len(residuals) != batch_size:
        raise ConfigurationError(f"expected {batch_size} residuals, got shape {residuals.shape}")
    return lam * (2.0 / batch_size) * residuals * kappa


def centre_coefficient(pde, grid: UniformGrid2D, nu: float = BURGERS_NU) -> float:
    """The residual's partial w.r.t. the centre value, frozen at ``u = 0``.

    Laplace: ``-4/h^2`` (exact, the stencil is linear).  Burgers:
    ``-3/(2 h_t) + 2 nu / h_x^2``, i.e. the linear part of the centre partial.
    """
    if PdeKind(pde) is PdeKind.LAPLACE:
        return -4.0 / (grid.h_i * grid.h_i)
    return -1.5 / grid.h_j + 2.0 * nu / (grid.h_i * grid.h_i)


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (k < extra) for k in range(parts)]


def sample_supervised_data(config: TrainConfig, ground_truth: ScalarField | None,
                           seed) -> list[SampleSet]:
    """Initial/boundary samples (and truth subsamples for Laplace), fixed per seed."""
    rng = np.random.default_rng(seed)
    sets = []
    if config.problem == "laplace":
        if ground_truth is None:
            raise SamplingError("laplace sampling needs the ground-truth field")
        grid = ground_truth.grid
        n_interior = (grid.n_i - 2) * (grid.n_j - 2)
        if config.n_ini > n_interior:
            raise SamplingError(f"n_ini={config.n_ini} exceeds {n_interior} interior nodes")
        flat = rng.choice(n_interior, size=config.n_ini, replace=False)
        ii, jj = np.divmod(flat, grid.n_j - 2)
        ii, jj = ii + 1, jj + 1
        xs, ys = grid.axis_coords(0), grid.axis_coords(1)
        sets.append(SampleSet(np.column_stack([xs[ii], ys[jj]]),
                              ground_truth.values[ii, jj], "subsampled-truth"))
        (x0, x1), (y0, y1) = grid.range_i, grid.range_j
        pts, vals = [], []
        # left, bottom, right, top with the trough's wall potentials
        for edge, count in zip(range(4), _split(config.n_bc, 4)):
            s = rng.uniform(0.0, 1.0, size=count)
            if edge == 0:
                p = np.column_stack([np.full(count, x0), y0 + s * (y1 - y0)]); v = 0.0
            elif edge == 1:
                p = np.column_stack([x0 + s * (x1 - x0), np.full(count, y0)]); v = 0.0
            elif edge == 2:
                p = np.column_stack([np.full(count, x1), y0 + s * (y1 - y0)]); v = 0.0
            else:
                p = np.column_stack([x0 + s * (x1 - x0), np.full(count, y1)]); v = 1.0
            pts.append(p)
            vals.append(np.full(count, v))
        sets.append(SampleSet(np.concatenate(pts), np.concatenate(vals), "boundary"))
    else:
        x = rng.uniform(-1.0, 1.0, size=config.n_ini)
        sets.append(SampleSet(np.column_stack([x, np.zeros_like(x)]), -np.sin(np.pi * x),
                              "initial"))
        n_left, n_right = _split(config.n_bc, 2)
        t = rng.uniform(0.0, 1.0, size=n_left + n_right)
        xb = np.concatenate([np.full(n_left, -1.0), np.full(n_right, 1.0)])
        sets.append(SampleSet(np.column_stack([xb, t]), np.zeros_like(t), "boundary"))
    return sets


def predict_field(params: MlpParams, grid: UniformGrid2D) -> ScalarField:
    X, Y = mesh(grid)
    out, _ = forward(params, np.column_stack([X.ravel(), Y.ravel()]))
    bad = np.flatnonzero(~np.isfinite(out))
    if len(bad):
        raise NumericError(f"non-finite prediction at node {np.unravel_index(bad[0], grid.shape)}")
    return ScalarField(grid, out.reshape(grid.shape))


def _streams(seed: int):
    init, data, mu, f = np.random.SeedSequence(seed).spawn(4)
    return (int(init.generate_state(1)[0]), data, np.random.default_rng(mu),
            np.random.default_rng(f))


def train(config: TrainConfig, ground_truth: ScalarField,
          collocation: CollocationSet | None = None, *, eval_every: int | None = None,
          metric=None, keep_residuals: bool = False):
    """Run ``config.iterations`` steps and return ``(params, history)``.

    Each step backpropagates the supervised seeds and, for the fdm-pinn arm,
    the physics seeds of one collocation minibatch, then takes one momentum
    step.  The two learning rates are folded into the seeds, so the optimizer
    itself runs at unit rate.  Random streams for initialization, data,
    supervised minibatches and collocation minibatches are independent, so
    ``gamma_f = 0`` reproduces the nn-only trajectory exactly.
    """
    grid = ground_truth.grid
    pde = PdeKind(config.problem)
    physics = config.arm == "fdm-pinn"
    if physics:
        if collocation is None:
            collocation = collocation_nodes(grid, pde)
        if len(collocation) == 0:
            raise ConfigurationError("fdm-pinn arm needs collocation nodes")
    init_seed, data_seed, rng_mu, rng_f = _streams(config.seed)

    params = init_mlp(config.architecture, init_seed)
    state = MomentumState.zeros(params)
    samples = sample_supervised_data(config, ground_truth, data_seed)
    sup_x = np.concatenate([s.inputs for s in samples])
    sup_t = np.concatenate([s.targets for s in samples])

    if physics:
        X, Y = mesh(grid)
        coords = np.stack([X, Y], axis=-1)
        offsets = np.array(footprint(pde))
        n_fp = len(offsets)
        kappa = config.kappa if config.kappa is not None else centre_coefficient(pde, grid, config.nu)
    history = TrainHistory(residuals=[] if keep_residuals else None)
    b_mu, b_f = config.minibatch_mu, config.minibatch_f

    for it in range(config.iterations):
        t0 = time.perf_counter()
        try:
            idx = rng_mu.choice(len(sup_t), size=b_mu, replace=False)
            pred, cache = forward(params, sup_x[idx])
            err = pred - sup_t[idx]
            grads = backward_from_output_seeds(params, cache, config.gamma_mu * (2.0 / b_mu) * err)
            loss_mu = float(np.mean(err * err))
            loss_f = 0.0
            if physics:
                centres = collocation.nodes[rng_f.integers(0, len(collocation), size=b_f)]
                nodes = centres[:, None, :] + offsets[None, :, :]
                pts = coords[nodes[..., 0], nodes[..., 1]].reshape(-1, 2)
                out, cache_f = forward(params, pts)
                gamma, partials = residuals_from_footprint(pde, out.reshape(b_f, n_fp), grid,
                                                           config.nu)
                loss_f = physics_loss(gamma)
                if config.exact_stencil_backprop:
                    seeds = physics_seed_batch(gamma, config.lam, b_f)[:, None] * partials
                else:
                    seeds = np.zeros((b_f, n_fp))
                    seeds[:, 0] = physics_seed_batch(gamma, config.lam, b_f, kappa)
                g_f = backward_from_output_seeds(params, cache_f, config.gamma_f * seeds.ravel())
                for a, b in zip(grads.arrays(), g_f.arrays()):
                    a += b
                if keep_residuals:
                    history.residuals.append(gamma)
            if not (np.isfinite(loss_mu) and np.isfinite(loss_f)):
                raise NumericError(f"non-finite loss (L_mu={loss_mu}, L_f={loss_f})")
            sga_update(params, grads, state, 1.0, config.momentum)
        except NumericError as exc:
            history.params = params
            raise TrainingError(str(exc), it, history) from exc
        history.seconds.append(time.perf_counter() - t0)
        history.loss_mu.append(loss_mu)
        history.loss_f.append(loss_f)
        if eval_every and metric is not None and (it + 1) % eval_every == 0:
            history.l2_trace.append((it + 1, metric(predict_field(params, grid), ground_truth)))
    history.params = params
    return params, history
