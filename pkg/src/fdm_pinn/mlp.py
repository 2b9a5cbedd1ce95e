"""A small tanh MLP with hand-written forward and reverse passes.

Batches are rows: inputs have shape ``(B, 2)``, outputs ``(B,)``.  Weight
matrices are stored ``(out, in)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericError


@dataclass
class MlpParams:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ConfigurationError("parameter lists do not match layer_sizes")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            shape = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if w.shape != shape or b.shape != (shape[0],):
                raise ConfigurationError(
                    f"layer {k}: expected W{shape} and b({shape[0]},), got W{w.shape}, b{b.shape}"
                )

    def arrays(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def copy(self) -> "MlpParams":
        return MlpParams(self.layer_sizes, [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])

    def zeros_like(self) -> "MlpParams":
        return MlpParams(self.layer_sizes, [np.zeros_like(w) for w in self.weights],
                         [np.zeros_like(b) for b in self.biases])

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


# Gradients and momentum buffers share the parameter layout.
GradientSet = MlpParams


@dataclass
class MomentumState:
    velocity: MlpParams

    @classmethod
    def zeros(cls, params: MlpParams) -> "MomentumState":
        return cls(params.zeros_like())


@dataclass
class ForwardCache:
    activations: list[np.ndarray]  # layer inputs, activations[0] is the batch itself
    pre: list[np.ndarray] = field(default_factory=list)


def _check_sizes(layer_sizes):
    if len(layer_sizes) < 2 or layer_sizes[0] != 2 or layer_sizes[-1] != 1:
        raise ConfigurationError(
            f"layer sizes must start with 2 inputs and end with 1 output, got {list(layer_sizes)}"
        )
    if any(int(s) < 1 for s in layer_sizes):
        raise ConfigurationError("layer widths must be positive")


def init_mlp(layer_sizes, seed: int) -> MlpParams:
    """Glorot-uniform weights (``bound = sqrt(6 / (fan_in + fan_out))``), zero biases."""
    _check_sizes(layer_sizes)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(tuple(layer_sizes), weights, biases)


def _identity(z):
    return z


def forward(params: MlpParams, inputs, activation=np.tanh):
    """Outputs ``(B,)`` and the cache needed by :func:`backward_from_output_seeds`.

    ``activation`` exists so tests can swap in the identity; the training code
    never passes it.
    """
    a = np.asarray(inputs, dtype=float)
    if a.ndim != 2 or a.shape[1] != params.layer_sizes[0]:
        raise ConfigurationError(f"inputs must have shape (B, {params.layer_sizes[0]})")
    cache = ForwardCache([a])
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        cache.pre.append(z)
        a = z if k == last else activation(z)
        if not np.all(np.isfinite(a)):
            raise NumericError(f"non-finite values leaving layer {k}")
        cache.activations.append(a)
    cache.activations.pop()  # keep only layer inputs
    return a[:, 0], cache


def backward_from_output_seeds(params: MlpParams, cache: ForwardCache, seeds,
                               activation_grad=None) -> GradientSet:
    """Gradient of ``sum_b seeds[b] * output[b]`` w.r.t. every parameter.

    Seeds are summed over the batch, never averaged; loss scaling belongs in
    the seeds.  ``activation_grad`` maps the layer output to its derivative
    and defaults to tanh's ``1 - a**2`` (pass ``lambda a: 1.0`` with an
    identity forward).
    """
    seeds = np.asarray(seeds, dtype=float)
    batch = cache.activations[0].shape[0]
    if seeds.shape != (batch,):
        raise ConfigurationError(f"expected {batch} seeds, got shape {seeds.shape}")
    if activation_grad is None:
        activation_grad = _tanh_grad_from_output

    n_layers = len(params.weights)
    grad_w = [None] * n_layers
    grad_b = [None] * n_layers
    delta = seeds[:, None]  # d/dz of the last (linear) layer
    for k in range(n_layers - 1, -1, -1):
        a_in = cache.activations[k]
        grad_w[k] = delta.T @ a_in
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ params.weights[k]) * activation_grad(a_in)
    return MlpParams(params.layer_sizes, grad_w, grad_b)


def _tanh_grad_from_output(a):
    return 1.0 - a * a


def sga_update(params: MlpParams, grads: GradientSet, state: MomentumState,
               lr: float, momentum: float):
    """Heavy-ball step on the loss: ``v = m v + g; p = p - lr v`` (in place)."""
    if not lr > 0:
        raise ConfigurationError("learning rate must be positive")
    if not 0.0 <= momentum < 1.0:
        raise ConfigurationError("momentum must lie in [0, 1)")
    if grads.layer_sizes != params.layer_sizes or state.velocity.layer_sizes != params.layer_sizes:
        raise ConfigurationError("gradient / momentum shapes do not match parameters")
    for p, g, v in zip(params.arrays(), grads.arrays(), state.velocity.arrays()):
        v *= momentum
        v += g
        p -= lr * v
    if not params.is_finite():
        raise NumericError("parameter update produced non-finite values")
    return params, state
