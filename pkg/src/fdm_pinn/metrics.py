"""Evaluation norms and per-iteration timing."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import ScalarField

log = logging.getLogger(__name__)


def _diff(pred: ScalarField, truth: ScalarField) -> np.ndarray:
    if pred.grid != truth.grid:
        raise ConfigurationError(f"grid mismatch: {pred.grid} vs {truth.grid}")
    return pred.values - truth.values


def l2_laplace(pred: ScalarField, truth: ScalarField) -> float:
    """Root of the summed squared error over every node, boundary included."""
    return float(np.sqrt(np.sum(_diff(pred, truth) ** 2)))


def l2_burgers_slices(pred: ScalarField, truth: ScalarField) -> np.ndarray:
    """Per-time-slice L2 norm (axis 1 is time)."""
    return np.sqrt(np.sum(_diff(pred, truth) ** 2, axis=0))


def l2_burgers(pred: ScalarField, truth: ScalarField) -> float:
    """Mean over time slices of each slice's L2 norm."""
    return float(np.mean(l2_burgers_slices(pred, truth)))


def l2_for(problem: str, pred: ScalarField, truth: ScalarField) -> float:
    return l2_laplace(pred, truth) if problem == "laplace" else l2_burgers(pred, truth)


def iteration_timer(history, warn: bool = True) -> float:
    """Training-loop wall clock per iteration.

    Only the loop body is counted; setup and evaluation are timed outside it.
    """
    n = len(history.seconds)
    if n == 0:
        raise ConfigurationError("cannot time a run with zero iterations")
    if warn and n < 100:
        log.warning("timing a run of only %d iterations; expect noise", n)
    return float(np.sum(history.seconds) / n)


@dataclass
class EvalReport:
    arm: str
    l2: float
    sec_per_iter: float
    slices: list[float] = field(default_factory=list)
    fingerprint: str = ""

    def __post_init__(self):
        if self.l2 < 0:
            raise ConfigurationError("l2 must be non-negative")
