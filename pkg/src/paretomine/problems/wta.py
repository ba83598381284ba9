"""Toy winner-takes-all selection circuit.

A k-channel rate network stands in for a basal-ganglia style selection model.
Outputs are inhibitory and active by default: a channel is *selected* when its
output drops. The circuit has four bounded coupling weights:

``self_excitation``
    recurrent gain of each channel onto its own activity
``lateral_inhibition``
    inhibition received from the mean activity of the other channels
``input_gain``
    gain applied to the channel's input salience
``output_offset``
    tonic output level, i.e. the output in the absence of input

Activities follow the leaky clamped update

    a <- (1 - leak) * a + leak * clip(g * s + w_self * a / 2 - w_lat * mean_other(a), 0, 1)

and outputs are ``clip(offset - a_i + mean_other(a), 0, 1)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from paretomine.core import SearchSpace
from paretomine.problems.base import MINIMIZE, Problem

logger = logging.getLogger(__name__)

WEIGHT_NAMES = ("self_excitation", "lateral_inhibition", "input_gain", "output_offset")
WEIGHT_BOUNDS = (0.05, 1.0)

# Signature of a channel model: (weights, inputs[N, k]) -> outputs[N, k].
OutputModel = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WtaModelSpec:
    channels: int = 3
    n_inputs: int = 500
    settle_iterations: int = 100
    settle_tolerance: float = 1e-6
    leak: float = 0.5

    def __post_init__(self):
        if self.channels < 2:
            raise ValueError("a winner-takes-all circuit needs at least 2 channels")
        if self.n_inputs < 1:
            raise ValueError("n_inputs must be positive")
        if self.settle_iterations < 1:
            raise ValueError("settle_iterations must be positive")
        if not 0.0 < self.leak <= 1.0:
            raise ValueError("leak must lie in (0, 1]")


def wta_search_space() -> SearchSpace:
    lo, hi = WEIGHT_BOUNDS
    return SearchSpace((lo,) * 4, (hi,) * 4, names=WEIGHT_NAMES)


def draw_inputs(spec: WtaModelSpec, seed: int) -> np.ndarray:
    """Uniform [0, 1) salience vectors, shape ``(n_inputs, channels)``."""
    rng = np.random.default_rng(seed)
    return rng.random((spec.n_inputs, spec.channels))


def _mean_other(a: np.ndarray) -> np.ndarray:
    k = a.shape[-1]
    return (a.sum(axis=-1, keepdims=True) - a) / (k - 1)


def simulate(spec: WtaModelSpec, weights, inputs) -> tuple[np.ndarray, int]:
    """Settle the rate network for every input row.

    Returns the outputs (same shape as ``inputs``) and the number of input
    rows that had not settled when the iteration cap was reached.
    """
    w_self, w_lat, gain, offset = (float(w) for w in np.asarray(weights, dtype=float))
    s = np.atleast_2d(np.asarray(inputs, dtype=float))
    a = np.zeros_like(s)
    moving = np.ones(len(s), dtype=bool)
    for _ in range(spec.settle_iterations):
        drive = np.clip(gain * s + 0.5 * w_self * a - w_lat * _mean_other(a), 0.0, 1.0)
        new = (1.0 - spec.leak) * a + spec.leak * drive
        moving = np.abs(new - a).max(axis=1) >= spec.settle_tolerance
        a = new
        if not moving.any():
            break
    outputs = np.clip(offset - a + _mean_other(a), 0.0, 1.0)
    return outputs, int(moving.sum())


def rate_network(spec: WtaModelSpec) -> OutputModel:
    def model(weights, inputs):
        outputs, unsettled = simulate(spec, weights, inputs)
        if unsettled:
            logger.debug("%d input vectors did not settle within %d iterations",
                           unsettled, spec.settle_iterations)
        return outputs
    return model


def selection_scores(inputs, outputs) -> tuple[float, float]:
    """Raw (minimized) selection objectives from per-input channel outputs.

    ``f1`` is the mean output of the channel with the largest input; ``f2`` is
    one minus the mean output of the remaining channels.
    """
    s = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    rows = np.arange(len(s))
    sc = np.argmax(s, axis=1)
    selected = y[rows, sc]
    others = (y.sum(axis=1) - selected) / (y.shape[1] - 1)
    return float(selected.mean()), float(1.0 - others.mean())


def wta_evaluate(spec: WtaModelSpec, weights, inputs, model: OutputModel | None = None) -> np.ndarray:
    """Raw objectives ``(f1, f2)``, both to be minimized and both in [0, 1]."""
    model = model or rate_network(spec)
    outputs = model(np.asarray(weights, dtype=float), np.asarray(inputs, dtype=float))
    return np.array(selection_scores(inputs, outputs))


def base_level(spec: WtaModelSpec, weights, model: OutputModel | None = None) -> float:
    """Mean channel output when every input is zero."""
    model = model or rate_network(spec)
    zeros = np.zeros((1, spec.channels))
    return float(np.mean(model(np.asarray(weights, dtype=float), zeros)))


def wta_base_level_and_plausibility(spec: WtaModelSpec, weights, inputs,
                                    model: OutputModel | None = None) -> dict:
    """Check the circuit against its resting output.

    A solution is plausible when, on average, the selected channel fires below
    the base level and the unselected channels fire above it.
    """
    model = model or rate_network(spec)
    base = base_level(spec, weights, model)
    s = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = model(np.asarray(weights, dtype=float), s)
    rows = np.arange(len(s))
    sc = np.argmax(s, axis=1)
    selected = y[rows, sc]
    others = (y.sum(axis=1) - selected) / (y.shape[1] - 1)
    sel_mean, other_mean = float(selected.mean()), float(others.mean())
    return {
        "base_level": base,
        "selected_mean": sel_mean,
        "unselected_mean": other_mean,
        "plausible": sel_mean < base and other_mean > base,
    }


def dual_selection_rate(spec: WtaModelSpec, weights, inputs, tol: float = 0.01,
                        model: OutputModel | None = None) -> float:
    """Fraction of inputs whose two lowest outputs are closer than ``tol``."""
    model = model or rate_network(spec)
    y = np.atleast_2d(model(np.asarray(weights, dtype=float), np.asarray(inputs, dtype=float)))
    if y.shape[1] < 2:
        raise ValueError("dual selection needs at least 2 channels")
    two = np.sort(y, axis=1)[:, :2]
    return float(np.mean(two[:, 1] - two[:, 0] < tol))


class WtaProblem(Problem):
    """Biobjective tuning of the toy circuit's four weights.

    The input set is drawn once from ``evaluation_seed`` and reused for every
    candidate. With ``redraw_inputs`` each candidate instead gets inputs drawn
    from a seed derived from its parameters, which is still deterministic.
    """

    name = "wta"

    def __init__(self, channels: int = 3, n_inputs: int = 500, settle_iterations: int = 100,
                 evaluation_seed: int = 0, redraw_inputs: bool = False):
        self.spec = WtaModelSpec(channels=channels, n_inputs=n_inputs,
                                 settle_iterations=settle_iterations)
        super().__init__(wta_search_space(), (MINIMIZE, MINIMIZE), ("f1", "f2"), evaluation_seed)
        self.redraw_inputs = bool(redraw_inputs)
        self.inputs = draw_inputs(self.spec, self.evaluation_seed)

    def inputs_for(self, x) -> np.ndarray:
        if not self.redraw_inputs:
            return self.inputs
        key = np.frombuffer(np.asarray(x, dtype=np.float64).tobytes(), dtype=np.uint32)
        seq = np.random.SeedSequence([self.evaluation_seed, *key.tolist()])
        return np.random.default_rng(seq).random((self.spec.n_inputs, self.spec.channels))

    def raw_objectives(self, x):
        if not self.space.contains(x):
            raise ValueError(f"weights {x} outside {WEIGHT_BOUNDS}")
        return wta_evaluate(self.spec, x, self.inputs_for(x))

    def plausibility(self, x) -> dict:
        return wta_base_level_and_plausibility(self.spec, x, self.inputs_for(x))

    def dual_selection_rate(self, x, tol: float = 0.01) -> float:
        return dual_selection_rate(self.spec, x, self.inputs_for(x), tol)

    def params(self) -> dict:
        return {
            "channels": self.spec.channels,
            "n_inputs": self.spec.n_inputs,
            "settle_iterations": self.spec.settle_iterations,
            "redraw_inputs": self.redraw_inputs,
        }
