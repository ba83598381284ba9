"""A one-variable biobjective problem whose whole domain is Pareto-optimal."""

from __future__ import annotations

import numpy as np

from paretomine.core import SearchSpace
from paretomine.problems.base import MAXIMIZE, Problem


def synthetic_biobjective(x) -> np.ndarray:
    """Return ``(1 - x**2, 1 - (1 - x)**2)`` for ``x`` in [0, 1]."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (1,):
        raise ValueError(f"expected a single parameter, got {x.shape[0]}")
    v = x[0]
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"x={v} outside [0, 1]")
    return np.array([1.0 - v * v, 1.0 - (1.0 - v) ** 2])


def synthetic_front_hypervolume(ref=(0.0, 0.0)) -> float:
    """Closed-form hypervolume of the analytic front against ``ref``.

    Only references with ``ref <= (0, 0)`` componentwise are supported, which
    covers every point the front can produce.
    """
    r1, r2 = float(ref[0]), float(ref[1])
    if r1 > 0.0 or r2 > 0.0:
        raise ValueError("reference must be weakly dominated by the whole front")
    # Area under f2 as a function of f1 over [0, 1] is 5/6; the remaining
    # strips below the axes are rectangles.
    return 5.0 / 6.0 + (-r1) * 1.0 + (-r2) * 1.0 + r1 * r2


class SyntheticBiobjective(Problem):
    name = "synthetic"

    def __init__(self, evaluation_seed: int = 0):
        space = SearchSpace((0.0,), (1.0,), names=("x",))
        super().__init__(space, (MAXIMIZE, MAXIMIZE), ("f1", "f2"), evaluation_seed)

    def raw_objectives(self, x):
        return synthetic_biobjective(x)
