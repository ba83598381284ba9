from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from paretomine.core import SearchSpace

MINIMIZE = "min"
MAXIMIZE = "max"


class Problem(ABC):
    """An objective function over a box-bounded parameter space.

    Subclasses implement :meth:`raw_objectives`, returning values in their
    physical orientation. :meth:`evaluate` converts them to the internal
    maximize-everything convention by negating minimized objectives.

    ``evaluate`` must be a pure function of the parameters and
    ``evaluation_seed`` so that the optimizer can call it from worker threads
    or processes.
    """

    name: str = "problem"

    def __init__(self, space: SearchSpace, senses: Sequence[str], objective_names: Sequence[str],
                 evaluation_seed: int = 0):
        senses = tuple(senses)
        for s in senses:
            if s not in (MINIMIZE, MAXIMIZE):
                raise ValueError(f"objective sense must be 'min' or 'max', got {s!r}")
        if len(objective_names) != len(senses):
            raise ValueError("one name per objective is required")
        if len(senses) < 2:
            raise ValueError("at least two objectives are required")
        self.space = space
        self.senses = senses
        self.objective_names = tuple(objective_names)
        self.evaluation_seed = int(evaluation_seed)

    @property
    def n_objectives(self) -> int:
        return len(self.senses)

    @property
    def signs(self) -> np.ndarray:
        return np.array([-1.0 if s == MINIMIZE else 1.0 for s in self.senses])

    @abstractmethod
    def raw_objectives(self, x: np.ndarray) -> np.ndarray:
        """Objective values in their declared physical orientation."""

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.signs * np.asarray(self.raw_objectives(x), dtype=float)

    def to_raw(self, internal) -> np.ndarray:
        """Undo the internal orientation (works on vectors or row-stacked arrays)."""
        return np.asarray(internal, dtype=float) * self.signs

    def params(self) -> dict:
        """Constructor arguments needed to rebuild this problem by name."""
        return {}
