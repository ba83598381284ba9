"""Objective/parameter containers, Pareto dominance and non-dominated filtering.

All objectives are handled in a single internal orientation: larger is better.
Problems that minimize a quantity store it negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


def _as_vector(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def _check_same_length(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise ValueError(f"objective vectors differ in length: {len(a)} != {len(b)}")


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Return True if ``a`` Pareto-dominates ``b`` (maximization).

    ``a`` must be no worse than ``b`` in every objective and strictly better
    in at least one.
    """
    _check_same_length(a, b)
    strictly = False
    for ai, bi in zip(a, b):
        if ai < bi:
            return False
        if ai > bi:
            strictly = True
    return strictly


def weakly_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Return True if ``a`` dominates ``b`` or equals it componentwise."""
    _check_same_length(a, b)
    return all(ai >= bi for ai, bi in zip(a, b))


@dataclass(frozen=True)
class SearchSpace:
    """Box bounds for a real parameter vector."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    names: tuple[str, ...] = ()
    units: tuple[str, ...] = ()

    def __post_init__(self):
        lower = _as_vector(self.lower)
        upper = _as_vector(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper bounds must be non-empty and of equal length")
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"bound {i} is not finite")
            if not lo < hi:
                raise ValueError(f"bound {i}: lower {lo} is not below upper {hi}")
        names = tuple(self.names) or tuple(f"x{i}" for i in range(len(lower)))
        if len(names) != len(lower):
            raise ValueError("names must match the number of dimensions")
        object.__setattr__(self, "names", names)
        units = tuple(self.units) or ("",) * len(lower)
        if len(units) != len(lower):
            raise ValueError("units must match the number of dimensions")
        object.__setattr__(self, "units", units)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    def contains(self, x: Sequence[float]) -> bool:
        if len(x) != self.dim:
            return False
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))

    def clip(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower_array, self.upper_array)


@dataclass(frozen=True)
class Solution:
    """A parameter vector together with its (internally oriented) objectives.

    ``run``, ``generation`` and ``evaluation`` record where the solution came
    from; they take part in equality so that identical points produced by
    different runs remain distinct members of a merged front.
    """

    parameters: tuple[float, ...]
    objectives: tuple[float, ...]
    run: int | None = None
    generation: int | None = None
    evaluation: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "parameters", _as_vector(self.parameters))
        objectives = _as_vector(self.objectives)
        if len(objectives) < 1:
            raise ValueError("a solution needs at least one objective")
        if not all(math.isfinite(v) for v in objectives):
            raise ValueError(f"non-finite objective vector {objectives}")
        object.__setattr__(self, "objectives", objectives)


@dataclass(frozen=True)
class Front:
    """A set of mutually non-dominated solutions.

    Construct fronts with :func:`nondominated_filter` unless the members are
    already known to be non-dominated; the constructor does not re-check.
    """

    members: tuple[Solution, ...]
    n_objectives: int
    _objectives: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        for s in members:
            if len(s.objectives) != self.n_objectives:
                raise ValueError(
                    f"member has {len(s.objectives)} objectives, front declares {self.n_objectives}"
                )
        arr = np.array([s.objectives for s in members], dtype=float).reshape(len(members), self.n_objectives)
        arr.setflags(write=False)
        object.__setattr__(self, "_objectives", arr)

    @classmethod
    def empty(cls, n_objectives: int) -> "Front":
        return cls((), n_objectives)

    @property
    def objectives(self) -> np.ndarray:
        """Read-only ``(len, n_objectives)`` array of member objectives."""
        return self._objectives

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def is_mutually_nondominated(self) -> bool:
        pts = self.objectives
        return not dominance_matrix(pts).any()


def dominance_matrix(points: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true iff point i dominates point j."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    geq = (pts[:, None, :] >= pts[None, :, :]).all(axis=2)
    gt = (pts[:, None, :] > pts[None, :, :]).any(axis=2)
    return geq & gt


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Mask of rows not dominated by any other row."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    # Chunked to bound memory on large unions.
    n = len(pts)
    mask = np.ones(n, dtype=bool)
    chunk = max(1, 4_000_000 // max(1, n * pts.shape[1]))
    for start in range(0, n, chunk):
        block = pts[start:start + chunk]
        geq = (pts[:, None, :] >= block[None, :, :]).all(axis=2)
        gt = (pts[:, None, :] > block[None, :, :]).any(axis=2)
        mask[start:start + chunk] = ~(geq & gt).any(axis=0)
    return mask


def nondominated_filter(solutions: Iterable[Solution], n_objectives: int | None = None) -> Front:
    """Keep exactly the solutions not dominated by another input solution.

    Input order is preserved. Solutions with equal objective vectors do not
    dominate each other, so all of them are kept.
    """
    sols = tuple(solutions)
    if not sols:
        if n_objectives is None:
            raise ValueError("n_objectives is required for an empty input")
        return Front.empty(n_objectives)
    n = len(sols[0].objectives)
    if n_objectives is not None and n != n_objectives:
        raise ValueError(f"expected {n_objectives} objectives, got {n}")
    if any(len(s.objectives) != n for s in sols):
        raise ValueError("solutions have inconsistent objective counts")
    mask = nondominated_mask(np.array([s.objectives for s in sols]))
    return Front(tuple(s for s, keep in zip(sols, mask) if keep), n)


def attains(front: Front | Iterable[Solution], z: Sequence[float]) -> bool:
    """True if some member of ``front`` weakly dominates ``z``."""
    if isinstance(front, Front):
        pts = front.objectives
    else:
        pts = np.array([s.objectives for s in front], dtype=float)
    z = np.asarray(z, dtype=float)
    if len(pts) == 0:
        return False
    if pts.shape[1] != z.shape[0]:
        raise ValueError(f"objective vectors differ in length: {pts.shape[1]} != {z.shape[0]}")
    return bool((pts >= z).all(axis=1).any())
