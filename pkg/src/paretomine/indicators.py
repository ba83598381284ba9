"""Attainment, hypervolume and reference points over single fronts and run sets."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from paretomine.core import Front, Solution, nondominated_filter, nondominated_mask


class UnsupportedDimensionError(ValueError):
    pass


def _check_runs(runs: Sequence[Front]) -> tuple[Front, ...]:
    runs = tuple(runs)
    if not runs:
        raise ValueError("at least one run is required")
    n = runs[0].n_objectives
    if any(r.n_objectives != n for r in runs):
        raise ValueError("runs disagree on the number of objectives")
    return runs


def _points(front) -> np.ndarray:
    if isinstance(front, Front):
        return front.objectives
    arr = np.asarray(front, dtype=float)
    return arr.reshape(len(arr), -1) if arr.size else arr.reshape(0, 0)


def empirical_attainment(z, runs: Sequence[Front]) -> float:
    """Fraction of runs holding at least one point that weakly dominates ``z``."""
    runs = _check_runs(runs)
    z = np.asarray(z, dtype=float)
    if z.shape != (runs[0].n_objectives,):
        raise ValueError(f"z has {z.size} components, runs have {runs[0].n_objectives}")
    hits = sum(bool(len(r) and (r.objectives >= z).all(axis=1).any()) for r in runs)
    return hits / len(runs)


def psi0(runs: Sequence[Front]) -> Front:
    """Best attainment surface: the non-dominated points of all runs pooled."""
    runs = _check_runs(runs)
    pooled = [s for r in runs for s in r.members]
    return nondominated_filter(pooled, runs[0].n_objectives)


def psi1(runs: Sequence[Front]) -> Front:
    """Worst attainment surface: corners of the region attained by every run.

    Exact for two objectives. A corner that coincides with an actual run
    member reuses that solution; other corners are returned as parameterless
    solutions with no provenance.
    """
    runs = _check_runs(runs)
    n = runs[0].n_objectives
    if n != 2:
        raise UnsupportedDimensionError(
            "exact worst attainment surface needs 2 objectives; use attainment_grid for more"
        )
    if any(len(r) == 0 for r in runs):
        return Front.empty(n)
    # For each run, staircase g_i(t) = max{y2 : y in run, y1 >= t}.
    stairs = []
    for r in runs:
        pts = r.objectives
        order = np.argsort(-pts[:, 0], kind="stable")
        xs = pts[order, 0]
        best = np.maximum.accumulate(pts[order, 1])
        stairs.append((xs, best))
    t_max = min(xs[0] for xs, _ in stairs)
    cand = np.unique(np.concatenate([r.objectives[:, 0] for r in runs]))
    cand = cand[cand <= t_max]

    def envelope(t: float) -> float:
        vals = []
        for xs, best in stairs:
            # last index with xs >= t (xs sorted descending)
            k = np.searchsorted(-xs, -t, side="right") - 1
            vals.append(best[k])
        return min(vals)

    corners = np.array([[t, envelope(t)] for t in cand])
    corners = corners[nondominated_mask(corners)]
    lookup: dict[tuple[float, float], Solution] = {}
    for r in runs:
        for s in r.members:
            lookup.setdefault(s.objectives, s)
    members = []
    for c in corners:
        key = (float(c[0]), float(c[1]))
        members.append(lookup.get(key) or Solution((), key))
    return Front(tuple(members), n)


def attainment_grid(runs: Sequence[Front], lower, upper, resolution: int = 50):
    """Empirical attainment evaluated on a regular grid over a bounding box.

    Works for any number of objectives; returns ``(axes, values)`` where
    ``values`` has one axis per objective.
    """
    runs = _check_runs(runs)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(lower, upper)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    flat = mesh.reshape(-1, len(axes))
    total = np.zeros(len(flat))
    for r in runs:
        if len(r) == 0:
            continue
        hit = np.zeros(len(flat), dtype=bool)
        for p in r.objectives:
            hit |= (p >= flat).all(axis=1)
        total += hit
    return axes, (total / len(runs)).reshape(mesh.shape[:-1])


def _hv2d(pts: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    area = 0.0
    prev = ref[1]
    for x1, x2 in pts[order]:
        if x2 > prev:
            area += (x1 - ref[0]) * (x2 - prev)
            prev = x2
    return float(area)


def _hv_slice(pts: np.ndarray, ref: np.ndarray) -> float:
    d = pts.shape[1]
    if len(pts) == 0:
        return 0.0
    if d == 1:
        return float(pts[:, 0].max() - ref[0])
    if d == 2:
        return _hv2d(pts, ref)
    pts = pts[nondominated_mask(pts)]
    order = np.argsort(-pts[:, -1], kind="stable")
    pts = pts[order]
    total = 0.0
    for i in range(len(pts)):
        below = pts[i + 1, -1] if i + 1 < len(pts) else ref[-1]
        height = pts[i, -1] - below
        if height > 0:
            total += height * _hv_slice(pts[: i + 1, :-1], ref[:-1])
    return float(total)


def _hv_monte_carlo(pts: np.ndarray, ref: np.ndarray, samples: int, seed: int) -> float:
    upper = pts.max(axis=0)
    box = np.prod(upper - ref)
    if box <= 0:
        return 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        size = min(100_000, samples - done)
        z = ref + rng.random((size, len(ref))) * (upper - ref)
        dominated = np.zeros(size, dtype=bool)
        for p in pts:
            dominated |= (p >= z).all(axis=1)
        hits += int(dominated.sum())
        done += size
    return float(box * hits / samples)


def hypervolume(front, reference, *, clip: bool = False, monte_carlo: bool = False,
                samples: int = 1_000_000, seed: int = 0) -> float:
    """Measure of the union of boxes spanned between ``reference`` and each point.

    Exact for up to four objectives (sweep in 2-D, slicing above). With
    ``clip=True`` points lying below the reference in some objective add
    nothing instead of raising. Beyond four objectives pass
    ``monte_carlo=True`` for a sampled estimate.
    """
    pts = _points(front)
    ref = np.asarray(reference, dtype=float)
    if len(pts) == 0:
        return 0.0
    if pts.shape[1] != ref.shape[0]:
        raise ValueError(f"reference has {ref.size} components, points have {pts.shape[1]}")
    above = (pts >= ref).all(axis=1)
    if not above.all():
        if not clip:
            bad = pts[~above][0]
            raise ValueError(f"point {tuple(bad)} lies below the reference {tuple(ref)}")
        pts = pts[above]
        if len(pts) == 0:
            return 0.0
    n = pts.shape[1]
    if monte_carlo:
        return _hv_monte_carlo(pts, ref, samples, seed)
    if n > 4:
        raise UnsupportedDimensionError(
            f"exact hypervolume is limited to 4 objectives (got {n}); pass monte_carlo=True"
        )
    if n >= 3:
        warnings.warn("hypervolume cost grows exponentially with the number of objectives",
                      RuntimeWarning, stacklevel=2)
    return _hv_slice(pts, ref)


@dataclass(frozen=True)
class ReferencePoints:
    nadirs: np.ndarray  # (r, n) per-run componentwise minima
    ideals: np.ndarray  # (r, n) per-run componentwise maxima
    conservative_nadir: np.ndarray  # (n,) componentwise max of the nadirs


def nadir(front) -> np.ndarray:
    pts = _points(front)
    if len(pts) == 0:
        raise ValueError("nadir of an empty front is undefined")
    return pts.min(axis=0)


def ideal(front) -> np.ndarray:
    pts = _points(front)
    if len(pts) == 0:
        raise ValueError("ideal of an empty front is undefined")
    return pts.max(axis=0)


def reference_points(runs: Sequence[Front]) -> ReferencePoints:
    runs = _check_runs(runs)
    nadirs = np.array([nadir(r) for r in runs])
    ideals = np.array([ideal(r) for r in runs])
    return ReferencePoints(nadirs, ideals, nadirs.max(axis=0))


def relative_difference(hv_best: float, hv_worst: float) -> float | None:
    """``(hv_best - hv_worst) / hv_best``, or ``None`` when ``hv_best`` is zero."""
    if hv_best == 0:
        return None
    return (hv_best - hv_worst) / hv_best
