"""Multi-run evaluation: disparity between runs, conservative fronts, front comparison."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from paretomine import indicators
from paretomine.core import Front, dominates

DEFAULT_THRESHOLD = 0.05


@dataclass(frozen=True)
class DisparityReport:
    """Hypervolume disparity between the best and worst attainment surfaces.

    ``per_point`` is aligned with ``psi0.members``. ``relative_difference`` is
    ``None`` when the best surface has zero hypervolume.
    """

    eta_bar: np.ndarray
    psi0: Front
    psi1: Front
    hv_psi0: float
    hv_psi1: float
    relative_difference: float | None
    per_point: tuple[float, ...] = field(default=())

    @property
    def defined(self) -> bool:
        return self.relative_difference is not None

    def per_point_map(self) -> dict:
        return dict(zip(self.psi0.members, self.per_point))


class Convergence(enum.Enum):
    CONVERGED = "converged"
    RERUN_ADVISED = "rerun_advised"


@dataclass(frozen=True)
class ConvergenceVerdict:
    verdict: Convergence
    relative_difference: float | None
    threshold: float
    diagnostic: str = ""


class Comparison(enum.Enum):
    FIRST_DOMINATES = "first_dominates"
    SECOND_DOMINATES = "second_dominates"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class ComparisonVerdict:
    verdict: Comparison
    # members of each front not dominated by any member of the other
    witnesses_first: tuple = ()
    witnesses_second: tuple = ()


def _objective_scale(psi0: Front, normalize: bool) -> np.ndarray:
    n = psi0.n_objectives
    if not normalize or len(psi0) == 0:
        return np.ones(n)
    span = psi0.objectives.max(axis=0) - psi0.objectives.min(axis=0)
    return np.where(span > 0, span, 1.0)


def per_point_disparity(psi0: Front, runs: Sequence[Front], normalize: bool = False) -> tuple[float, ...]:
    """For each member of ``psi0``, the largest distance to the nearest point of any run.

    Distances are Euclidean in objective space, optionally after dividing each
    objective by its range over ``psi0``.
    """
    runs = tuple(runs)
    if len(runs) < 2:
        raise ValueError("disparity needs at least two runs")
    if any(len(r) == 0 for r in runs):
        raise ValueError("a run has an empty front")
    scale = _objective_scale(psi0, normalize)
    p = psi0.objectives / scale
    worst = np.zeros(len(p))
    for r in runs:
        q = r.objectives / scale
        d = np.sqrt(((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
        worst = np.maximum(worst, d)
    return tuple(float(v) for v in worst)


def conservative_front(psi0: Front, disparity: Sequence[float], epsilon: float) -> Front:
    """Members of ``psi0`` whose disparity is at most ``epsilon``."""
    if len(disparity) != len(psi0):
        raise ValueError("disparity values must cover every member of psi0")
    keep = tuple(s for s, d in zip(psi0.members, disparity) if d <= epsilon)
    return Front(keep, psi0.n_objectives)


def disparity_report(runs: Sequence[Front], normalize: bool = False) -> DisparityReport:
    """Hypervolumes of both attainment surfaces against the conservative nadir.

    Boxes of points lying below the conservative nadir are clipped away.
    """
    runs = tuple(runs)
    if len(runs) < 2:
        raise ValueError("disparity needs at least two runs")
    refs = indicators.reference_points(runs)
    eta_bar = refs.conservative_nadir
    best = indicators.psi0(runs)
    worst = indicators.psi1(runs)
    hv0 = indicators.hypervolume(best, eta_bar, clip=True)
    hv1 = indicators.hypervolume(worst, eta_bar, clip=True)
    return DisparityReport(
        eta_bar=eta_bar,
        psi0=best,
        psi1=worst,
        hv_psi0=hv0,
        hv_psi1=hv1,
        relative_difference=indicators.relative_difference(hv0, hv1),
        per_point=per_point_disparity(best, runs, normalize),
    )


def convergence_check(runs_or_report, threshold: float = DEFAULT_THRESHOLD) -> ConvergenceVerdict:
    """Advise re-running when the surfaces' relative hypervolume gap exceeds ``threshold``."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if isinstance(runs_or_report, DisparityReport):
        rel = runs_or_report.relative_difference
    else:
        rel = disparity_report(runs_or_report).relative_difference
    return verdict_for(rel, threshold)


def verdict_for(relative_diff: float | None, threshold: float = DEFAULT_THRESHOLD) -> ConvergenceVerdict:
    if relative_diff is None or not math.isfinite(relative_diff):
        return ConvergenceVerdict(Convergence.RERUN_ADVISED, None, threshold,
                                  "best surface has zero hypervolume; difference undefined")
    if relative_diff > threshold:
        return ConvergenceVerdict(Convergence.RERUN_ADVISED, relative_diff, threshold,
                                  f"relative difference {relative_diff:.2%} above {threshold:.2%}")
    return ConvergenceVerdict(Convergence.CONVERGED, relative_diff, threshold)


def front_compare(a: Front, b: Front) -> ComparisonVerdict:
    """Whole-front comparison under strict Pareto dominance."""
    if a.n_objectives != b.n_objectives:
        raise ValueError("fronts disagree on the number of objectives")

    def undominated(xs: Front, ys: Front) -> tuple:
        return tuple(x for x in xs.members
                     if not any(dominates(y.objectives, x.objectives) for y in ys.members))

    free_a = undominated(a, b)
    free_b = undominated(b, a)
    if len(b) and not free_b:
        return ComparisonVerdict(Comparison.FIRST_DOMINATES, free_a, free_b)
    if len(a) and not free_a:
        return ComparisonVerdict(Comparison.SECOND_DOMINATES, free_a, free_b)
    return ComparisonVerdict(Comparison.INCOMPARABLE, free_a, free_b)
