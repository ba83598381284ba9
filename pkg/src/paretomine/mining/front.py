"""Analyses that read structure off a single front."""

from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np

from paretomine.core import Front, Solution


def order_by_objective(front: Front, objective: int = 0) -> list[Solution]:
    """Members sorted best-first on ``objective`` (internal orientation).

    Ties fall back to the remaining objectives, best-first, then to the
    parameter vector.
    """
    return sorted(front.members,
                  key=lambda s: (-s.objectives[objective], tuple(-v for v in s.objectives),
                                 s.parameters))


def parameter_autocorrelation(front: Front, parameter: int, objective: int = 0) -> float | None:
    """Lag-1 Pearson autocorrelation of a parameter walked along the front.

    Returns ``None`` when the lagged sequences have zero variance.
    """
    if len(front) < 3:
        raise ValueError("autocorrelation needs at least 3 members")
    seq = np.array([s.parameters[parameter] for s in order_by_objective(front, objective)])
    a, b = seq[:-1], seq[1:]
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        return None
    r = float(((a - a.mean()) * (b - b.mean())).mean() / (sa * sb))
    return max(-1.0, min(1.0, r))


def _norm(d: np.ndarray, p: float) -> np.ndarray:
    if math.isinf(p):
        return np.abs(d).max(axis=1) if d.shape[1] else np.zeros(len(d))
    return (np.abs(d) ** p).sum(axis=1) ** (1.0 / p)


def select_compromise(front: Front, p_norm: float = 2) -> Solution:
    """Member closest to the ideal point once objectives are scaled to [0, 1].

    Scaling uses the front's own nadir and ideal. Objectives with zero range
    are left out of the distance. Ties go to the lexicographically largest
    objective vector.
    """
    if len(front) == 0:
        raise ValueError("empty front")
    if p_norm not in (1, 2, math.inf):
        raise ValueError("p_norm must be 1, 2 or inf")
    pts = front.objectives
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = hi - lo
    live = span > 0
    if not live.all():
        warnings.warn(f"objectives {np.flatnonzero(~live).tolist()} have zero range and are ignored",
                      RuntimeWarning, stacklevel=2)
    scaled = (pts[:, live] - lo[live]) / span[live]
    dist = _norm(1.0 - scaled, p_norm)
    best = dist.min()
    tied = [s for s, d in zip(front.members, dist) if math.isclose(d, best, rel_tol=1e-12, abs_tol=1e-15)]
    return max(tied, key=lambda s: s.objectives)


def select_neighborhood(front: Front, objective: int, rel_tol: float, sense: str = "min",
                        stored_negated: bool = False) -> Front:
    """Members within ``rel_tol`` of the best value of one objective.

    The tolerance applies to the physical value: set ``stored_negated`` when
    the objective is a minimized quantity kept negated internally. ``sense``
    says whether the best physical value is the smallest or the largest.
    """
    if len(front) == 0:
        raise ValueError("empty front")
    if rel_tol < 0:
        raise ValueError("rel_tol must be non-negative")
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    v = front.objectives[:, objective] * (-1.0 if stored_negated else 1.0)
    best = v.min() if sense == "min" else v.max()
    slack = rel_tol * abs(best)
    if best == 0:
        warnings.warn("best value is zero; using rel_tol as an absolute tolerance",
                      RuntimeWarning, stacklevel=2)
        slack = rel_tol
    keep = v <= best + slack if sense == "min" else v >= best - slack
    return Front(tuple(s for s, k in zip(front.members, keep) if k), front.n_objectives)

