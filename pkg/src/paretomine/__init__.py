"""Multi-run Pareto front analysis: optimize, aggregate, measure disparity, mine."""

from paretomine.core import (
    Front,
    SearchSpace,
    Solution,
    attains,
    dominates,
    nondominated_filter,
    weakly_dominates,
)

__version__ = "0.1.0"

__all__ = [
    "Front", "SearchSpace", "Solution", "attains", "dominates", "nondominated_filter",
    "weakly_dominates",
]
