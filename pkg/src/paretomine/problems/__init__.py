from paretomine.problems.aero import (
    AeroConstants,
    KinematicRecord,
    aero_features,
    kinematic_waveforms,
    read_kinematic_csv,
    reynolds_number,
)
from paretomine.problems.base import MAXIMIZE, MINIMIZE, Problem
from paretomine.problems.synthetic import (
    SyntheticBiobjective,
    synthetic_biobjective,
    synthetic_front_hypervolume,
)
from paretomine.problems.wta import (
    WtaModelSpec,
    WtaProblem,
    dual_selection_rate,
    wta_base_level_and_plausibility,
    wta_evaluate,
)

PROBLEMS = {
    SyntheticBiobjective.name: SyntheticBiobjective,
    WtaProblem.name: WtaProblem,
}


def make_problem(name: str, evaluation_seed: int = 0, **params) -> Problem:
    """Instantiate a registered problem by name."""
    try:
        cls = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(sorted(PROBLEMS))}") from None
    return cls(evaluation_seed=evaluation_seed, **params)


__all__ = [
    "AeroConstants", "KinematicRecord", "MAXIMIZE", "MINIMIZE", "PROBLEMS", "Problem",
    "SyntheticBiobjective", "WtaModelSpec", "WtaProblem", "aero_features",
    "dual_selection_rate", "kinematic_waveforms", "make_problem", "read_kinematic_csv",
    "reynolds_number", "synthetic_biobjective", "synthetic_front_hypervolume",
    "wta_base_level_and_plausibility", "wta_evaluate",
]
