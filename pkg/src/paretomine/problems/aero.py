"""Wing kinematics and the dimensionless numbers used to read flapping-flight fronts.

Angles are stored in degrees and converted inside the formulas.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

KINEMATIC_FIELDS = ("a_DI", "p_DI", "r_TWi", "a_TWi", "p_TWi", "r_TWe", "a_TWe", "p_TWe")

# Declared ranges for the eight kinematic parameters.
KINEMATIC_RANGES = {
    "a_DI": (0.0, 45.0),
    "p_DI": (0.2, 1.0),
    "r_TWi": (-22.5, 22.5),
    "a_TWi": (0.0, 45.0),
    "p_TWi": (0.0, 1.0),
    "r_TWe": (-22.5, 22.5),
    "a_TWe": (0.0, 45.0),
    "p_TWe": (0.0, 1.0),
}


@dataclass(frozen=True)
class AeroConstants:
    wingspan: float = 1.93  # m
    wing_area: float = 0.407  # m^2
    mean_chord: float = 0.2  # m
    kinematic_viscosity: float = 15e-6  # m^2/s


@dataclass(frozen=True)
class KinematicRecord:
    a_DI: float
    p_DI: float
    r_TWi: float
    a_TWi: float
    p_TWi: float
    r_TWe: float
    a_TWe: float
    p_TWe: float
    U: float

    def out_of_range(self) -> list[str]:
        """Names of kinematic fields outside their declared range."""
        bad = []
        for name, (lo, hi) in KINEMATIC_RANGES.items():
            if not lo <= getattr(self, name) <= hi:
                bad.append(name)
        return bad


def kinematic_waveforms(rec: KinematicRecord, t: float) -> dict:
    """Dihedral and twist angles (degrees) at time ``t`` seconds."""
    if rec.p_DI <= 0:
        raise ValueError("p_DI must be positive")
    phase = t / rec.p_DI
    return {
        "DI": rec.a_DI * math.sin(2 * math.pi * phase),
        "TWi": rec.r_TWi + rec.a_TWi * math.sin(2 * math.pi * (phase + rec.p_TWi)),
        "TWe": rec.r_TWe + rec.a_TWe * math.sin(2 * math.pi * (phase + rec.p_TWe)),
    }


def reynolds_number(U: float, consts: AeroConstants = AeroConstants()) -> float:
    return U * consts.mean_chord / consts.kinematic_viscosity


def aero_features(rec: KinematicRecord, consts: AeroConstants = AeroConstants()) -> dict:
    """Reynolds, Strouhal, reduced frequency and the two reduced twist frequencies."""
    if rec.U <= 0:
        raise ValueError(f"cruise speed must be positive, got {rec.U}")
    if rec.p_DI <= 0:
        raise ValueError(f"p_DI must be positive, got {rec.p_DI}")
    c = consts.mean_chord
    k = math.pi * c / (rec.U * rec.p_DI)
    return {
        "Re": reynolds_number(rec.U, consts),
        "St": math.sin(math.pi * rec.a_DI / 180) * consts.wingspan / (rec.U * rec.p_DI),
        "k": k,
        "kappa1": 2 * abs(math.pi * rec.a_TWi / 180) * k,
        "kappa2": 2 * abs(math.pi * rec.a_TWe / 180) * k,
    }


def read_kinematic_csv(path: str | Path, speed_column: str = "U") -> list[KinematicRecord]:
    """Load records from a CSV with one column per kinematic field plus speed."""
    names = [f.name for f in fields(KinematicRecord)]
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [n for n in KINEMATIC_FIELDS if n not in (reader.fieldnames or [])]
        if speed_column not in (reader.fieldnames or []):
            missing.append(speed_column)
        if missing:
            raise KeyError(f"missing columns: {', '.join(missing)}")
        for row in reader:
            values = {n: float(row[n]) for n in KINEMATIC_FIELDS}
            values["U"] = float(row[speed_column])
            records.append(KinematicRecord(**{n: values[n] for n in names}))
    return records
