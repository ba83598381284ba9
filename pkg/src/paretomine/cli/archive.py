"""JSON run archives, study manifests and front CSV files."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from paretomine.core import Front, Solution

RUN_FORMAT = "paretomine.run/1"
MANIFEST_FORMAT = "paretomine.study/1"
META_COLUMNS = ("run", "generation", "evaluation")


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemInfo:
    name: str
    params: dict
    evaluation_seed: int
    objective_names: tuple[str, ...]
    senses: tuple[str, ...]
    parameter_names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @classmethod
    def from_problem(cls, problem, space) -> "ProblemInfo":
        return cls(problem.name, dict(problem.params()), problem.evaluation_seed,
                   tuple(problem.objective_names), tuple(problem.senses),
                   tuple(space.names), tuple(space.lower), tuple(space.upper))

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemInfo":
        return cls(d["name"], dict(d["params"]), int(d["evaluation_seed"]),
                   tuple(d["objective_names"]), tuple(d["senses"]),
                   tuple(d["parameter_names"]), tuple(d["lower"]), tuple(d["upper"]))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "evaluation_seed": self.evaluation_seed,
            "objective_names": list(self.objective_names),
            "senses": list(self.senses),
            "parameter_names": list(self.parameter_names),
            "lower": list(self.lower),
            "upper": list(self.upper),
        }

    @property
    def signs(self) -> np.ndarray:
        return np.array([-1.0 if s == "min" else 1.0 for s in self.senses])

    def objective_headers(self) -> list[str]:
        return [f"{n}[{s}]" for n, s in zip(self.objective_names, self.senses)]


@dataclass(frozen=True)
class RunArchive:
    study: dict
    problem: ProblemInfo
    run: int
    seed: int
    evaluations: int
    nonfinite_evaluations: int
    front: Front

    def to_dict(self) -> dict:
        return {
            "format": RUN_FORMAT,
            "study": self.study,
            "problem": self.problem.to_dict(),
            "run": self.run,
            "seed": self.seed,
            "evaluations": self.evaluations,
            "warnings": {"nonfinite_evaluations": self.nonfinite_evaluations},
            "front": [
                {
                    "parameters": list(s.parameters),
                    "objectives": list(s.objectives),
                    "generation": s.generation,
                    "evaluation": s.evaluation,
                }
                for s in self.front.members
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunArchive":
        if d.get("format") != RUN_FORMAT:
            raise DataError(f"not a run archive (format {d.get('format')!r})")
        problem = ProblemInfo.from_dict(d["problem"])
        run = int(d["run"])
        members = tuple(
            Solution(tuple(m["parameters"]), tuple(m["objectives"]), run=run,
                     generation=m.get("generation"), evaluation=m.get("evaluation"))
            for m in d["front"]
        )
        return cls(d["study"], problem, run, int(d["seed"]), int(d["evaluations"]),
                   int(d.get("warnings", {}).get("nonfinite_evaluations", 0)),
                   Front(members, len(problem.senses)))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_archive(archive: RunArchive, path: str | Path) -> None:
    atomic_write(path, dumps(archive.to_dict()))


def load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def load_archive(path: str | Path) -> RunArchive:
    try:
        return RunArchive.from_dict(load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise DataError(f"{path}: {exc}") from None
        raise DataError(f"{path}: malformed archive ({exc})") from None


def load_runs(paths) -> list[RunArchive]:
    """Load a manifest or a list of archives, ordered by run index."""
    paths = [Path(p) for p in paths]
    archives: list[RunArchive] = []
    for p in paths:
        doc = load_json(p)
        if doc.get("format") == MANIFEST_FORMAT:
            for entry in doc["runs"]:
                archives.append(load_archive(p.parent / entry["archive"]))
        else:
            archives.append(load_archive(p))
    if not archives:
        raise DataError("no runs found")
    archives.sort(key=lambda a: (a.run, a.seed))
    first = archives[0].problem
    for a in archives[1:]:
        if len(a.problem.senses) != len(first.senses):
            raise DataError(
                f"run {a.run} has {len(a.problem.senses)} objectives, run {archives[0].run} has "
                f"{len(first.senses)}"
            )
        if a.problem.senses != first.senses:
            raise DataError(f"run {a.run} declares objective senses {a.problem.senses}, "
                            f"expected {first.senses}")
    seen = set()
    for a in archives:
        if a.run in seen:
            raise DataError(f"duplicate run index {a.run}")
        seen.add(a.run)
    return archives


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def front_csv(front: Front, info: ProblemInfo) -> str:
    """One row per solution; objectives in their declared physical orientation."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(META_COLUMNS) + list(info.parameter_names) + info.objective_headers())
    signs = info.signs
    for s in front.members:
        params = [_num(v) for v in s.parameters] or [""] * len(info.parameter_names)
        raw = [_num(v * sg) for v, sg in zip(s.objectives, signs)]
        meta = ["" if v is None else str(v) for v in (s.run, s.generation, s.evaluation)]
        w.writerow(meta + params + raw)
    return buf.getvalue()


@dataclass(frozen=True)
class FrontTable:
    """A front read back from CSV, with any extra columns kept aside."""

    front: Front
    info: ProblemInfo
    extra: dict  # column name -> list of raw strings


def read_front_csv(path: str | Path, label_column: str | None = None) -> FrontTable:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty CSV")
    header, body = rows[0], rows[1:]
    obj_cols, names, senses = [], [], []
    param_cols, extra_cols = [], []
    for i, h in enumerate(header):
        if h.endswith("[min]") or h.endswith("[max]"):
            obj_cols.append(i)
            names.append(h[:-5])
            senses.append(h[-4:-1])
        elif h in META_COLUMNS:
            continue
        elif h == label_column:
            extra_cols.append(i)
        else:
            param_cols.append(i)
    if len(obj_cols) < 2:
        raise DataError(f"{path}: need at least two objective columns named like 'f1[min]'")
    if label_column is not None and label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not found")
    signs = np.array([-1.0 if s == "min" else 1.0 for s in senses])
    col = {h: i for i, h in enumerate(header)}

    def opt_int(row, name):
        if name not in col or row[col[name]] == "":
            return None
        return int(row[col[name]])

    members = []
    try:
        for row in body:
            if not row:
                continue
            raw = np.array([float(row[i]) for i in obj_cols])
            params = tuple(float(row[i]) for i in param_cols if row[i] != "")
            members.append(Solution(params, tuple(raw * signs), run=opt_int(row, "run"),
                                    generation=opt_int(row, "generation"),
                                    evaluation=opt_int(row, "evaluation")))
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: {exc}") from None
    pnames = tuple(header[i] for i in param_cols)
    info = ProblemInfo("csv", {}, 0, tuple(names), tuple(senses), pnames,
                       (), ())
    extra = {header[i]: [row[i] for row in body if row] for i in extra_cols}
    return FrontTable(Front(tuple(members), len(obj_cols)), info, extra)
