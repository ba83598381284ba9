"""Study configuration: flat ``dotted.key = value`` text files.

Example::

    # three seeded runs on the synthetic problem
    problem.name = synthetic
    algorithm.population_size = 100
    algorithm.generations = 100
    study.runs = 3
    study.seed = 7

Lists are comma separated. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from paretomine.mining.cart import CartConfig
from paretomine.nsga2 import AlgorithmConfig
from paretomine.problems import PROBLEMS, Problem, make_problem


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class AnalysisOptions:
    k: int = 3
    cart: CartConfig = CartConfig()
    p_norm: float = 2.0
    neighborhood_tolerance: float = 0.05
    neighborhood_objective: int = 0
    balance_factor: int | None = None
    dual_selection_tol: float = 0.01


@dataclass(frozen=True)
class StudyConfig:
    problem: str
    problem_params: dict = field(default_factory=dict)
    evaluation_seed: int = 0
    lower: tuple | None = None
    upper: tuple | None = None
    algorithm: AlgorithmConfig = AlgorithmConfig()
    runs: int = 1
    seed: int = 0
    output: str = "study"
    threshold: float = 0.05
    epsilon: float | None = None
    normalize_disparity: bool = False
    analysis: AnalysisOptions = AnalysisOptions()

    def run_seed(self, index: int) -> int:
        # adding runs never perturbs existing ones
        return self.seed + index

    def build_problem(self) -> Problem:
        return make_problem(self.problem, evaluation_seed=self.evaluation_seed, **self.problem_params)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lower"] = list(self.lower) if self.lower is not None else None
        d["upper"] = list(self.upper) if self.upper is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        d = dict(d)
        d["algorithm"] = AlgorithmConfig(**d["algorithm"])
        analysis = dict(d["analysis"])
        analysis["cart"] = CartConfig(**analysis["cart"])
        d["analysis"] = AnalysisOptions(**analysis)
        for key in ("lower", "upper"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def _scalar(text: str):
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_pairs(text: str) -> dict[str, tuple[object, int]]:
    """Parse ``key = value`` lines into ``{key: (value, line_number)}``."""
    out: dict[str, tuple[object, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or any(c.isspace() for c in key):
            raise ConfigError(f"invalid key {key!r}", lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r} (first set on line {out[key][1]})", lineno, key)
        if "," in value:
            parsed = tuple(_scalar(v.strip()) for v in value.split(","))
        else:
            parsed = _scalar(value)
        out[key] = (parsed, lineno)
    return out


_ALGO_FIELDS = {f.name for f in dataclasses.fields(AlgorithmConfig)} - {"seed"}
_CART_FIELDS = {f.name for f in dataclasses.fields(CartConfig)}
_ANALYSIS_FIELDS = {f.name for f in dataclasses.fields(AnalysisOptions)} - {"cart"}
_STUDY_KEYS = {
    "study.runs": "runs",
    "study.seed": "seed",
    "study.output": "output",
    "aggregate.threshold": "threshold",
    "aggregate.epsilon": "epsilon",
    "aggregate.normalize": "normalize_disparity",
}


def parse_config(text: str) -> StudyConfig:
    pairs = parse_pairs(text)

    def fail(msg, key):
        raise ConfigError(msg, pairs[key][1] if key in pairs else None, key)

    if "problem.name" not in pairs:
        raise ConfigError("missing required key 'problem.name'", key="problem.name")
    name = pairs["problem.name"][0]
    if name not in PROBLEMS:
        fail(f"problem.name: unknown problem {name!r} (known: {', '.join(sorted(PROBLEMS))})",
             "problem.name")

    kw: dict = {"problem": name}
    problem_params: dict = {}
    algo: dict = {}
    cart: dict = {}
    analysis: dict = {}
    for key, (value, _) in pairs.items():
        section, _, rest = key.partition(".")
        if key == "problem.name":
            continue
        if key == "problem.evaluation_seed":
            kw["evaluation_seed"] = value
        elif section == "problem":
            problem_params[rest] = value
        elif key in ("space.lower", "space.upper"):
            vals = value if isinstance(value, tuple) else (value,)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                fail(f"{key}: expected numbers", key)
            kw[rest] = tuple(float(v) for v in vals)
        elif section == "algorithm" and rest in _ALGO_FIELDS:
            algo[rest] = value
        elif key.startswith("analysis.cart.") and key[len("analysis.cart."):] in _CART_FIELDS:
            cart[key[len("analysis.cart."):]] = value
        elif section == "analysis" and rest in _ANALYSIS_FIELDS:
            analysis[rest] = value
        elif key in _STUDY_KEYS:
            kw[_STUDY_KEYS[key]] = value
        else:
            fail(f"unknown key {key!r}", key)

    def check_int(value, key, minimum):
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            fail(f"{key}: expected an integer >= {minimum}, got {value!r}", key)

    check_int(kw.get("runs", 1), "study.runs", 1)
    check_int(kw.get("seed", 0), "study.seed", 0)
    check_int(kw.get("evaluation_seed", 0), "problem.evaluation_seed", 0)
    if "output" in kw:
        kw["output"] = str(kw["output"])
    thr = kw.get("threshold", 0.05)
    if not isinstance(thr, (int, float)) or not 0 < thr < 1:
        fail(f"aggregate.threshold: expected a number in (0, 1), got {thr!r}", "aggregate.threshold")
    eps = kw.get("epsilon")
    if eps is not None and (not isinstance(eps, (int, float)) or eps < 0):
        fail(f"aggregate.epsilon: expected a non-negative number, got {eps!r}", "aggregate.epsilon")

    try:
        kw["algorithm"] = AlgorithmConfig(seed=kw.get("seed", 0), **algo)
    except (TypeError, ValueError) as exc:
        key = next((f"algorithm.{k}" for k in algo), "algorithm")
        fail(f"algorithm: {exc}", key)
    try:
        analysis_opts = AnalysisOptions(cart=CartConfig(**cart), **analysis)
    except TypeError as exc:
        raise ConfigError(f"analysis: {exc}") from None
    if analysis_opts.p_norm not in (1, 2, math.inf):
        fail("analysis.p_norm: expected 1, 2 or inf", "analysis.p_norm")
    kw["analysis"] = analysis_opts
    kw["problem_params"] = problem_params

    config = StudyConfig(**kw)
    try:
        problem = config.build_problem()
    except TypeError as exc:
        key = next((f"problem.{k}" for k in problem_params), "problem.name")
        fail(f"problem parameters: {exc}", key)
    except ValueError as exc:
        fail(f"problem parameters: {exc}", "problem.name")
    for key, bound in (("space.lower", config.lower), ("space.upper", config.upper)):
        if bound is not None and len(bound) != problem.space.dim:
            fail(f"{key}: expected {problem.space.dim} values, got {len(bound)}", key)
    try:
        search_space(config, problem)
    except ValueError as exc:
        fail(f"space: {exc}", "space.lower" if "space.lower" in pairs else "space.upper")
    return config


def search_space(config: StudyConfig, problem: Problem):
    from paretomine.core import SearchSpace

    base = problem.space
    if config.lower is None and config.upper is None:
        return base
    lower = config.lower or base.lower
    upper = config.upper or base.upper
    for lo, hi, blo, bhi in zip(lower, upper, base.lower, base.upper):
        if lo < blo or hi > bhi:
            raise ValueError("overrides must stay inside the problem's own bounds")
    return SearchSpace(lower, upper, base.names, base.units)


def load_config(path: str | Path) -> StudyConfig:
    return parse_config(Path(path).read_text())
