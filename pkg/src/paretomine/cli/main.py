"""Command line entry point: ``paretomine {optimize,aggregate,analyze,compare}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from paretomine import aggregate as agg
from paretomine import indicators
from paretomine.cli.archive import (
    MANIFEST_FORMAT,
    DataError,
    ProblemInfo,
    RunArchive,
    atomic_write,
    dumps,
    front_csv,
    load_json,
    load_runs,
    read_front_csv,
    save_archive,
)
from paretomine.cli.config import ConfigError, StudyConfig, load_config, search_space
from paretomine.core import Front
from paretomine.mining import (
    CartConfig,
    LabeledSample,
    balance_by_replication,
    cart_train,
    class_weights,
    kmeans,
    parameter_autocorrelation,
    rules_text,
    select_compromise,
    select_neighborhood,
    to_dot,
)
from paretomine.nsga2 import run as nsga2_run
from paretomine.problems import make_problem
from paretomine.problems.aero import KINEMATIC_FIELDS, AeroConstants, KinematicRecord, aero_features

logger = logging.getLogger("paretomine")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INCOMPATIBLE = 4

ANALYSES = ("autocorr", "compromise", "neighborhood", "kmeans", "cart", "wta", "aero")


class IncompatibleAnalysis(ValueError):
    pass


def _num(v) -> str:
    return "undefined" if v is None else repr(float(v))


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- optimize

def _run_one(config_dict: dict, index: int) -> dict:
    config = StudyConfig.from_dict(config_dict)
    problem = config.build_problem()
    space = search_space(config, problem)
    algo = dataclasses.replace(config.algorithm, seed=config.run_seed(index))
    start = time.perf_counter()
    result = nsga2_run(problem, space, algo, run_id=index)
    elapsed = time.perf_counter() - start
    archive = RunArchive(config_dict, ProblemInfo.from_problem(problem, space), index,
                         algo.seed, result.evaluations, result.nonfinite_evaluations, result.front)
    return {"archive": archive.to_dict(), "wall_clock": elapsed}


def cmd_optimize(args) -> int:
    config = load_config(args.config)
    if args.eval_seed is not None:
        config = dataclasses.replace(config, evaluation_seed=args.eval_seed)
    out = Path(args.out or config.output)
    out.mkdir(parents=True, exist_ok=True)
    cfg = config.to_dict()
    jobs = max(1, args.jobs)
    if jobs > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, config.runs)) as pool:
            results = list(pool.map(_run_one, [cfg] * config.runs, range(config.runs)))
    else:
        results = [_run_one(cfg, i) for i in range(config.runs)]
    entries = []
    timings = {}
    for i, res in enumerate(results):
        name = f"run_{i:03d}.json"
        archive = RunArchive.from_dict(res["archive"])
        save_archive(archive, out / name)
        entries.append({"run": i, "seed": archive.seed, "archive": name,
                        "front_size": len(archive.front), "evaluations": archive.evaluations})
        timings[name] = res["wall_clock"]
        logger.info("run %d: %d solutions, %d evaluations", i, len(archive.front), archive.evaluations)
    manifest = {
        "format": MANIFEST_FORMAT,
        "study": cfg,
        "problem": results[0]["archive"]["problem"],
        "runs": entries,
    }
    if args.timings:
        atomic_write(out / "timings.json", dumps(timings))
    atomic_write(out / "study.json", dumps(manifest))
    print(f"wrote {len(entries)} run archives and {out / 'study.json'}")
    return EXIT_OK


# ---------------------------------------------------------------- aggregate

def _study_defaults(paths) -> dict:
    for p in paths:
        doc = load_json(p)
        if "study" in doc:
            return doc["study"]
    return {}


def cmd_aggregate(args) -> int:
    archives = load_runs(args.inputs)
    info = archives[0].problem
    study = _study_defaults(args.inputs)
    threshold = args.threshold if args.threshold is not None else study.get("threshold", agg.DEFAULT_THRESHOLD)
    epsilon = args.epsilon if args.epsilon is not None else study.get("epsilon")
    normalize = args.normalize or bool(study.get("normalize_disparity", False))
    out = Path(args.out) if args.out else Path(args.inputs[0]).parent / "aggregate"
    out.mkdir(parents=True, exist_ok=True)
    runs = [a.front for a in archives]
    if any(len(r) == 0 for r in runs):
        raise DataError("a run archive holds an empty front")

    best = indicators.psi0(runs)
    atomic_write(out / "psi0.csv", front_csv(best, info))
    if len(runs) < 2:
        print(f"single run: wrote Ψ0 ({len(best)} solutions); disparity needs at least 2 runs")
        return EXIT_OK

    report = agg.disparity_report(runs, normalize=normalize)
    atomic_write(out / "psi1.csv", front_csv(report.psi1, info))
    verdict = agg.convergence_check(report, threshold)
    disparity_rows = [[s.run if s.run is not None else "", *(_num(v) for v in s.parameters),
                       *(_num(v * sg) for v, sg in zip(s.objectives, info.signs)), _num(d)]
                      for s, d in zip(report.psi0.members, report.per_point)]
    atomic_write(out / "disparity.csv", _rows_csv(
        ["run", *info.parameter_names, *info.objective_headers(), "disparity"], disparity_rows))
    doc = {
        "runs": [a.run for a in archives],
        "conservative_nadir": [float(v * s) for v, s in zip(report.eta_bar, info.signs)],
        "objectives": info.objective_headers(),
        "hv_psi0": report.hv_psi0,
        "hv_psi1": report.hv_psi1,
        "relative_difference": report.relative_difference,
        "relative_difference_defined": report.defined,
        "psi0_size": len(report.psi0),
        "psi1_size": len(report.psi1),
        "max_disparity": max(report.per_point) if report.per_point else 0.0,
        "distance": "euclidean, range-normalized" if normalize else "euclidean, raw objectives",
        "verdict": verdict.verdict.value,
        "threshold": threshold,
        "diagnostic": verdict.diagnostic,
    }
    if epsilon is not None:
        cons = agg.conservative_front(report.psi0, report.per_point, epsilon)
        atomic_write(out / "psicons.csv", front_csv(cons, info))
        doc["epsilon"] = epsilon
        doc["psicons_size"] = len(cons)
    atomic_write(out / "disparity.json", dumps(doc))
    rel = "undefined" if report.relative_difference is None else f"{report.relative_difference:.4%}"
    print(f"verdict: {verdict.verdict.value} (relative difference {rel}, threshold {threshold:.2%})")
    if verdict.diagnostic:
        print(f"note: {verdict.diagnostic}")
    return EXIT_OK


# ---------------------------------------------------------------- analyze

@dataclasses.dataclass
class _AnalysisInput:
    front: Front
    info: ProblemInfo
    labels: list | None
    problem: object | None
    study: dict


def _load_analysis_input(args) -> _AnalysisInput:
    path = Path(args.input)
    if path.suffix.lower() == ".csv":
        table = read_front_csv(path, args.label_column)
        labels = table.extra.get(args.label_column) if args.label_column else None
        return _AnalysisInput(table.front, table.info, labels, None, {})
    archives = load_runs([path])
    info = archives[0].problem
    runs = [a.front for a in archives]
    front = indicators.psi0(runs)
    study = _study_defaults([path])
    epsilon = args.epsilon if args.epsilon is not None else study.get("epsilon")
    if epsilon is not None and len(runs) >= 2:
        front = agg.conservative_front(front, agg.per_point_disparity(front, runs), epsilon)
    if args.label_column:
        raise IncompatibleAnalysis("--label-column applies to CSV input only")
    problem = make_problem(info.name, evaluation_seed=info.evaluation_seed, **info.params)
    return _AnalysisInput(front, info, None, problem, study)


def _feature_matrix(front: Front) -> np.ndarray:
    x = np.array([s.parameters for s in front.members], dtype=float)
    if x.size == 0 or x.shape[1] == 0:
        x = front.objectives.copy()
    span = x.max(axis=0) - x.min(axis=0)
    return (x - x.min(axis=0)) / np.where(span > 0, span, 1.0)


def _kinematic_records(data: _AnalysisInput, speed: str) -> list[KinematicRecord]:
    names = list(data.info.parameter_names)
    missing = [f for f in KINEMATIC_FIELDS if f not in names]
    if missing:
        raise IncompatibleAnalysis(f"aero: front lacks kinematic parameters {', '.join(missing)}")
    if speed in names:
        speed_of = lambda s: s.parameters[names.index(speed)]  # noqa: E731
    elif speed in data.info.objective_names:
        j = data.info.objective_names.index(speed)
        sign = data.info.signs[j]
        speed_of = lambda s: s.objectives[j] * sign  # noqa: E731
    else:
        raise IncompatibleAnalysis(f"aero: no parameter or objective named {speed!r}")
    idx = [names.index(f) for f in KINEMATIC_FIELDS]
    return [KinematicRecord(*(s.parameters[i] for i in idx), U=float(speed_of(s)))
            for s in data.front.members]


def cmd_analyze(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        summary, out = _analyze(args)
    notes = sorted({str(w.message) for w in caught})
    for note in notes:
        logger.warning("%s", note)
    if notes:
        summary["warnings"] = notes
    atomic_write(out / "summary.json", dumps(summary))
    print(f"analyses {', '.join(summary['analyses'])} written to {out}")
    return EXIT_OK


def _analyze(args) -> tuple[dict, Path]:
    data = _load_analysis_input(args)
    front, info = data.front, data.info
    if len(front) == 0:
        raise DataError("front is empty")
    opts = data.study.get("analysis", {})
    is_wta = info.name == "wta"
    has_kinematics = all(f in info.parameter_names for f in KINEMATIC_FIELDS)

    if args.analyses == "auto":
        wanted = ["autocorr", "compromise", "neighborhood", "kmeans"]
        if is_wta:
            wanted.append("wta")
        if is_wta or data.labels is not None:
            wanted.append("cart")
        if has_kinematics:
            wanted.append("aero")
    else:
        wanted = [a.strip() for a in args.analyses.split(",") if a.strip()]
        unknown = [a for a in wanted if a not in ANALYSES]
        if unknown:
            raise ConfigError(f"--analyses: unknown analysis {', '.join(unknown)}")

    out = Path(args.out) if args.out else Path(args.input).parent / "analysis"
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"front_size": len(front), "analyses": wanted}
    pnames = list(info.parameter_names)
    m = len(front.members[0].parameters)
    if m and len(pnames) != m:
        pnames = [f"x{i}" for i in range(m)]

    if "wta" in wanted or ("cart" in wanted and data.labels is None):
        if not is_wta:
            raise IncompatibleAnalysis(
                f"plausibility labels need the 'wta' problem, input is {info.name!r}; "
                "pass a CSV with --label-column instead")

    wta_rows = None
    if is_wta and ("wta" in wanted or "cart" in wanted):
        tol = opts.get("dual_selection_tol", 0.01)
        wta_rows = []
        for s in front.members:
            pl = data.problem.plausibility(s.parameters)
            wta_rows.append((pl, data.problem.dual_selection_rate(s.parameters, tol)))
        if "wta" in wanted:
            rows = [[s.run if s.run is not None else "", *(_num(v) for v in s.parameters),
                     _num(pl["base_level"]), _num(pl["selected_mean"]), _num(pl["unselected_mean"]),
                     "P" if pl["plausible"] else "NP", _num(rate)]
                    for s, (pl, rate) in zip(front.members, wta_rows)]
            atomic_write(out / "wta.csv", _rows_csv(
                ["run", *pnames, "base_level", "selected_mean", "unselected_mean", "class",
                 "dual_selection_rate"], rows))
            summary["plausible"] = sum(pl["plausible"] for pl, _ in wta_rows)

    if "autocorr" in wanted:
        if len(front) < 3 or m == 0:
            raise IncompatibleAnalysis("autocorr needs at least 3 solutions with parameters")
        rows = [[name, _num(parameter_autocorrelation(front, j, 0))] for j, name in enumerate(pnames)]
        atomic_write(out / "autocorrelation.csv", _rows_csv(["parameter", "lag1_autocorrelation"], rows))

    if "compromise" in wanted:
        p = args.p_norm if args.p_norm is not None else opts.get("p_norm", 2)
        choice = select_compromise(front, p)
        summary["compromise"] = {
            "p_norm": p,
            "parameters": dict(zip(pnames, choice.parameters)),
            "objectives": dict(zip(info.objective_headers(),
                                   (v * sg for v, sg in zip(choice.objectives, info.signs)))),
            "run": choice.run,
        }

    if "neighborhood" in wanted:
        j = args.neighborhood_objective if args.neighborhood_objective is not None \
            else opts.get("neighborhood_objective", 0)
        tol = args.neighborhood_tol if args.neighborhood_tol is not None \
            else opts.get("neighborhood_tolerance", 0.05)
        if not 0 <= j < front.n_objectives:
            raise ConfigError(f"--neighborhood-objective: index {j} out of range")
        sense = info.senses[j]
        hood = select_neighborhood(front, j, tol, sense=sense, stored_negated=sense == "min")
        atomic_write(out / "neighborhood.csv", front_csv(hood, dataclasses.replace(info, parameter_names=tuple(pnames))))
        summary["neighborhood"] = {"objective": info.objective_headers()[j], "rel_tol": tol,
                                   "size": len(hood)}

    if "kmeans" in wanted:
        k = args.k if args.k is not None else opts.get("k", 3)
        k = min(k, len(front))
        clusters = kmeans(_feature_matrix(front), k, seed=args.seed)
        rows = [[i, s.run if s.run is not None else "", int(c)]
                for i, (s, c) in enumerate(zip(front.members, clusters.labels))]
        atomic_write(out / "clusters.csv", _rows_csv(["index", "run", "cluster"], rows))
        summary["kmeans"] = {"k": k, "wcss": clusters.wcss, "iterations": clusters.iterations}

    if "cart" in wanted:
        if data.labels is not None:
            labels = data.labels
        elif wta_rows is not None:
            labels = ["P" if pl["plausible"] else "NP" for pl, _ in wta_rows]
        else:
            raise IncompatibleAnalysis("cart needs labels: WTA plausibility or --label-column")
        samples = [LabeledSample(s.parameters, lab) for s, lab in zip(front.members, labels)]
        raw_counts = class_weights(samples)
        factor = args.balance_factor if args.balance_factor is not None else opts.get("balance_factor")
        target = args.balance_class
        if factor is not None:
            if target is None:
                target = min(sorted(raw_counts, key=str), key=lambda c: raw_counts[c])
            samples = balance_by_replication(samples, factor, target)
        effective = class_weights(samples)
        cart_opts = opts.get("cart", {})
        tree = cart_train(samples, CartConfig(**cart_opts) if cart_opts else CartConfig(), pnames)
        atomic_write(out / "tree.dot", to_dot(tree))
        atomic_write(out / "rules.txt", rules_text(tree))
        summary["cart"] = {
            "class_counts": {str(k): v for k, v in sorted(raw_counts.items(), key=lambda kv: str(kv[0]))},
            "balance_factor": factor,
            "balanced_class": target,
            "effective_counts": {str(k): v for k, v in sorted(effective.items(), key=lambda kv: str(kv[0]))},
            "training_accuracy": tree.training_accuracy,
            "depth": tree.depth,
        }

    if "aero" in wanted:
        consts = AeroConstants()
        records = _kinematic_records(data, args.speed_column)
        rows = []
        for rec in records:
            f = aero_features(rec, consts)
            rows.append([_num(rec.U), *(_num(f[k]) for k in ("Re", "St", "k", "kappa1", "kappa2"))])
        atomic_write(out / "aero_features.csv", _rows_csv(["U", "Re", "St", "k", "kappa1", "kappa2"], rows))

    return summary, out


# ---------------------------------------------------------------- compare

def _raw_point(s, info) -> list[float]:
    return [float(v * sg) for v, sg in zip(s.objectives, info.signs)]


def cmd_compare(args) -> int:
    a_runs = load_runs([args.first])
    b_runs = load_runs([args.second])
    ia, ib = a_runs[0].problem, b_runs[0].problem
    if ia.senses != ib.senses:
        raise DataError(f"objective orientation differs: {ia.senses} vs {ib.senses}")
    if ia.objective_names != ib.objective_names:
        logger.warning("objective names differ: %s vs %s", ia.objective_names, ib.objective_names)
    a = indicators.psi0([r.front for r in a_runs])
    b = indicators.psi0([r.front for r in b_runs])
    result = agg.front_compare(a, b)
    doc = {
        "verdict": result.verdict.value,
        "objectives": ia.objective_headers(),
        "witnesses_first": [_raw_point(s, ia) for s in result.witnesses_first],
        "witnesses_second": [_raw_point(s, ib) for s in result.witnesses_second],
    }
    print(f"verdict: {result.verdict.value}")
    if result.verdict is agg.Comparison.INCOMPARABLE:
        print(f"undominated in first: {len(result.witnesses_first)}; "
              f"undominated in second: {len(result.witnesses_second)}")
        for label, pts in (("first", doc["witnesses_first"]), ("second", doc["witnesses_second"])):
            for p in pts[:5]:
                print(f"  {label}: {p}")
    if args.out:
        atomic_write(Path(args.out), dumps(doc))
    return EXIT_OK


# ---------------------------------------------------------------- plumbing

def _p_norm(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    if value not in (1, 2):
        raise argparse.ArgumentTypeError("p-norm must be 1, 2 or inf")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paretomine", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run seeded NSGA-II studies")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--eval-seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--timings", action="store_true", help="also write wall-clock times to timings.json")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("aggregate", help="attainment surfaces, disparity and convergence verdict")
    p.add_argument("inputs", nargs="+", help="a study manifest or run archives")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--normalize", action="store_true", help="range-normalize objectives for disparity")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("analyze", help="mine an aggregated front")
    p.add_argument("input", help="a study manifest or a front CSV")
    p.add_argument("--analyses", default="auto", help=f"comma list from {', '.join(ANALYSES)}")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="k-means seeding")
    p.add_argument("--p-norm", type=_p_norm, default=None)
    p.add_argument("--balance-factor", type=int, default=None)
    p.add_argument("--balance-class", default=None)
    p.add_argument("--label-column", default=None)
    p.add_argument("--neighborhood-objective", type=int, default=None)
    p.add_argument("--neighborhood-tol", type=float, default=None)
    p.add_argument("--speed-column", default="U")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="compare the best fronts of two studies")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IncompatibleAnalysis as exc:
        print(f"incompatible analysis: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
