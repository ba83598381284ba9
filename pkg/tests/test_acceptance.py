"""The ten acceptance criteria, each printed as one pass/fail line."""

import json
import time

import numpy as np
import pytest

from conftest import brute_dominates, random_front
from paretomine.aggregate import per_point_disparity
from paretomine.cli import main
from paretomine.core import Front, attains
from paretomine.indicators import hypervolume, psi0, psi1, relative_difference
from paretomine.mining import LabeledSample, balance_by_replication, cart_train, class_weights
from paretomine.nsga2 import AlgorithmConfig, fast_nondominated_sort, run
from paretomine.problems import (
    SyntheticBiobjective,
    WtaModelSpec,
    reynolds_number,
    synthetic_front_hypervolume,
    wta_evaluate,
)
from test_indicators import grid_hypervolume
from test_nsga2 import brute_ranks


def test_criterion_01_disparity_arithmetic(acceptance):
    cases = [((414.9, 393.4), 5.2), ((6267.4, 6117.3), 2.4)]
    got = [100 * relative_difference(*pair) for pair, _ in cases]
    ok = all(abs(g - want) <= 0.05 for g, (_, want) in zip(got, cases))
    acceptance(1, "relative hypervolume difference", ok,
               ", ".join(f"{g:.3f}% vs {w}%" for g, (_, w) in zip(got, cases)))


def test_criterion_02_reynolds(acceptance):
    got = [reynolds_number(u) for u in (7.5, 37.3)]
    want = [1.00e5, 4.97e5]
    err = [abs(g - w) / w for g, w in zip(got, want)]
    acceptance(2, "Reynolds numbers", max(err) <= 0.005,
               ", ".join(f"{g:.4g} (err {e:.3%})" for g, e in zip(got, err)))


def test_criterion_03_balancing(acceptance):
    samples = [LabeledSample((0.0,), "P")] * 71 + [LabeledSample((1.0,), "NP")] * 501
    counts = class_weights(balance_by_replication(samples, 7, "P"))
    acceptance(3, "replication balancing", counts == {"P": 497, "NP": 501}, f"{counts}")


def test_criterion_04_optimizer_convergence(acceptance):
    problem = SyntheticBiobjective()
    optimum = synthetic_front_hypervolume((0.0, 0.0))
    start = time.perf_counter()
    ratios = []
    for seed in range(5):
        config = AlgorithmConfig(population_size=100, generations=100, seed=seed)
        result = run(problem, problem.space, config)
        ratios.append(hypervolume(result.front, (0.0, 0.0)) / optimum)
    elapsed = time.perf_counter() - start
    ok = min(ratios) >= 0.98 and elapsed < 60
    acceptance(4, "NSGA-II reaches 98% of the analytic hypervolume", ok,
               f"worst {min(ratios):.4f}, {elapsed:.1f}s for 5 seeds")


def test_criterion_05_hypervolume_vs_grid(acceptance):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        size = int(rng.integers(1, 21))
        f = random_front(rng, size, low=0.0, high=10.0)
        exact = hypervolume(f, (0.0, 0.0))
        upper = f.objectives.max(axis=0)
        grid = grid_hypervolume(f.objectives, (0.0, 0.0), upper)
        worst = max(worst, abs(exact - grid) / exact)
    acceptance(5, "exact 2-D hypervolume vs 1000x1000 grid", worst <= 0.005,
               f"largest relative gap {worst:.4%}")


def test_criterion_06_attainment_surfaces(acceptance):
    rng = np.random.default_rng(6)
    failures = 0
    for case in range(200):
        runs = [random_front(rng, int(rng.integers(1, 12)), run=r) for r in range(2)]
        pooled = [s for r in runs for s in r.members]
        expected = {s for s in pooled
                    if not any(brute_dominates(o.objectives, s.objectives) for o in pooled)}
        if set(psi0(runs).members) != expected:
            failures += 1
            continue
        for z in psi1(runs).objectives:
            bumped = z + 1e-6
            if not all(attains(r, z) for r in runs) or all(attains(r, bumped) for r in runs):
                failures += 1
                break
    acceptance(6, "best and worst attainment surfaces on 200 two-run cases", failures == 0,
               f"{failures} failing cases")


def test_criterion_07_nondominated_sort(acceptance):
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(1, 51))
        m = int(rng.integers(2, 4))
        pts = rng.integers(0, 6, size=(n, m)).astype(float)
        if not np.array_equal(fast_nondominated_sort(pts), brute_ranks(pts)):
            mismatches += 1
    acceptance(7, "fast non-dominated sort vs brute force", mismatches == 0,
               f"{mismatches}/100 populations differ")


def test_criterion_08_cart_recovery(acceptance):
    rng = np.random.default_rng(8)
    x = np.concatenate([rng.uniform(0.0, 0.49, 100), rng.uniform(0.51, 1.0, 100)])
    labels = (x > 0.5).astype(int)
    tree = cart_train([LabeledSample((v,), int(c)) for v, c in zip(x, labels)])
    gap = (x[labels == 0].max(), x[labels == 1].min())
    in_gap = tree.root.feature == 0 and gap[0] < tree.root.threshold < gap[1]
    sigma = 1.0
    pts = np.vstack([rng.normal((0, 0), sigma, (150, 2)), rng.normal((4 * sigma, 0), sigma, (150, 2))])
    y = [0] * 150 + [1] * 150
    blobs = cart_train([LabeledSample(tuple(p), c) for p, c in zip(pts, y)])
    ok = in_gap and tree.training_accuracy == 1.0 and blobs.training_accuracy >= 0.95
    acceptance(8, "CART threshold and Gaussian cluster recovery", ok,
               f"threshold {tree.root.threshold:.4f} in gap ({gap[0]:.4f}, {gap[1]:.4f}), "
               f"accuracies {tree.training_accuracy:.3f} and {blobs.training_accuracy:.3f}")


WTA_CONFIG = """\
problem.name = wta
problem.n_inputs = 500
algorithm.population_size = 40
algorithm.generations = 20
study.runs = 3
study.seed = 1
"""


def test_criterion_09_wta_pipeline(acceptance, tmp_path, capsys):
    spec = WtaModelSpec()
    inputs = np.random.default_rng(9).random((spec.n_inputs, spec.channels))
    weights = (0.5, 0.5, 0.5, 0.5)
    ones = tuple(map(float, wta_evaluate(spec, weights, inputs, model=lambda w, s: np.ones_like(s))))
    zeros = tuple(map(float, wta_evaluate(spec, weights, inputs, model=lambda w, s: np.zeros_like(s))))
    endpoints = ones == (1.0, 0.0) and zeros == (0.0, 1.0)

    cfg = tmp_path / "wta.cfg"
    cfg.write_text(WTA_CONFIG)
    study = tmp_path / "study"
    start = time.perf_counter()
    codes = [main(["optimize", "--config", str(cfg), "--out", str(study)])]
    codes.append(main(["aggregate", str(study / "study.json")]))
    aggregate_out = capsys.readouterr().out
    codes.append(main(["analyze", str(study / "study.json")]))
    elapsed = time.perf_counter() - start

    inside = True
    for i in range(3):
        doc = json.loads((study / f"run_{i:03d}.json").read_text())
        raw = -np.array([m["objectives"] for m in doc["front"]])
        inside &= bool(np.all((raw >= 0) & (raw <= 1)))
    verdict = json.loads((study / "aggregate" / "disparity.json").read_text())["verdict"]
    ok = (endpoints and codes == [0, 0, 0] and inside and "verdict:" in aggregate_out
          and verdict in ("converged", "rerun_advised") and elapsed < 120)
    acceptance(9, "WTA endpoints and end-to-end pipeline", ok,
               f"endpoints {ones} {zeros}, exit codes {codes}, verdict {verdict}, {elapsed:.1f}s")


DET_CONFIG = """\
problem.name = synthetic
algorithm.population_size = 24
algorithm.generations = 15
study.runs = 2
study.seed = 3
"""


def test_criterion_10_determinism(acceptance, tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text(DET_CONFIG)
    for name in ("a", "b"):
        assert main(["optimize", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    identical = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)

    rng = np.random.default_rng(10)
    base = random_front(rng, 15, run=0)
    copy = Front(tuple(type(s)(s.parameters, s.objectives, run=1) for s in base.members), 2)
    disparity = per_point_disparity(psi0([base, copy]), [base, copy])
    zero = all(d == 0.0 for d in disparity)
    acceptance(10, "byte-identical reruns and zero disparity for duplicated runs", identical and zero,
               f"{len(files)} files compared, max disparity {max(disparity)}")
