import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_dominates, front, objective_set, random_front, sol
from paretomine.core import Front, nondominated_filter
from paretomine.indicators import (
    UnsupportedDimensionError,
    attainment_grid,
    empirical_attainment,
    hypervolume,
    ideal,
    nadir,
    psi0,
    psi1,
    reference_points,
    relative_difference,
)


def grid_hypervolume(points, ref, upper, cells=1000):
    """Count grid cells whose centre is weakly dominated by some point."""
    pts = np.asarray(points, dtype=float)
    xs = ref[0] + (np.arange(cells) + 0.5) * (upper[0] - ref[0]) / cells
    ys = ref[1] + (np.arange(cells) + 0.5) * (upper[1] - ref[1]) / cells
    covered = np.zeros((cells, cells), dtype=bool)
    for p in pts:
        covered |= (xs[:, None] <= p[0]) & (ys[None, :] <= p[1])
    cell = (upper[0] - ref[0]) * (upper[1] - ref[1]) / cells**2
    return covered.sum() * cell


def inclusion_exclusion_hv(points, ref):
    """Exact union volume of boxes [ref, p] by inclusion-exclusion."""
    pts = [np.asarray(p, dtype=float) for p in points]
    ref = np.asarray(ref, dtype=float)
    total = 0.0
    for k in range(1, len(pts) + 1):
        for subset in itertools.combinations(pts, k):
            corner = np.min(subset, axis=0)
            total += (-1) ** (k + 1) * np.prod(np.maximum(corner - ref, 0))
    return total


# ------------------------------------------------------------ attainment

def test_empirical_attainment_examples():
    runs = [front((2, 2)), front((3, 1))]
    assert empirical_attainment((1, 1), runs) == 1.0
    assert empirical_attainment((5, 5), runs) == 0.0
    assert empirical_attainment((2, 2), runs) == 0.5


def test_empirical_attainment_needs_runs():
    with pytest.raises(ValueError):
        empirical_attainment((1, 1), [])


@given(st.integers(1, 6), st.integers(0, 10_000))
@settings(max_examples=30)
def test_attainment_takes_multiples_of_one_over_r(r, seed):
    rng = np.random.default_rng(seed)
    runs = [random_front(rng, 5) for _ in range(r)]
    z = rng.uniform(0, 10, 2)
    a = empirical_attainment(z, runs)
    assert a * r == pytest.approx(round(a * r))
    assert 0.0 <= a <= 1.0


# ------------------------------------------------------------ surfaces

def test_psi0_examples():
    single = front((1, 3), (3, 1))
    assert objective_set(psi0([single])) == objective_set(single)
    assert objective_set(psi0([front((1, 2)), front((2, 1))])) == [(1, 2), (2, 1)]
    assert objective_set(psi0([front((1, 1)), front((2, 2))])) == [(2, 2)]


def test_psi1_examples():
    single = front((1, 3), (2, 2), (3, 1))
    assert objective_set(psi1([single])) == objective_set(single)
    assert objective_set(psi1([front((1, 2)), front((2, 1))])) == [(1, 1)]
    a = front((1, 3), (3, 1))
    b = Front(tuple(sol(*s.objectives) for s in a.members), 2)
    # identical runs: both surfaces cover the same objective vectors
    assert set(objective_set(psi1([a, b]))) == set(objective_set(psi0([a, b])))


def test_psi1_reuses_run_members_and_marks_synthetic_corners():
    a, b = front((1, 2)), front((2, 1))
    corner = psi1([a, b]).members[0]
    assert corner.parameters == () and corner.run is None
    same = psi1([a, a])
    assert same.members[0] is a.members[0]


def test_psi1_rejects_more_than_two_objectives():
    with pytest.raises(UnsupportedDimensionError):
        psi1([front((1, 2, 3))])


def test_attainment_grid_for_three_objectives():
    runs = [front((2, 2, 2)), front((1, 1, 1))]
    axes, values = attainment_grid(runs, (0, 0, 0), (2, 2, 2), resolution=5)
    assert values.shape == (5, 5, 5)
    assert values[0, 0, 0] == 1.0
    assert values[-1, -1, -1] == 0.5
    assert set(np.unique(values)) <= {0.0, 0.5, 1.0}


def test_psi_surfaces_random_two_runs(rng):
    for _ in range(50):
        runs = [random_front(rng, int(rng.integers(1, 10)), run=i) for i in range(2)]
        union = [s for r in runs for s in r.members]
        oracle = {s for s in union if not any(brute_dominates(t.objectives, s.objectives) for t in union)}
        assert set(psi0(runs).members) == oracle
        for z in psi1(runs).objectives:
            assert empirical_attainment(z, runs) == 1.0
            assert empirical_attainment(z + 1e-6, runs) < 1.0


# ------------------------------------------------------------ hypervolume

def test_hypervolume_examples():
    assert hypervolume(front((2, 3)), (0, 0)) == 6.0
    pts = [(1, 3), (2, 2), (3, 1)]
    assert hypervolume(front(*pts), (0, 0)) == pytest.approx(6.0)
    # frozen from the 1000x1000 grid oracle
    assert grid_hypervolume(pts, (0, 0), (3, 3)) == pytest.approx(6.0, rel=5e-3)
    assert hypervolume(front((0, 0), (1, 1)), (0, 0)) == 1.0
    assert hypervolume(front((0, 0)), (0, 0)) == 0.0


def test_hypervolume_precondition():
    with pytest.raises(ValueError):
        hypervolume(front((1, -1)), (0, 0))
    assert hypervolume(front((1, -1), (2, 2)), (0, 0), clip=True) == 4.0


def test_hypervolume_matches_grid_oracle(rng):
    for _ in range(10):
        f = random_front(rng, int(rng.integers(1, 21)))
        exact = hypervolume(f, (0, 0))
        assert grid_hypervolume(f.objectives, (0, 0), (10, 10)) == pytest.approx(exact, rel=5e-3)


@pytest.mark.parametrize("n", [3, 4])
def test_hypervolume_higher_dimensions(rng, n):
    for _ in range(15):
        pts = rng.uniform(0, 5, size=(int(rng.integers(1, 8)), n))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            got = hypervolume(pts, np.zeros(n))
        assert got == pytest.approx(inclusion_exclusion_hv(pts, np.zeros(n)))


def test_hypervolume_dimension_limit_and_monte_carlo(rng):
    pts = rng.uniform(0, 1, size=(6, 5))
    with pytest.raises(UnsupportedDimensionError):
        hypervolume(pts, np.zeros(5))
    est = hypervolume(pts, np.zeros(5), monte_carlo=True, samples=400_000, seed=1)
    assert est == pytest.approx(inclusion_exclusion_hv(pts, np.zeros(5)), rel=0.02)


def test_hypervolume_strictly_monotone(rng):
    for _ in range(30):
        f = random_front(rng, 8)
        z = rng.uniform(0, 10, 2)
        if any(np.all(p >= z) for p in f.objectives):
            continue
        bigger = list(f.objectives) + [z]
        assert hypervolume(bigger, (0, 0)) > hypervolume(f, (0, 0))


def test_hypervolume_order_and_duplicate_invariance(rng):
    f = random_front(rng, 12)
    pts = f.objectives
    base = hypervolume(pts, (0, 0))
    assert hypervolume(pts[::-1], (0, 0)) == pytest.approx(base)
    assert hypervolume(np.vstack([pts, pts[:3]]), (0, 0)) == pytest.approx(base)


# ------------------------------------------------------------ reference points

def test_reference_points_examples():
    f = front((1, 3), (3, 1))
    assert tuple(nadir(f)) == (1, 1) and tuple(ideal(f)) == (3, 3)
    refs = reference_points([front((1, 3), (4, 2)), front((3, 1), (2, 5))])
    assert refs.nadirs.tolist() == [[1, 2], [2, 1]]
    assert tuple(refs.conservative_nadir) == (2, 2)
    single = reference_points([f])
    assert tuple(single.conservative_nadir) == (1, 1)
    with pytest.raises(ValueError):
        reference_points([Front.empty(2)])


def test_relative_difference():
    assert relative_difference(10.0, 9.0) == pytest.approx(0.1)
    assert relative_difference(0.0, 0.0) is None


def test_psi1_never_beats_psi0(rng):
    for _ in range(40):
        runs = [random_front(rng, int(rng.integers(1, 12)), run=i) for i in range(int(rng.integers(2, 5)))]
        eta = reference_points(runs).conservative_nadir
        hv0 = hypervolume(psi0(runs), eta, clip=True)
        hv1 = hypervolume(psi1(runs), eta, clip=True)
        assert hv1 <= hv0 + 1e-12
        assert psi0(runs).is_mutually_nondominated()
        for z in psi1(runs).objectives:
            assert empirical_attainment(z, runs) == 1.0
