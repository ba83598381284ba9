"""Real-coded NSGA-II with SBX crossover and polynomial mutation."""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from paretomine.core import Front, SearchSpace, Solution, dominance_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlgorithmConfig:
    """NSGA-II settings.

    ``mutation_probability_per_variable`` of ``None`` means ``1 / m`` for an
    ``m``-dimensional search space.
    """

    population_size: int = 100
    generations: int = 100
    crossover_probability: float = 0.9
    mutation_probability_per_variable: float | None = None
    eta_c: float = 15.0
    eta_m: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be an even integer >= 4")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover_probability must lie in [0, 1]")
        pm = self.mutation_probability_per_variable
        if pm is not None and not 0.0 <= pm <= 1.0:
            raise ValueError("mutation_probability_per_variable must lie in [0, 1]")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise ValueError("distribution indices must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RankedPopulation:
    objectives: np.ndarray
    rank: np.ndarray
    crowding: np.ndarray

    def front_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.rank == k)


@dataclass
class RunResult:
    front: Front
    evaluations: int
    nonfinite_evaluations: int = 0


def fast_nondominated_sort(objectives) -> np.ndarray:
    """Pareto rank of every row (0 = non-dominated), by successive peeling."""
    pts = np.asarray(objectives, dtype=float)
    n = len(pts)
    if n == 0:
        return np.zeros(0, dtype=int)
    dom = dominance_matrix(pts)
    counts = dom.sum(axis=0)  # how many points dominate each point
    rank = np.full(n, -1, dtype=int)
    current = np.flatnonzero(counts == 0)
    k = 0
    while current.size:
        rank[current] = k
        counts = counts - dom[current].sum(axis=0)
        counts[rank >= 0] = -1
        current = np.flatnonzero(counts == 0)
        k += 1
    return rank


def crowding_distance(objectives) -> np.ndarray:
    """Crowding distance of each member of one non-dominated front.

    The first and last member in each objective's sorted order get ``inf``.
    An objective with zero range contributes 0.
    """
    pts = np.asarray(objectives, dtype=float)
    n = len(pts)
    if n < 3:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for j in range(pts.shape[1]):
        col = pts[:, j]
        order = np.argsort(col, kind="stable")
        span = col[order[-1]] - col[order[0]]
        # one member per end; duplicates of an extreme would otherwise all win
        dist[order[0]] = dist[order[-1]] = np.inf
        if span == 0:
            continue
        gaps = (col[order[2:]] - col[order[:-2]]) / span
        dist[order[1:-1]] += gaps
    return dist


def rank_population(objectives, valid=None) -> RankedPopulation:
    """Rank and crowd a population; rows flagged invalid are ranked last."""
    pts = np.asarray(objectives, dtype=float)
    n = len(pts)
    valid = np.ones(n, dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    rank = np.zeros(n, dtype=int)
    crowd = np.zeros(n)
    if valid.any():
        idx = np.flatnonzero(valid)
        rank[idx] = fast_nondominated_sort(pts[idx])
        for k in range(rank[idx].max() + 1):
            members = idx[rank[idx] == k]
            crowd[members] = crowding_distance(pts[members])
    if (~valid).any():
        rank[~valid] = (rank[valid].max() + 1) if valid.any() else 0
    return RankedPopulation(pts, rank, crowd)


def sbx_crossover(p1, p2, eta_c: float, u, space: SearchSpace | None = None):
    """Simulated binary crossover with spread factor drawn from ``u``.

    ``u`` holds one uniform draw per variable. Children are clipped to
    ``space`` when given.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError("parents differ in length")
    u = np.broadcast_to(np.asarray(u, dtype=float), p1.shape)
    expo = 1.0 / (eta_c + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** expo, (1.0 / (2.0 * (1.0 - u))) ** expo)
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    if space is not None:
        c1, c2 = space.clip(c1), space.clip(c2)
    return c1, c2


def polynomial_mutation(x, eta_m: float, u, space: SearchSpace, mask=None):
    """Polynomial mutation scaled by the distance to the nearer-side bound.

    For ``u < 0.5`` the variable moves down by a fraction of ``x - lower``;
    otherwise up by a fraction of ``upper - x``. ``mask`` selects which
    variables mutate (all by default).
    """
    x = np.asarray(x, dtype=float)
    u = np.broadcast_to(np.asarray(u, dtype=float), x.shape)
    expo = 1.0 / (eta_m + 1.0)
    down = u < 0.5
    delta = np.where(down, (2.0 * u) ** expo - 1.0, 1.0 - (2.0 * (1.0 - u)) ** expo)
    room = np.where(down, x - space.lower_array, space.upper_array - x)
    y = x + delta * room
    if mask is not None:
        y = np.where(mask, y, x)
    return space.clip(y)


def _tournament(rng: np.random.Generator, ranked: RankedPopulation, count: int) -> np.ndarray:
    n = len(ranked.rank)
    a = rng.integers(0, n, size=count)
    b = rng.integers(0, n, size=count)
    ra, rb = ranked.rank[a], ranked.rank[b]
    ca, cb = ranked.crowding[a], ranked.crowding[b]
    a_wins = (ra < rb) | ((ra == rb) & (ca >= cb))
    return np.where(a_wins, a, b)


def _variation(rng, parents: np.ndarray, space: SearchSpace, config: AlgorithmConfig) -> np.ndarray:
    n, m = parents.shape
    pm = config.mutation_probability_per_variable
    pm = 1.0 / m if pm is None else pm
    children = np.empty_like(parents)
    for i in range(0, n, 2):
        p1, p2 = parents[i], parents[i + 1]
        do_cross = rng.random() < config.crossover_probability
        u = rng.random(m)
        swap = rng.random(m) < 0.5
        if do_cross:
            c1, c2 = sbx_crossover(p1, p2, config.eta_c, u, space)
            # per-variable exchange keeps SBX symmetric in the two children
            c1, c2 = np.where(swap, c2, c1), np.where(swap, c1, c2)
        else:
            c1, c2 = p1.copy(), p2.copy()
        for j, c in enumerate((c1, c2)):
            mask = rng.random(m) < pm
            um = rng.random(m)
            children[i + j] = polynomial_mutation(c, config.eta_m, um, space, mask)
    return children


def _evaluate(problem, xs: np.ndarray, executor: Executor | None) -> np.ndarray:
    if executor is None:
        rows = [problem.evaluate(x) for x in xs]
    else:
        rows = list(executor.map(problem.evaluate, list(xs)))
    out = np.empty((len(xs), problem.n_objectives))
    for i, r in enumerate(rows):
        out[i] = r
    return out


def run(problem, space: SearchSpace | None, config: AlgorithmConfig, run_id: int | None = None,
        executor: Executor | None = None,
        on_generation: Callable[[dict], None] | None = None) -> RunResult:
    """Run NSGA-II and return the non-dominated subset of the final population.

    The run is deterministic given ``config.seed`` and the problem's own
    evaluation seed: initialization and variation draw from separate Philox
    substreams, and evaluation results are collected in submission order so
    ``executor`` concurrency cannot change the outcome.

    Candidates whose objectives are not finite are ranked behind every valid
    candidate and never reach the returned front.
    """
    space = space or problem.space
    init_seq, var_seq = np.random.SeedSequence(config.seed).spawn(2)
    init_rng = np.random.Generator(np.random.Philox(init_seq))
    var_rng = np.random.Generator(np.random.Philox(var_seq))
    n, m = config.population_size, space.dim
    lo, hi = space.lower_array, space.upper_array

    evaluations = 0
    nonfinite = 0

    def evaluate(xs):
        nonlocal evaluations, nonfinite
        objs = _evaluate(problem, xs, executor)
        valid = np.isfinite(objs).all(axis=1)
        bad = int((~valid).sum())
        if bad:
            nonfinite += bad
            logger.warning("run %s: %d evaluations returned non-finite objectives", run_id, bad)
        ids = np.arange(evaluations, evaluations + len(xs))
        evaluations += len(xs)
        return objs, valid, ids

    pop = lo + init_rng.random((n, m)) * (hi - lo)
    objs, valid, eval_ids = evaluate(pop)
    born = np.zeros(n, dtype=int)
    ranked = rank_population(objs, valid)

    for gen in range(1, config.generations + 1):
        parents = pop[_tournament(var_rng, ranked, n)]
        kids = _variation(var_rng, parents, space, config)
        kid_objs, kid_valid, kid_ids = evaluate(kids)

        all_x = np.vstack([pop, kids])
        all_obj = np.vstack([objs, kid_objs])
        all_valid = np.concatenate([valid, kid_valid])
        all_ids = np.concatenate([eval_ids, kid_ids])
        all_born = np.concatenate([born, np.full(n, gen)])
        merged = rank_population(all_obj, all_valid)

        keep: list[int] = []
        truncated = False
        for k in range(merged.rank.max() + 1):
            members = merged.front_indices(k)
            if len(keep) + len(members) <= n:
                keep.extend(members.tolist())
                continue
            order = sorted(members.tolist(), key=lambda i: (-merged.crowding[i], i))
            keep.extend(order[: n - len(keep)])
            truncated = k == 0
            break
        keep_idx = np.array(keep)
        pop, objs, valid = all_x[keep_idx], all_obj[keep_idx], all_valid[keep_idx]
        eval_ids, born = all_ids[keep_idx], all_born[keep_idx]
        ranked = rank_population(objs, valid)

        if on_generation is not None:
            on_generation({
                "generation": gen,
                "rank0": objs[(ranked.rank == 0) & valid].copy(),
                "rank0_truncated": truncated,
                "evaluations": evaluations,
            })

    final = np.flatnonzero((ranked.rank == 0) & valid)
    members = tuple(
        Solution(tuple(pop[i]), tuple(objs[i]), run=run_id, generation=int(born[i]),
                 evaluation=int(eval_ids[i]))
        for i in final
    )
    return RunResult(Front(members, problem.n_objectives), evaluations, nonfinite)
