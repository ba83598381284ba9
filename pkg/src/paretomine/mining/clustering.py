from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClusterAssignment:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    wcss: float
    iterations: int
    wcss_history: tuple[float, ...] = ()


def _farthest_point_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    chosen = [int(rng.integers(len(x)))]
    d = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d))
        chosen.append(nxt)
        d = np.minimum(d, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _assign(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(x)), labels]


def kmeans(samples, k: int, seed: int = 0, max_iters: int = 300) -> ClusterAssignment:
    """Lloyd's k-means with greedy farthest-point seeding.

    The first centroid is a sample picked with ``seed``; each further one is
    the sample farthest from those already chosen. A cluster that empties out
    is re-seeded with the sample farthest from its current centroid.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if not np.isfinite(x).all():
        raise ValueError("samples must be finite")
    if not 1 <= k <= len(x):
        raise ValueError(f"k={k} must lie in [1, {len(x)}]")
    rng = np.random.default_rng(seed)
    centroids = _farthest_point_init(x, k, rng)
    labels, d2 = _assign(x, centroids)
    history = [float(d2.sum())]
    it = 0
    for it in range(1, max_iters + 1):
        new = centroids.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new[c] = x[members].mean(axis=0)
            else:
                new[c] = x[int(np.argmax(d2))]
                d2[int(np.argmax(d2))] = 0.0
        new_labels, new_d2 = _assign(x, new)
        centroids = new
        history.append(float(new_d2.sum()))
        if np.array_equal(new_labels, labels):
            labels, d2 = new_labels, new_d2
            break
        labels, d2 = new_labels, new_d2
    return ClusterAssignment(k, centroids, labels, float(d2.sum()), it, tuple(history))
