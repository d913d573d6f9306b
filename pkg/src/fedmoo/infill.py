"""Selection of the next batch of expensive evaluations.

The optimizer's final population is thinned of near-duplicates, reclustered
to the batch size, and padded with fresh space-filling points whenever too
few distinct solutions survive. Candidates already present in the evaluated
archive are replaced, so a batch never wastes budget on a known point.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .moea import MoeaConfig, run_moea
from .sampling import latin_hypercube
from .surrogate import kmeans_centers

SPACING = 1e-6


def remove_redundant(points: np.ndarray, threshold: float = SPACING) -> np.ndarray:
    """Greedy scan keeping rows at least ``threshold`` apart in Euclidean norm.

    The first row always survives; later rows survive when no kept row is
    closer than ``threshold``.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) <= 1:
        return pts.copy()
    dist = cdist(pts, pts)
    kept = [0]
    for i in range(1, len(pts)):
        if dist[i, kept].min() >= threshold:
            kept.append(i)
    return pts[kept]


def _padding_points(
    count: int,
    existing: np.ndarray,
    dim: int,
    rng: np.random.Generator,
    max_tries: int = 10,
) -> np.ndarray:
    # Fresh LHS points, redrawn on the measure-zero chance of landing on
    # an existing row.
    points = np.empty((count, dim))
    for i in range(count):
        for _ in range(max_tries):
            candidate = latin_hypercube(1, dim, rng)[0]
            if len(existing) == 0 or cdist([candidate], existing).min() >= SPACING:
                break
        points[i] = candidate
        existing = np.vstack([existing, candidate]) if len(existing) else candidate[None]
    return points


def select_candidates(
    acquisition,
    config: MoeaConfig,
    batch_size: int,
    rng: np.random.Generator,
    archive: np.ndarray | None = None,
    max_restarts: int = 5,
) -> np.ndarray:
    """Pick ``batch_size`` well-separated points for expensive evaluation.

    Runs the configured optimizer, removes near-duplicates from its final
    population, and restarts (accumulating survivors) while fewer than
    ``batch_size`` remain, up to ``max_restarts`` extra runs. With enough
    survivors, k-means clusters them and the point nearest each centroid is
    returned; otherwise space-filling padding tops up the batch. Any
    candidate within ``SPACING`` of an archive row is replaced by padding.
    """
    if batch_size < 1:
        raise ValueError(f"batch size must be positive, got {batch_size}")
    dim = acquisition.dim
    archive = np.empty((0, dim)) if archive is None else np.asarray(archive, dtype=float)
    survivors = np.empty((0, dim))
    for _ in range(max_restarts + 1):
        population = run_moea(acquisition, config, rng)
        survivors = remove_redundant(np.vstack([survivors, population.x]))
        if len(survivors) >= batch_size:
            break
    if len(survivors) > batch_size:
        centroids = kmeans_centers(survivors, batch_size, rng)
        chosen = _nearest_distinct(survivors, centroids)
    else:
        chosen = survivors
    if len(chosen) < batch_size:
        pad = _padding_points(
            batch_size - len(chosen), np.vstack([chosen, archive]), dim, rng
        )
        chosen = np.vstack([chosen, pad])
    if len(archive):
        clash = cdist(chosen, archive).min(axis=1) < SPACING
        for i in np.flatnonzero(clash):
            taken = np.vstack([chosen, archive])
            chosen[i] = _padding_points(1, taken, dim, rng)[0]
    return chosen


def _nearest_distinct(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # One distinct representative per centroid, nearest first.
    dist = cdist(centroids, points)
    used: list[int] = []
    for c in range(len(centroids)):
        order = np.argsort(dist[c], kind="stable")
        pick = next(i for i in order if i not in used)
        used.append(int(pick))
    return points[used]
