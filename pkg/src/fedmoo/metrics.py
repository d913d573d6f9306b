"""Solution-set quality metrics for minimization problems."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """Pareto dominance: ``a`` is nowhere worse than ``b`` and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_filter(points: np.ndarray) -> np.ndarray:
    """Rows of ``points`` not dominated by any other row.

    Duplicate rows are kept once; output preserves first-occurrence order.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("expected a 2-d objective array")
    if len(pts) == 0:
        return pts.copy()
    _, first = np.unique(pts, axis=0, return_index=True)
    pts = pts[np.sort(first)]
    keep = np.empty(len(pts), dtype=bool)
    for i in range(len(pts)):
        le = np.all(pts <= pts[i], axis=1)
        lt = np.any(pts < pts[i], axis=1)
        keep[i] = not np.any(le & lt)
    return pts[keep]


def igd(solutions: np.ndarray, reference: np.ndarray) -> float:
    """Inverted generational distance of ``solutions`` against ``reference``.

    The mean over reference points of the Euclidean distance to the closest
    solution. Zero if and only if every reference point coincides with some
    solution.
    """
    sol = np.asarray(solutions, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if sol.ndim != 2 or ref.ndim != 2:
        raise ValueError("expected 2-d objective arrays")
    if len(sol) == 0 or len(ref) == 0:
        raise ValueError("solution and reference sets must be nonempty")
    if sol.shape[1] != ref.shape[1]:
        raise ValueError(
            f"objective count mismatch: {sol.shape[1]} vs {ref.shape[1]}"
        )
    return float(cdist(ref, sol).min(axis=1).mean())
