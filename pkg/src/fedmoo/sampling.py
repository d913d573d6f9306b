"""Space-filling designs: Latin hypercube sampling and simplex lattices."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def latin_hypercube(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Plain Latin hypercube design of ``n`` points in ``[0, 1)^d``.

    Each dimension is cut into ``n`` equal strata and receives exactly one
    sample per stratum, placed uniformly at random inside it, with an
    independent permutation per dimension.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if d < 1:
        raise ValueError(f"need at least one dimension, got d={d}")
    strata = np.empty((n, d))
    for j in range(d):
        strata[:, j] = rng.permutation(n)
    return (strata + rng.uniform(size=(n, d))) / n


def simplex_lattice(n_obj: int, divisions: int) -> np.ndarray:
    """All weight vectors with components ``k/divisions`` summing to one.

    This is the Das-Dennis construction; it returns
    ``C(divisions + n_obj - 1, n_obj - 1)`` rows in lexicographic order.
    """
    if n_obj < 2:
        raise ValueError(f"need at least two objectives, got {n_obj}")
    if divisions < 1:
        raise ValueError(f"need at least one division, got {divisions}")
    slots = divisions + n_obj - 1
    rows = np.empty((math.comb(slots, n_obj - 1), n_obj))
    for r, cut in enumerate(combinations(range(slots), n_obj - 1)):
        prev = -1
        for j, pos in enumerate(cut):
            rows[r, j] = pos - prev - 1
            prev = pos
        rows[r, n_obj - 1] = slots - 1 - prev
    return rows / divisions


def lattice_covering(n_obj: int, n_min: int) -> int:
    """Smallest division count whose simplex lattice has at least ``n_min`` rows."""
    if n_min < 1:
        raise ValueError(f"need a positive target size, got {n_min}")
    divisions = 1
    while math.comb(divisions + n_obj - 1, n_obj - 1) < n_min:
        divisions += 1
    return divisions
