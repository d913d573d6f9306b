"""Evolutionary optimizers run on the acquisition landscape.

NSGA-II (Deb et al., 2002) handles two and three objectives; RVEA
(Cheng et al., 2016) with its angle-penalized distance handles the
many-objective cases. Both use simulated binary crossover and polynomial
mutation on the unit box and never call the expensive objectives: fitness
comes from whatever object exposes ``dim`` and ``lcb(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import latin_hypercube, simplex_lattice

DEFAULT_REFERENCE_LAYERS = {3: (13, 0), 5: (5, 0), 10: (3, 2), 20: (2, 2)}


@dataclass
class Population:
    """Decision vectors with their acquisition values."""

    x: np.ndarray
    f: np.ndarray
    generation: int = 0

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        if len(self.x) != len(self.f):
            raise ValueError("decision and objective row counts differ")

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class ReferenceVectorSet:
    """Unit reference vectors plus the adaptation cadence used by RVEA."""

    vectors: np.ndarray
    adaptation_frequency: float = 0.1


@dataclass
class MoeaConfig:
    """Which optimizer to run and with what budget and operators."""

    optimizer: str = "nsga2"
    pop_size: int = 50
    generations: int = 50
    eta_crossover: float = 20.0
    p_crossover: float = 1.0
    eta_mutation: float = 20.0
    p_mutation: float | None = None
    reference_vectors: ReferenceVectorSet | None = None

    def __post_init__(self) -> None:
        if self.optimizer not in ("nsga2", "rvea"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


def dominance_matrix(f: np.ndarray) -> np.ndarray:
    """Boolean matrix with ``out[i, j]`` true when row i dominates row j."""
    f = np.asarray(f, dtype=float)
    n = len(f)
    out = np.empty((n, n), dtype=bool)
    for i in range(n):
        le = np.all(f[i] <= f, axis=1)
        lt = np.any(f[i] < f, axis=1)
        out[i] = le & lt
    return out


def fast_nondominated_sort(f: np.ndarray) -> list[np.ndarray]:
    """Indices of each nondominated front, best first.

    Every index appears in exactly one front; front 0 is the nondominated
    subset of ``f``, front 1 the nondominated subset of the rest, and so on.
    """
    f = np.asarray(f, dtype=float)
    n = len(f)
    if n == 0:
        return []
    dom = dominance_matrix(f)
    counts = dom.sum(axis=0).astype(int)
    fronts = []
    current = np.flatnonzero(counts == 0)
    assigned = np.zeros(n, dtype=bool)
    while current.size:
        fronts.append(current)
        assigned[current] = True
        counts = counts - dom[current].sum(axis=0)
        current = np.flatnonzero((counts == 0) & ~assigned)
    return fronts


def crowding_distance(f: np.ndarray) -> np.ndarray:
    """Crowding of each row within a single front.

    Boundary points on any objective get infinity; interior points sum the
    normalized gaps between their sorted neighbors. Objectives with zero
    range contribute nothing. Ties in objective value are resolved by a
    stable sort, so equal inputs give equal outputs.
    """
    f = np.asarray(f, dtype=float)
    n = len(f)
    if n == 0:
        return np.empty(0)
    crowd = np.zeros(n)
    for j in range(f.shape[1]):
        order = np.argsort(f[:, j], kind="stable")
        lo, hi = f[order[0], j], f[order[-1], j]
        crowd[order[0]] = np.inf
        crowd[order[-1]] = np.inf
        if hi > lo and n > 2:
            gaps = (f[order[2:], j] - f[order[:-2], j]) / (hi - lo)
            crowd[order[1:-1]] += gaps
    return crowd


def sbx_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    eta: float = 20.0,
    p_crossover: float = 1.0,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover of two points in the unit box.

    With probability ``p_crossover`` every variable is crossed with its own
    spread factor; otherwise both parents pass through unchanged. Children
    are clipped to ``[0, 1]`` and their mean equals the parents' mean before
    clipping.
    """
    if rng is None:
        rng = np.random.default_rng()
    a = np.asarray(parent_a, dtype=float)
    b = np.asarray(parent_b, dtype=float)
    if rng.random() > p_crossover:
        return a.copy(), b.copy()
    u = rng.random(a.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (0.5 / (1.0 - u)) ** (1.0 / (eta + 1.0)),
    )
    child_a = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
    child_b = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b)
    return np.clip(child_a, 0.0, 1.0), np.clip(child_b, 0.0, 1.0)


def polynomial_mutation(
    x: np.ndarray,
    eta: float = 20.0,
    p_mutation: float | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Polynomial mutation on the unit box, default rate ``1/d``."""
    if rng is None:
        rng = np.random.default_rng()
    y = np.asarray(x, dtype=float).copy()
    d = y.shape[-1]
    if p_mutation is None:
        p_mutation = 1.0 / d
    hit = rng.random(d) < p_mutation
    u = rng.random(d)
    if not np.any(hit):
        return y
    lower = y
    upper = 1.0 - y
    exp = 1.0 / (eta + 1.0)
    small = u < 0.5
    delta = np.where(
        small,
        (2.0 * u + (1.0 - 2.0 * u) * (1.0 - lower) ** (eta + 1.0)) ** exp - 1.0,
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - upper) ** (eta + 1.0)) ** exp,
    )
    y[hit] += delta[hit]
    return np.clip(y, 0.0, 1.0)


def _ranks_from_fronts(fronts: list[np.ndarray], n: int) -> np.ndarray:
    rank = np.empty(n, dtype=int)
    for level, front in enumerate(fronts):
        rank[front] = level
    return rank


def _crowding_by_front(f: np.ndarray, fronts: list[np.ndarray]) -> np.ndarray:
    crowd = np.empty(len(f))
    for front in fronts:
        crowd[front] = crowding_distance(f[front])
    return crowd


def _tournament(rank: np.ndarray, crowd: np.ndarray, rng: np.random.Generator) -> int:
    n = len(rank)
    i = int(rng.integers(n))
    j = int(rng.integers(n))
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i if rng.random() < 0.5 else j


def _variation(
    x: np.ndarray,
    parents: np.ndarray,
    config: MoeaConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    # Pair consecutive parents, cross, then mutate both children.
    children = np.empty((len(parents), x.shape[1]))
    for p in range(0, len(parents) - 1, 2):
        a, b = sbx_crossover(
            x[parents[p]], x[parents[p + 1]], config.eta_crossover, config.p_crossover, rng
        )
        children[p] = polynomial_mutation(a, config.eta_mutation, config.p_mutation, rng)
        children[p + 1] = polynomial_mutation(b, config.eta_mutation, config.p_mutation, rng)
    if len(parents) % 2:
        a, _ = sbx_crossover(
            x[parents[-1]],
            x[parents[int(rng.integers(len(parents)))]],
            config.eta_crossover,
            config.p_crossover,
            rng,
        )
        children[-1] = polynomial_mutation(a, config.eta_mutation, config.p_mutation, rng)
    return children


def nsga2_optimize(
    acquisition,
    config: MoeaConfig,
    rng: np.random.Generator,
) -> Population:
    """Run NSGA-II on ``acquisition.lcb`` and return the final population.

    Binary tournaments on (rank, crowding) pick parents; survivors of the
    merged parent and child sets fill whole fronts, splitting the last one
    by descending crowding.
    """
    n, d = config.pop_size, acquisition.dim
    x = latin_hypercube(n, d, rng)
    f = acquisition.lcb(x)
    for _ in range(config.generations):
        fronts = fast_nondominated_sort(f)
        rank = _ranks_from_fronts(fronts, n)
        crowd = _crowding_by_front(f, fronts)
        parents = np.array([_tournament(rank, crowd, rng) for _ in range(n)])
        children = _variation(x, parents, config, rng)
        x_all = np.vstack([x, children])
        f_all = np.vstack([f, acquisition.lcb(children)])
        keep = _nsga2_survivors(f_all, n)
        x, f = x_all[keep], f_all[keep]
    return Population(x, f, config.generations)


def _nsga2_survivors(f: np.ndarray, n: int) -> np.ndarray:
    chosen: list[np.ndarray] = []
    taken = 0
    for front in fast_nondominated_sort(f):
        if taken + len(front) <= n:
            chosen.append(front)
            taken += len(front)
            if taken == n:
                break
        else:
            crowd = crowding_distance(f[front])
            order = np.argsort(-crowd, kind="stable")
            chosen.append(front[order[: n - taken]])
            break
    return np.concatenate(chosen)


def generate_reference_vectors(
    n_obj: int, layers: tuple[int, int] | None = None
) -> ReferenceVectorSet:
    """Two-layer simplex-lattice reference vectors, normalized to unit length.

    ``layers`` gives the outer and inner division counts; an inner count of
    zero means a single layer. Defaults follow the usual choices per
    objective count (``DEFAULT_REFERENCE_LAYERS``).
    """
    if layers is None:
        try:
            layers = DEFAULT_REFERENCE_LAYERS[n_obj]
        except KeyError:
            raise ValueError(
                f"no default reference-vector layers for {n_obj} objectives; pass layers"
            ) from None
    outer, inner = layers
    if outer < 1:
        raise ValueError("outer layer needs at least one division")
    vectors = simplex_lattice(n_obj, outer)
    if inner > 0:
        shrunk = 0.5 * simplex_lattice(n_obj, inner) + 0.5 / n_obj
        vectors = np.vstack([vectors, shrunk])
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    return ReferenceVectorSet(vectors)


def apd_select(
    f: np.ndarray,
    vectors: np.ndarray,
    progress: float,
    alpha: float = 2.0,
) -> np.ndarray:
    """Angle-penalized-distance survivors: one index per occupied direction.

    Objectives are translated by the ideal point, each individual is
    assigned to the reference vector of maximum cosine, and within each
    subregion the index minimizing
    ``(1 + M * progress^alpha * theta / gamma) * ||f||`` survives, where
    ``theta`` is the angle to the vector and ``gamma`` the vector's minimum
    angle to its neighbors.
    """
    f = np.asarray(f, dtype=float)
    n, m = f.shape
    shifted = f - f.min(axis=0)
    norms = np.linalg.norm(shifted, axis=1)
    safe = np.maximum(norms, 1e-64)
    cosine = (shifted / safe[:, None]) @ vectors.T
    assign = np.argmax(cosine, axis=1)
    theta = np.arccos(np.clip(cosine[np.arange(n), assign], -1.0, 1.0))
    gamma = _min_vector_angles(vectors)
    penalty = m * progress**alpha * theta / gamma[assign]
    apd = (1.0 + penalty) * norms
    survivors = []
    for v in np.unique(assign):
        members = np.flatnonzero(assign == v)
        survivors.append(members[np.argmin(apd[members])])
    return np.asarray(survivors, dtype=int)


def _min_vector_angles(vectors: np.ndarray) -> np.ndarray:
    if len(vectors) == 1:
        return np.full(1, 0.5 * np.pi)
    cosine = np.clip(vectors @ vectors.T, -1.0, 1.0)
    np.fill_diagonal(cosine, -1.0)
    gamma = np.arccos(cosine.max(axis=1))
    return np.maximum(gamma, 1e-64)


def rvea_optimize(
    acquisition,
    config: MoeaConfig,
    rng: np.random.Generator,
) -> Population:
    """Run RVEA on ``acquisition.lcb`` and return the final population.

    The population size equals the reference-vector count. Vectors adapt to
    the current objective ranges every ``ceil(fr * generations)``
    generations; selection is by angle-penalized distance.
    """
    if config.reference_vectors is None:
        raise ValueError("rvea needs a ReferenceVectorSet")
    base = config.reference_vectors.vectors
    fr = config.reference_vectors.adaptation_frequency
    vectors = base.copy()
    n, d = len(base), acquisition.dim
    adapt_every = max(1, int(np.ceil(fr * config.generations)))
    x = latin_hypercube(n, d, rng)
    f = acquisition.lcb(x)
    for gen in range(1, config.generations + 1):
        parents = rng.permutation(len(x))
        children = _variation(x, parents, config, rng)
        x_all = np.vstack([x, children])
        f_all = np.vstack([f, acquisition.lcb(children)])
        keep = apd_select(f_all, vectors, gen / config.generations)
        x, f = x_all[keep], f_all[keep]
        if gen % adapt_every == 0 and gen < config.generations:
            vectors = _adapt_vectors(base, f)
    return Population(x, f, config.generations)


def _adapt_vectors(base: np.ndarray, f: np.ndarray) -> np.ndarray:
    spans = f.max(axis=0) - f.min(axis=0)
    if np.any(spans <= 0.0):
        return base.copy()
    scaled = base * spans
    return scaled / np.linalg.norm(scaled, axis=1, keepdims=True)


def run_moea(acquisition, config: MoeaConfig, rng: np.random.Generator) -> Population:
    """Dispatch to the configured optimizer."""
    if config.optimizer == "nsga2":
        return nsga2_optimize(acquisition, config, rng)
    return rvea_optimize(acquisition, config, rng)
