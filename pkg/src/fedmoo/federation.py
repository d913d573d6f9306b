"""Simulated federation: clients, sorted-averaging server, round protocol.

Each client owns a private dataset and a local RBFN; the server only ever
sees models and dataset sizes, never raw rows. One communication round
uploads the participants' models, aggregates them by sorted averaging,
optimizes the federated acquisition, and dispatches a batch of candidates
back to the participants, who evaluate them on the true objectives (when
the lossy channel cooperates), cap their datasets, and retrain.

Rounds are strictly sequential. Within a round every client operates on its
own seeded random stream, so per-client work could be farmed out to workers
without changing any result; this implementation simply loops.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .acquisition import FederatedLcb
from .benchmarks import ProblemInstance, evaluate
from .infill import SPACING, select_candidates
from .metrics import igd, nondominated_filter
from .moea import MoeaConfig, fast_nondominated_sort, crowding_distance, generate_reference_vectors
from .sampling import latin_hypercube
from .surrogate import Dataset, RbfnModel, center_cap, fit_local


@dataclass
class ConvergenceRecord:
    """One measurement point of a run: budget spent and archive quality."""

    run: int
    iteration: int
    fes: int
    igd: float
    ms: float


@dataclass
class ClientState:
    """A federation participant: private data, local model, own randomness."""

    id: int
    dataset: Dataset
    model: RbfnModel | None
    rng: np.random.Generator


@dataclass
class ServerState:
    """What the coordinator holds: the aggregate and the round's uploads."""

    global_model: RbfnModel | None = None
    uploaded: list[tuple[int, RbfnModel, int]] = field(default_factory=list)


@dataclass
class RoundState:
    """Snapshot of one communication round."""

    index: int
    participants: np.ndarray
    delivery: dict[int, bool]
    candidates: np.ndarray


@dataclass
class FederationConfig:
    """Protocol and client-training parameters.

    ``centers``, ``data_cap`` and ``init_samples`` default to the
    dimension-dependent rules (``floor(sqrt(M + d)) + 3`` centers, cap
    ``11d - 1 + 25``, design size ``11d - 1``) when left ``None``; ``moea``
    defaults to NSGA-II up to three objectives and RVEA beyond.
    """

    n_clients: int = 10
    participation: float = 0.9
    failure_prob: float = 0.03
    per_round: int = 5
    alpha: float = 2.0
    epochs: int = 20
    learning_rate: float = 0.06
    batch_size: int = 1
    kernel: str = "squared"
    centers: int | None = None
    data_cap: int | None = None
    init_samples: int | None = None
    max_restarts: int = 5
    moea: MoeaConfig | None = None

    def resolve(self, problem: ProblemInstance) -> "FederationConfig":
        """Fill in problem-dependent defaults and validate."""
        if self.n_clients < 1:
            raise ValueError(f"need at least one client, got {self.n_clients}")
        if not 0.0 < self.participation <= 1.0:
            raise ValueError(f"participation must be in (0, 1], got {self.participation}")
        if not 0.0 <= self.failure_prob < 1.0:
            raise ValueError(f"failure probability must be in [0, 1), got {self.failure_prob}")
        if self.per_round < 1:
            raise ValueError(f"need at least one candidate per round, got {self.per_round}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be nonnegative, got {self.epochs}")
        if self.learning_rate < 0.0:
            raise ValueError(f"learning rate must be nonnegative, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be positive, got {self.batch_size}")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.max_restarts < 0:
            raise ValueError(f"max_restarts must be nonnegative, got {self.max_restarts}")
        if self.kernel not in ("squared", "printed"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        d = problem.n_var
        centers = self.centers if self.centers is not None else center_cap(problem.n_obj, d)
        data_cap = self.data_cap if self.data_cap is not None else 11 * d - 1 + 25
        init_samples = self.init_samples if self.init_samples is not None else 11 * d - 1
        if centers < 1 or data_cap < 1 or init_samples < 1:
            raise ValueError("centers, data_cap and init_samples must be positive")
        moea = self.moea
        if moea is None:
            if problem.n_obj <= 3:
                moea = MoeaConfig(optimizer="nsga2")
            else:
                vectors = generate_reference_vectors(problem.n_obj)
                moea = MoeaConfig(
                    optimizer="rvea",
                    pop_size=len(vectors.vectors),
                    reference_vectors=vectors,
                )
        return replace(
            self,
            centers=centers,
            data_cap=data_cap,
            init_samples=init_samples,
            moea=moea,
        )


def participant_count(n_clients: int, participation: float) -> int:
    """Ceiling of ``participation * n_clients`` with a float-noise guard."""
    return min(n_clients, math.ceil(round(participation * n_clients, 9)))


def select_participants(
    n_clients: int, participation: float, rng: np.random.Generator
) -> np.ndarray:
    """Uniform random subset of client ids, sorted, of size ``ceil(l * N)``."""
    if not 0.0 < participation <= 1.0:
        raise ValueError(f"participation must be in (0, 1], got {participation}")
    size = participant_count(n_clients, participation)
    return np.sort(rng.choice(n_clients, size=size, replace=False))


def participant_weights(sizes: np.ndarray) -> np.ndarray:
    """Aggregation weights proportional to dataset sizes, summing to one."""
    sizes = np.asarray(sizes, dtype=float)
    if len(sizes) == 0:
        raise ValueError("no participants to weight")
    if np.any(sizes <= 0):
        raise ValueError("dataset sizes must be positive")
    return sizes / sizes.sum()


def sort_by_center_distance(model: RbfnModel) -> RbfnModel:
    """Reorder the model's rows by center distance from the origin.

    Ties break lexicographically on the center coordinates and then by the
    original row index, so the result is unique. Predictions are unchanged,
    only the row order is canonical.
    """
    q, d = model.centers.shape
    keys = [np.arange(q)]
    keys.extend(model.centers[:, j] for j in range(d - 1, -1, -1))
    keys.append(np.linalg.norm(model.centers, axis=1))
    order = np.lexsort(keys)
    return RbfnModel(
        model.centers[order],
        model.spreads[order],
        model.weights[order],
        model.biases.copy(),
        model.kernel,
    )


def sorted_average(
    models: list[RbfnModel], weights: np.ndarray | list[float]
) -> RbfnModel:
    """Weighted entrywise average of shape-aligned models.

    Every model is first put in the canonical row order of
    ``sort_by_center_distance`` so that averaging pairs comparable centers.
    Models are then accumulated in a content-derived order, which makes the
    result bit-identical under any permutation of the input list (with
    matching weights) and under any row permutation within a model.
    """
    if len(models) == 0:
        raise ValueError("need at least one model to average")
    w = np.asarray(weights, dtype=float)
    if len(w) != len(models):
        raise ValueError(f"{len(models)} models but {len(w)} weights")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    shape = (models[0].n_centers, models[0].dim, models[0].n_obj)
    kernel = models[0].kernel
    for m in models:
        if (m.n_centers, m.dim, m.n_obj) != shape or m.kernel != kernel:
            raise ValueError("models must share shape and kernel")
    aligned = [sort_by_center_distance(m) for m in models]

    def content_key(i: int) -> bytes:
        m = aligned[i]
        return (
            np.float64(w[i]).tobytes()
            + m.centers.tobytes()
            + m.spreads.tobytes()
            + m.weights.tobytes()
            + m.biases.tobytes()
        )

    order = sorted(range(len(aligned)), key=content_key)
    centers = np.zeros_like(aligned[0].centers)
    spreads = np.zeros_like(aligned[0].spreads)
    out_w = np.zeros_like(aligned[0].weights)
    biases = np.zeros_like(aligned[0].biases)
    for i in order:
        m = aligned[i]
        centers += w[i] * m.centers
        spreads += w[i] * m.spreads
        out_w += w[i] * m.weights
        biases += w[i] * m.biases
    return RbfnModel(centers, spreads, out_w, biases, kernel)


def truncate_dataset(data: Dataset, cap: int) -> Dataset:
    """Keep at most ``cap`` rows, preferring low non-domination rank.

    Whole fronts are kept in rank order while they fit; the front that
    overflows is filtered by descending crowding distance. At or under the
    cap the dataset is returned unchanged.
    """
    if cap < 1:
        raise ValueError(f"cap must be positive, got {cap}")
    if len(data) <= cap:
        return data
    keep: list[np.ndarray] = []
    taken = 0
    for front in fast_nondominated_sort(data.y):
        if taken + len(front) <= cap:
            keep.append(front)
            taken += len(front)
            if taken == cap:
                break
        else:
            crowd = crowding_distance(data.y[front])
            order = np.argsort(-crowd, kind="stable")
            keep.append(front[order[: cap - taken]])
            break
    idx = np.concatenate(keep)
    return Dataset(data.x[idx], data.y[idx])


def _append_unique(data: Dataset, x_new: np.ndarray, y_new: np.ndarray) -> Dataset:
    # Skip rows closer than the global spacing to anything already present.
    xs, ys = [data.x], [data.y]
    for row, val in zip(x_new, y_new):
        existing = np.vstack(xs)
        if np.min(np.linalg.norm(existing - row, axis=1)) >= SPACING:
            xs.append(row[None])
            ys.append(val[None])
    return Dataset(np.vstack(xs), np.vstack(ys))


def deliver(
    candidates: np.ndarray,
    client: ClientState,
    problem: ProblemInstance,
    failure_prob: float,
    config: FederationConfig,
    rng: np.random.Generator | None = None,
) -> tuple[ClientState, bool]:
    """One client's share of a round: maybe receive, always retrain.

    A single Bernoulli draw decides whether the candidate batch arrives.
    On success the client evaluates the candidates on the true objectives,
    appends them, and truncates to the data cap. Success or not, the client
    refits its local model, so a failed delivery just trains on staler data.
    Returns the mutated client and the delivery outcome.
    """
    if not 0.0 <= failure_prob < 1.0:
        raise ValueError(f"failure probability must be in [0, 1), got {failure_prob}")
    if rng is None:
        rng = client.rng
    delivered = bool(rng.random() >= failure_prob)
    if delivered and len(candidates):
        y = evaluate(problem, candidates)
        grown = _append_unique(client.dataset, np.atleast_2d(candidates), np.atleast_2d(y))
        client.dataset = truncate_dataset(grown, config.data_cap)
    client.model = fit_local(
        client.dataset,
        config.centers,
        config.epochs,
        config.learning_rate,
        config.batch_size,
        rng=client.rng,
        kernel=config.kernel,
    )
    return client, delivered


class Simulation:
    """One seeded run of the federated optimization loop.

    Holds the clients, the server, and the evaluation ledger (the archive of
    unique expensively-evaluated points, which is bookkeeping of the
    deterministic true objective, not server-visible data). ``run_round``
    advances one communication round; records carry cumulative unique
    function evaluations and the archive's nondominated-set quality.
    """

    def __init__(
        self,
        problem: ProblemInstance,
        config: FederationConfig | None = None,
        seed: int = 0,
        run_id: int = 0,
        reference_points: np.ndarray | None = None,
        record_timing: bool = True,
    ) -> None:
        start = time.perf_counter()
        self.problem = problem
        self.config = (config or FederationConfig()).resolve(problem)
        self.run_id = run_id
        self.reference_points = reference_points
        self.record_timing = record_timing
        streams = np.random.SeedSequence(seed).spawn(self.config.n_clients + 1)
        self.server_rng = np.random.default_rng(streams[0])
        design = latin_hypercube(self.config.init_samples, problem.n_var, self.server_rng)
        values = evaluate(problem, design)
        self.clients = []
        for k in range(self.config.n_clients):
            rng = np.random.default_rng(streams[k + 1])
            client = ClientState(k, Dataset(design.copy(), values.copy()), None, rng)
            client.model = fit_local(
                client.dataset,
                self.config.centers,
                self.config.epochs,
                self.config.learning_rate,
                self.config.batch_size,
                rng=client.rng,
                kernel=self.config.kernel,
            )
            self.clients.append(client)
        self.server = ServerState()
        self.archive_x = design
        self.archive_y = values
        self.round_index = 0
        self.events: list[dict] = []
        elapsed = (time.perf_counter() - start) * 1000.0 if record_timing else 0.0
        self.records = [
            ConvergenceRecord(run_id, 0, len(self.archive_x), self._archive_igd(), elapsed)
        ]

    def _archive_igd(self) -> float:
        if self.reference_points is None:
            return float("nan")
        return igd(nondominated_filter(self.archive_y), self.reference_points)

    def run_round(self) -> tuple[ServerState, RoundState, ConvergenceRecord]:
        """Advance one round and return the server, round and record states."""
        start = time.perf_counter()
        cfg = self.config
        index = self.round_index + 1
        participants = select_participants(cfg.n_clients, cfg.participation, self.server_rng)
        uploads = [
            (int(k), self.clients[k].model, len(self.clients[k].dataset))
            for k in participants
        ]
        weights = participant_weights([n for _, _, n in uploads])
        global_model = sorted_average([m for _, m, _ in uploads], weights)
        self.server = ServerState(global_model, uploads)
        lcb = FederatedLcb(global_model, [m for _, m, _ in uploads], cfg.alpha)
        candidates = select_candidates(
            lcb,
            cfg.moea,
            cfg.per_round,
            self.server_rng,
            archive=self.archive_x,
            max_restarts=cfg.max_restarts,
        )
        delivery: dict[int, bool] = {}
        for k in participants:
            _, ok = deliver(candidates, self.clients[k], self.problem, cfg.failure_prob, cfg)
            delivery[int(k)] = ok
        if any(delivery.values()):
            self.archive_x = np.vstack([self.archive_x, candidates])
            self.archive_y = np.vstack([self.archive_y, evaluate(self.problem, candidates)])
        self.round_index = index
        elapsed = (time.perf_counter() - start) * 1000.0 if self.record_timing else 0.0
        record = ConvergenceRecord(
            self.run_id, index, len(self.archive_x), self._archive_igd(), elapsed
        )
        self.records.append(record)
        self.events.append(
            {
                "round": index,
                "participants": [int(k) for k in participants],
                "delivery": {str(k): bool(v) for k, v in delivery.items()},
                "fes": len(self.archive_x),
            }
        )
        return self.server, RoundState(index, participants, delivery, candidates), record

    def run(self, rounds: int) -> list[ConvergenceRecord]:
        """Run ``rounds`` communication rounds and return all records.

        The record list always starts with the iteration-0 entry measuring
        the shared initial design, so ``rounds=0`` still yields one record.
        """
        if rounds < 0:
            raise ValueError(f"rounds must be nonnegative, got {rounds}")
        for _ in range(rounds):
            self.run_round()
        return list(self.records)
