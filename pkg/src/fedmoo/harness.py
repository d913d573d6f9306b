"""Experiment runner: configuration, seeding, repetition, CSV/JSON output.

A single experiment is ``runs`` independent seeded simulations of the same
configuration; run ``i`` uses ``seed + i``. Results are one CSV of
convergence records (``run,iter,fes,igd,ms``), one JSON summary with the
mean and standard deviation of the final IGD values, and one JSON-lines
event log of the per-round federation activity.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import FAMILIES, ProblemInstance, sample_pareto_front
from .federation import ConvergenceRecord, FederationConfig, Simulation
from .moea import DEFAULT_REFERENCE_LAYERS, MoeaConfig, generate_reference_vectors

CSV_HEADER = ("run", "iter", "fes", "igd", "ms")


@dataclass
class ExperimentConfig:
    """Everything a reproduction needs, flat so files and flags map 1:1.

    ``centers``, ``data_cap`` and ``init_samples`` stay ``None`` to use the
    dimension-dependent defaults; ``optimizer`` ``None`` picks NSGA-II up to
    three objectives and RVEA above.
    """

    problem: str = "dtlz2"
    objectives: int = 3
    dims: int = 10
    optimizer: str | None = None
    clients: int = 10
    participation: float = 0.9
    failure_prob: float = 0.03
    epochs: int = 20
    learning_rate: float = 0.06
    batch_size: int = 1
    per_round: int = 5
    rounds: int = 24
    runs: int = 20
    seed: int = 0
    alpha: float = 2.0
    kernel: str = "squared"
    centers: int | None = None
    data_cap: int | None = None
    init_samples: int | None = None
    pop_size: int = 50
    generations: int = 50
    max_restarts: int = 5
    reference_size: int = 10_000
    workers: int = 1
    record_timing: bool = True
    out: str | None = None

    def resolved_optimizer(self) -> str:
        if self.optimizer is not None:
            return self.optimizer
        return "nsga2" if self.objectives <= 3 else "rvea"

    def validate(self) -> None:
        """Raise ``ValueError`` on any bad field, before any run starts."""
        if self.problem not in FAMILIES:
            raise ValueError(f"unknown problem {self.problem!r}, expected one of {FAMILIES}")
        if self.resolved_optimizer() not in ("nsga2", "rvea"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.objectives < 2:
            raise ValueError(f"objectives must be at least 2, got {self.objectives}")
        if self.dims < self.objectives:
            raise ValueError(
                f"dims must be at least objectives, got dims={self.dims} "
                f"objectives={self.objectives}"
            )
        if self.runs < 1:
            raise ValueError(f"runs must be at least 1, got {self.runs}")
        if self.rounds < 0:
            raise ValueError(f"rounds must be nonnegative, got {self.rounds}")
        if not 0.0 < self.participation <= 1.0:
            raise ValueError(f"participation must be in (0, 1], got {self.participation}")
        if not 0.0 <= self.failure_prob < 1.0:
            raise ValueError(f"failure-prob must be in [0, 1), got {self.failure_prob}")
        if self.reference_size < self.objectives:
            raise ValueError(f"reference-size too small: {self.reference_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if (
            self.resolved_optimizer() == "rvea"
            and self.objectives not in DEFAULT_REFERENCE_LAYERS
        ):
            raise ValueError(
                f"rvea has no default reference vectors for M={self.objectives}; "
                f"supported: {sorted(DEFAULT_REFERENCE_LAYERS)}"
            )
        # Instantiating catches anything problem-specific.
        self.problem_instance()
        self.federation_config().resolve(self.problem_instance())

    def problem_instance(self) -> ProblemInstance:
        return ProblemInstance(self.problem, self.objectives, self.dims)

    def moea_config(self) -> MoeaConfig:
        name = self.resolved_optimizer()
        if name == "rvea":
            vectors = generate_reference_vectors(self.objectives)
            return MoeaConfig(
                optimizer="rvea",
                pop_size=len(vectors.vectors),
                generations=self.generations,
                reference_vectors=vectors,
            )
        return MoeaConfig(
            optimizer="nsga2", pop_size=self.pop_size, generations=self.generations
        )

    def federation_config(self) -> FederationConfig:
        return FederationConfig(
            n_clients=self.clients,
            participation=self.participation,
            failure_prob=self.failure_prob,
            per_round=self.per_round,
            alpha=self.alpha,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            kernel=self.kernel,
            centers=self.centers,
            data_cap=self.data_cap,
            init_samples=self.init_samples,
            max_restarts=self.max_restarts,
            moea=self.moea_config(),
        )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ConvergenceRecord]
    events: list[dict]
    summary: dict
    paths: dict = field(default_factory=dict)


def _run_single(args: tuple) -> tuple[list[ConvergenceRecord], list[dict]]:
    config, run_id, reference = args
    sim = Simulation(
        config.problem_instance(),
        config.federation_config(),
        seed=config.seed + run_id,
        run_id=run_id,
        reference_points=reference,
        record_timing=config.record_timing,
    )
    sim.run(config.rounds)
    return sim.records, [{"run": run_id, **event} for event in sim.events]


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute all runs of ``config`` and write outputs if ``out`` is set.

    Records are ordered by (run, iteration) regardless of worker
    scheduling, so equal configurations and seeds give identical output.
    """
    config.validate()
    reference = sample_pareto_front(config.problem_instance(), config.reference_size)
    tasks = [(config, run_id, reference) for run_id in range(config.runs)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_run_single, tasks))
    else:
        outcomes = [_run_single(task) for task in tasks]
    records = [record for run_records, _ in outcomes for record in run_records]
    events = [event for _, run_events in outcomes for event in run_events]
    finals = [run_records[-1].igd for run_records, _ in outcomes]
    summary = {
        "problem": config.problem,
        "M": config.objectives,
        "d": config.dims,
        "optimizer": config.resolved_optimizer(),
        "mean_igd": float(np.mean(finals)),
        "std_igd": float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0,
        "runs": [float(v) for v in finals],
    }
    result = ExperimentResult(config, records, events, summary)
    if config.out is not None:
        result.paths = write_outputs(result, Path(config.out))
    return result


def write_outputs(result: ExperimentResult, out_dir: Path) -> dict:
    """Write records.csv, summary.json and events.jsonl under ``out_dir``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "records": out_dir / "records.csv",
        "summary": out_dir / "summary.json",
        "events": out_dir / "events.jsonl",
    }
    write_records_csv(result.records, paths["records"])
    with open(paths["summary"], "w") as handle:
        json.dump(result.summary, handle, indent=2)
        handle.write("\n")
    with open(paths["events"], "w") as handle:
        for event in result.events:
            handle.write(json.dumps(event) + "\n")
    return paths


def write_records_csv(records: list[ConvergenceRecord], path: Path) -> None:
    """CSV with full-precision floats so parsing it back loses nothing."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(
                [r.run, r.iteration, r.fes, repr(float(r.igd)), repr(float(r.ms))]
            )


def read_records_csv(path: Path) -> list[ConvergenceRecord]:
    """Inverse of ``write_records_csv``."""
    records = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        for row in reader:
            records.append(
                ConvergenceRecord(
                    int(row[0]), int(row[1]), int(row[2]), float(row[3]), float(row[4])
                )
            )
    return records


SWEEP_PARAMETERS = ("participation", "failure_prob")


def sweep(
    config: ExperimentConfig, parameter: str, values: list[float]
) -> list[ExperimentResult]:
    """Run one experiment per value of ``parameter`` and combine summaries.

    Each value gets its own output subdirectory; a combined ``sweep.csv``
    keyed by (parameter, value, problem, M) lands in the base directory.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"can only sweep {SWEEP_PARAMETERS}, got {parameter!r}")
    if not values:
        raise ValueError("need at least one value to sweep")
    results = []
    for value in values:
        sub = dataclasses.replace(config, **{parameter: value})
        if config.out is not None:
            sub.out = str(Path(config.out) / f"{parameter}={value:g}")
        results.append(run_experiment(sub))
    if config.out is not None:
        combined = Path(config.out) / "sweep.csv"
        with open(combined, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["parameter", "value", "problem", "M", "d", "optimizer", "mean_igd", "std_igd"]
            )
            for value, result in zip(values, results):
                s = result.summary
                writer.writerow(
                    [
                        parameter,
                        repr(float(value)),
                        s["problem"],
                        s["M"],
                        s["d"],
                        s["optimizer"],
                        repr(s["mean_igd"]),
                        repr(s["std_igd"]),
                    ]
                )
    return results


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat ``key=value`` lines; blank lines and ``#`` comments ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def coerce_field(name: str, raw: str):
    """Parse a raw string into the type of the named config field."""
    if name not in _FIELD_TYPES:
        raise ValueError(f"unknown configuration key {name!r}")
    kind = _FIELD_TYPES[name]
    if raw.lower() in ("none", ""):
        return None
    if kind in ("int", "int | None"):
        return int(raw)
    if kind in ("float", "float | None"):
        return float(raw)
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"cannot parse boolean from {raw!r}")
    return raw


def config_from_sources(
    file_values: dict[str, str] | None = None, overrides: dict | None = None
) -> ExperimentConfig:
    """Defaults, then config-file values, then explicit overrides."""
    config = ExperimentConfig()
    if file_values:
        for key, raw in file_values.items():
            setattr(config, key, coerce_field(key, raw))
    if overrides:
        for key, value in overrides.items():
            if not hasattr(config, key):
                raise ValueError(f"unknown configuration key {key!r}")
            setattr(config, key, value)
    return config
