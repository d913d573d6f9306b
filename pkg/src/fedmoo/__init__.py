"""Federated surrogate-assisted evolutionary multi-objective optimization."""

from .acquisition import FederatedLcb
from .benchmarks import FAMILIES, ProblemInstance, evaluate, sample_pareto_front
from .federation import (
    ClientState,
    ConvergenceRecord,
    FederationConfig,
    RoundState,
    ServerState,
    Simulation,
    deliver,
    select_participants,
    sorted_average,
    truncate_dataset,
)
from .harness import ExperimentConfig, ExperimentResult, run_experiment, sweep
from .infill import remove_redundant, select_candidates
from .metrics import igd, nondominated_filter
from .moea import (
    MoeaConfig,
    Population,
    ReferenceVectorSet,
    crowding_distance,
    fast_nondominated_sort,
    generate_reference_vectors,
    nsga2_optimize,
    polynomial_mutation,
    rvea_optimize,
    sbx_crossover,
)
from .sampling import latin_hypercube, simplex_lattice
from .surrogate import (
    Dataset,
    RbfnModel,
    center_cap,
    fit_local,
    kmeans_centers,
    predict,
    sgd_train,
    spread_heuristic,
)

__all__ = [
    "FAMILIES",
    "ClientState",
    "ConvergenceRecord",
    "Dataset",
    "ExperimentConfig",
    "ExperimentResult",
    "FederatedLcb",
    "FederationConfig",
    "MoeaConfig",
    "Population",
    "ProblemInstance",
    "RbfnModel",
    "ReferenceVectorSet",
    "RoundState",
    "ServerState",
    "Simulation",
    "center_cap",
    "crowding_distance",
    "deliver",
    "evaluate",
    "fast_nondominated_sort",
    "fit_local",
    "generate_reference_vectors",
    "igd",
    "kmeans_centers",
    "latin_hypercube",
    "nondominated_filter",
    "nsga2_optimize",
    "polynomial_mutation",
    "predict",
    "remove_redundant",
    "run_experiment",
    "rvea_optimize",
    "sample_pareto_front",
    "sbx_crossover",
    "select_candidates",
    "select_participants",
    "sgd_train",
    "simplex_lattice",
    "sorted_average",
    "spread_heuristic",
    "sweep",
    "truncate_dataset",
]

__version__ = "0.1.0"
