"""Density peak clustering with oracle query accounting, a simulated
quantum minimum finder, and the scaling studies built on both."""

from .data import (
    Dataset,
    DistanceOracle,
    ParseError,
    QueryLedger,
    dataset_from_json,
    derive_seed,
    generate_gaussian_mixture,
    generate_uniform_ball,
    load_csv,
    load_dataset_json,
    pca_project,
    save_dataset_csv,
    save_dataset_json,
    standardize,
)
from .decision import DecisionOutcome, decide_same_cluster, find_root
from .dpc import (
    NOISE,
    ClusterAssignment,
    Kernel,
    NearestHigherForest,
    Thresholds,
    assign_clusters,
    build_forest,
    classify,
    compute_all_densities,
    compute_density,
    forest_to_json,
    nearest_higher,
    raw_densities,
    tree_heights,
)
from .qmf import (
    QmfConfig,
    QmfResult,
    QuantumDecisionOutcome,
    SearchProblem,
    qmf_minimum,
    quantum_decide,
    quantum_nearest_higher,
)
from .scaling import (
    decision_benchmark,
    fit_power_law,
    height_scaling,
    nn_scaling,
)
from .toy import load_toy_fixture, toy_experiment

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DistanceOracle",
    "ParseError",
    "QueryLedger",
    "dataset_from_json",
    "derive_seed",
    "generate_gaussian_mixture",
    "generate_uniform_ball",
    "load_csv",
    "load_dataset_json",
    "pca_project",
    "save_dataset_csv",
    "save_dataset_json",
    "standardize",
    "DecisionOutcome",
    "decide_same_cluster",
    "find_root",
    "NOISE",
    "ClusterAssignment",
    "Kernel",
    "NearestHigherForest",
    "Thresholds",
    "assign_clusters",
    "build_forest",
    "classify",
    "compute_all_densities",
    "compute_density",
    "forest_to_json",
    "nearest_higher",
    "raw_densities",
    "tree_heights",
    "QmfConfig",
    "QmfResult",
    "QuantumDecisionOutcome",
    "SearchProblem",
    "qmf_minimum",
    "quantum_decide",
    "quantum_nearest_higher",
    "decision_benchmark",
    "fit_power_law",
    "height_scaling",
    "nn_scaling",
    "load_toy_fixture",
    "toy_experiment",
    "__version__",
]
