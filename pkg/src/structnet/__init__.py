"""Graph/JSD feature interaction scores and ADMM structurally interacting elastic net."""

from .admm import (
    Baseline,
    FactoredSystem,
    SolverConfig,
    SolverResult,
    SolverState,
    precompute,
    solve,
    solve_baseline,
    update_beta,
    update_gamma,
    update_z,
)
from .data import (
    FeatureMatrix,
    StandardizationRecord,
    Target,
    TargetKind,
    class_means,
    load_csv,
    standardize,
    write_csv,
)
from .errors import *  # noqa: F401,F403
from .graphs import (
    FeatureGraph,
    build_feature_graph,
    build_target_graph_continuous,
    build_target_graph_discrete,
    vertex_distribution,
)
from .info import (
    InteractionMatrix,
    build_interaction_matrix,
    jsd,
    relevance,
    shannon_entropy,
    similarity,
)
from .selection import (
    EvalReport,
    Method,
    SelectionReport,
    accuracy_curve,
    knn_cross_validate,
    rank_features,
    select_features,
    synthetic_benchmark,
)

__version__ = "0.1.0"
