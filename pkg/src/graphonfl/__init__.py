"""Link-probability matrix estimation from a single observed graph.

Order the nodes so that similar rows of the adjacency matrix become
neighbors (greedy nearest-neighbor tour under a pluggable node metric,
or a plain degree sort), then denoise the reordered matrix with an
exactly-certified 2D grid fused lasso. Includes simulation from builtin
graphons, cross-validation for the penalty level, a USVT comparator,
and MSE / link-prediction AUC benchmark harnesses.
"""

__version__ = "0.1.0"

from .estimator import (
    EstimatorConfig,
    GraphonEstimate,
    block_estimate,
    cross_validate_lambda,
    estimate,
    split_indices,
    usvt_comparator,
)
from .evalbench import (
    BenchmarkResult,
    LinkPredResult,
    auc_roc,
    link_prediction_run,
    link_prediction_trial,
    mask_links,
    monte_carlo_benchmark,
    mse_upper,
)
from .matio import (
    load_dense_csv,
    load_edge_tsv,
    load_matrix,
    save_dense_csv,
    save_edge_tsv,
    save_matrix,
)
from .metrics import (
    MetricMatrix,
    TriangleReport,
    degree_metric,
    inner_product_metric,
    l1_metric,
    triangle_check,
)
from .ordering import Tour, brute_force_optimal_tour, nn_tour, sort_ordering, tour_cost
from .rng import DEFAULT_SEED, derive_seed, substream
from .sim import (
    BUILTIN_GRAPHONS,
    Graphon,
    LatentPositions,
    builtin_graphon,
    probability_matrix,
    sample_adjacency,
    sample_latents,
    validate_adjacency,
    validate_graphon,
    validate_probability_matrix,
)
from .tvdenoise import (
    FusedLassoFit,
    GridSignal,
    duality_gap,
    fused_lasso_grid,
    grid_tv,
    tv1d_prox,
)

__all__ = [
    "BUILTIN_GRAPHONS",
    "BenchmarkResult",
    "DEFAULT_SEED",
    "EstimatorConfig",
    "FusedLassoFit",
    "Graphon",
    "GraphonEstimate",
    "GridSignal",
    "LatentPositions",
    "LinkPredResult",
    "MetricMatrix",
    "Tour",
    "TriangleReport",
    "auc_roc",
    "block_estimate",
    "brute_force_optimal_tour",
    "builtin_graphon",
    "cross_validate_lambda",
    "degree_metric",
    "derive_seed",
    "duality_gap",
    "estimate",
    "fused_lasso_grid",
    "grid_tv",
    "inner_product_metric",
    "l1_metric",
    "link_prediction_run",
    "link_prediction_trial",
    "load_dense_csv",
    "load_edge_tsv",
    "load_matrix",
    "mask_links",
    "monte_carlo_benchmark",
    "mse_upper",
    "nn_tour",
    "probability_matrix",
    "sample_adjacency",
    "sample_latents",
    "save_dense_csv",
    "save_edge_tsv",
    "save_matrix",
    "sort_ordering",
    "split_indices",
    "substream",
    "tour_cost",
    "triangle_check",
    "tv1d_prox",
    "usvt_comparator",
    "validate_adjacency",
    "validate_graphon",
    "validate_probability_matrix",
    "__version__",
]
