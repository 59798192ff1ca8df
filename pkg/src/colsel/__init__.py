"""Greedy column subset selection, sketching, and a partitioned pipeline."""

from .distributed import (
    DistributedConfig,
    DistributedReport,
    Partition,
    PartitionResult,
    distributed_select,
    map_phase,
    naive_distributed_baseline,
    partition_columns,
    reduce_phase,
)
from .evaluate import (
    EvalReport,
    MetricUndefinedError,
    evaluate_selection,
    hybrid_select,
    naive_generalized_oracle,
    naive_greedy_oracle,
    relative_accuracy,
    sketch_svd_select,
    uniform_select,
)
from .generalized import GeneralizedState, generalized_init, generalized_select
from .greedy import (
    SelectionResult,
    SelectionState,
    greedy_select,
    init_state,
    select_next,
)
from .linalg import (
    DegenerateBasisError,
    SvdResult,
    approx_svd_from_columns,
    as_matrix,
    embed_columns,
    frobenius_sq,
    orthonormal_basis,
    project_onto_columns,
    randomized_svd,
    rank_k_column_approx,
    reconstruction_error,
)
from .matrixio import MatrixFormatError, load_matrix, save_matrix
from .seeds import derive_seed
from .sketch import SketchSpec, sketch_matrix, sketch_partitioned, sketch_row

__version__ = "0.1.0"

__all__ = [
    "DistributedConfig",
    "DistributedReport",
    "Partition",
    "PartitionResult",
    "distributed_select",
    "map_phase",
    "naive_distributed_baseline",
    "partition_columns",
    "reduce_phase",
    "EvalReport",
    "MetricUndefinedError",
    "evaluate_selection",
    "hybrid_select",
    "naive_generalized_oracle",
    "naive_greedy_oracle",
    "relative_accuracy",
    "sketch_svd_select",
    "uniform_select",
    "GeneralizedState",
    "generalized_init",
    "generalized_select",
    "SelectionResult",
    "SelectionState",
    "greedy_select",
    "init_state",
    "select_next",
    "DegenerateBasisError",
    "SvdResult",
    "approx_svd_from_columns",
    "as_matrix",
    "embed_columns",
    "frobenius_sq",
    "orthonormal_basis",
    "project_onto_columns",
    "randomized_svd",
    "rank_k_column_approx",
    "reconstruction_error",
    "MatrixFormatError",
    "load_matrix",
    "save_matrix",
    "derive_seed",
    "SketchSpec",
    "sketch_matrix",
    "sketch_partitioned",
    "sketch_row",
]
