"""Relationship-oblivious bot detection over a cosine-similarity user graph."""

from .errors import (
    BatchTooSmallError,
    BotsageError,
    DataError,
    DegenerateLabelsError,
    DimensionError,
    DuplicateUserError,
    EmptyInputError,
    EmptyMaskError,
    FormatError,
    MissingMetadataError,
    ModelMismatchError,
    TrainingDivergedError,
)
from .estimator import BotSageClassifier
from .evaluation import (
    AblationRow,
    ConfusionMatrix,
    CurvePoint,
    EvalResult,
    Metrics,
    SweepPoint,
    ablate,
    confusion,
    evaluate_model,
    export_node_embeddings,
    metrics,
    pr_curve,
    roc_auc,
    sweep_accuracy,
)
from .features import (
    AUX_NAMES,
    FusedMatrix,
    NormalizationStats,
    build_fused_matrix,
    extract_auxiliary,
    fallback_featurize,
    fuse,
    normalize_auxiliary,
    pool_tweets,
    read_fused,
    write_fused,
)
from .graph import (
    GraphStats,
    SimilarityGraph,
    build_graph,
    cosine_similarity,
    graph_stats,
    load_graph,
    save_graph,
    sweep_threshold,
)
from .ingest import (
    Dataset,
    EmbeddingStore,
    UserRecord,
    ValidationReport,
    load_dataset,
    read_embeddings,
    save_dataset_jsonl,
    validate_dataset,
    write_embeddings,
)
from .sage import (
    Model,
    TrainConfig,
    aggregate_neighbors,
    fit_network,
    load_model,
    loss,
    mlp_forward,
    predict,
    sage_forward,
    save_model,
    softmax_rows,
    stratified_split,
    train,
    train_prepared,
)

__version__ = "0.1.0"

__all__ = [
    "AUX_NAMES",
    "AblationRow",
    "BatchTooSmallError",
    "BotSageClassifier",
    "BotsageError",
    "ConfusionMatrix",
    "CurvePoint",
    "DataError",
    "Dataset",
    "DegenerateLabelsError",
    "DimensionError",
    "DuplicateUserError",
    "EmbeddingStore",
    "EmptyInputError",
    "EmptyMaskError",
    "EvalResult",
    "FormatError",
    "FusedMatrix",
    "GraphStats",
    "Metrics",
    "MissingMetadataError",
    "Model",
    "ModelMismatchError",
    "NormalizationStats",
    "SimilarityGraph",
    "SweepPoint",
    "TrainConfig",
    "TrainingDivergedError",
    "UserRecord",
    "ValidationReport",
    "ablate",
    "aggregate_neighbors",
    "build_fused_matrix",
    "build_graph",
    "confusion",
    "cosine_similarity",
    "evaluate_model",
    "export_node_embeddings",
    "extract_auxiliary",
    "fallback_featurize",
    "fit_network",
    "fuse",
    "graph_stats",
    "load_dataset",
    "load_graph",
    "load_model",
    "loss",
    "metrics",
    "mlp_forward",
    "normalize_auxiliary",
    "pool_tweets",
    "pr_curve",
    "predict",
    "read_embeddings",
    "read_fused",
    "roc_auc",
    "sage_forward",
    "save_dataset_jsonl",
    "save_graph",
    "save_model",
    "softmax_rows",
    "stratified_split",
    "sweep_accuracy",
    "sweep_threshold",
    "train",
    "train_prepared",
    "validate_dataset",
    "write_embeddings",
    "write_fused",
]
