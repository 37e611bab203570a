"""
Core domain models for pfnlab.
"""
from .dataset import ColumnKind, ColumnSchema, Dataset, DatasetSource, SplitSpec, TaskKind
from .episode import AttentionMask, Episode
from .inference import InferenceConfig, InferenceMode, Predictions
from .results import EvaluationOutcome, PredictionOutcome, TrainingOutcome
from .preprocessing import (
    CategoryEncoding,
    LabelEncoding,
    PreparedTable,
    PreprocessState,
    ProcessedMatrix,
    QuantileMap,
    QuantileOutput,
)
from .scores import (
    BenchDataset,
    ComparisonReport,
    Metrics,
    ScoreEntry,
    ScoreTable,
    VariantMethod,
    VariantSpec,
)
from .training import LRSchedule, PriorConfig, StepRecord, TrainConfig, TrainingHistory, TrainRegime
from .transformer import ModelConfig

__all__ = [
    "EvaluationOutcome",
    "PredictionOutcome",
    "TrainingOutcome",
    "ColumnKind",
    "ColumnSchema",
    "Dataset",
    "DatasetSource",
    "SplitSpec",
    "TaskKind",
    "AttentionMask",
    "Episode",
    "InferenceConfig",
    "InferenceMode",
    "Predictions",
    "CategoryEncoding",
    "LabelEncoding",
    "PreparedTable",
    "PreprocessState",
    "ProcessedMatrix",
    "QuantileMap",
    "QuantileOutput",
    "BenchDataset",
    "ComparisonReport",
    "Metrics",
    "ScoreEntry",
    "ScoreTable",
    "VariantMethod",
    "VariantSpec",
    "LRSchedule",
    "PriorConfig",
    "StepRecord",
    "TrainConfig",
    "TrainingHistory",
    "TrainRegime",
    "ModelConfig",
]
