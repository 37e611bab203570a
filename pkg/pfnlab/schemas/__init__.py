from .experiment import (
    BenchSection,
    ColumnSpec,
    DatasetSection,
    ExperimentConfig,
    InferenceSection,
    ModelSection,
    PriorSection,
    SyntheticSuiteSection,
    TrainSection,
    VariantSection,
)

__all__ = [
    "BenchSection",
    "ColumnSpec",
    "DatasetSection",
    "ExperimentConfig",
    "InferenceSection",
    "ModelSection",
    "PriorSection",
    "SyntheticSuiteSection",
    "TrainSection",
    "VariantSection",
]
