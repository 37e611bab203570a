"""
Domain exceptions for pfnlab.
Every error carries a human-readable message plus the coordinates needed to
locate the problem (row, column, layer, step, tensor name...).
"""
from typing import Any, Dict, Optional


class PfnLabError(Exception):
    """Base class for all pfnlab domain errors."""

    def __init__(self, message: str, **context: Any):
        self.message = message
        self.context: Dict[str, Any] = context
        super().__init__(self.message)


# CONFIGURATION

class ConfigurationError(PfnLabError):
    """Invalid or inconsistent experiment configuration."""


# DATA VALIDATION

class DataValidationError(PfnLabError):
    """Input data violates the dataset contract."""


class DatasetNotFoundError(DataValidationError, FileNotFoundError):
    def __init__(self, path: str):
        super().__init__(f"Dataset file not found: {path}", path=path)


class SchemaMismatchError(DataValidationError):
    def __init__(self, message: str, row_index: Optional[int] = None):
        self.row_index = row_index
        super().__init__(message, row_index=row_index)


class ParseError(DataValidationError):
    def __init__(self, row_index: int, column: str, value: str):
        self.row_index = row_index
        self.column = column
        super().__init__(
            f"Non-numeric or non-finite value {value!r} in numeric column {column!r} at row {row_index}",
            row_index=row_index,
            column=column,
        )


class MissingTargetError(DataValidationError):
    def __init__(self, row_index: int):
        self.row_index = row_index
        super().__init__(f"Target value missing at row {row_index}", row_index=row_index)


class TooManyClassesError(DataValidationError):
    def __init__(self, n_classes: int, max_classes: int):
        super().__init__(
            f"Classification target has {n_classes} distinct values (max {max_classes})",
            n_classes=n_classes,
            max_classes=max_classes,
        )


class TooManyFeaturesError(DataValidationError):
    def __init__(self, n_features: int, max_features: int):
        super().__init__(
            f"Dataset has {n_features} features (max {max_features})",
            n_features=n_features,
            max_features=max_features,
        )


class DegenerateSplitError(DataValidationError):
    """A split would leave one side empty."""


class EmptyColumnError(DataValidationError):
    def __init__(self, column: str = ""):
        super().__init__(f"Column {column!r} has no observed values", column=column)


class AllFeaturesMissingError(DataValidationError):
    def __init__(self, row_index: Optional[int] = None):
        self.row_index = row_index
        super().__init__(f"All features missing in row {row_index}", row_index=row_index)


class UnseenLabelError(DataValidationError):
    def __init__(self, label: Any):
        self.label = label
        super().__init__(f"Label {label!r} not present in the fitted label mapping", label=label)


# MODEL

class ModelError(PfnLabError):
    """Failure inside the retrieval transformer."""


class DimensionMismatchError(ModelError):
    pass


class NonFiniteActivationError(ModelError):
    def __init__(self, layer: int):
        self.layer = layer
        super().__init__(f"Non-finite activation after layer {layer}", layer=layer)


class NonFiniteGradientError(ModelError):
    def __init__(self, parameter: str):
        self.parameter = parameter
        super().__init__(f"Non-finite gradient for {parameter}", parameter=parameter)


class CheckpointMismatchError(ModelError):
    def __init__(self, name: str, expected: Any, found: Any):
        self.name = name
        super().__init__(
            f"Checkpoint mismatch on {name}: expected {expected}, found {found}",
            name=name,
            expected=expected,
            found=found,
        )


# TRAINING

class TrainingError(PfnLabError):
    """Failure in a training loop."""


class NonFiniteUpdateError(TrainingError):
    def __init__(self, step: int, parameter: str = ""):
        self.step = step
        super().__init__(
            f"Non-finite parameter {parameter!r} after update at step {step}",
            step=step,
            parameter=parameter,
        )


class IrreducibleDegeneracyError(TrainingError):
    """Support/query resplitting could not satisfy class coverage."""


class PriorDegeneracyError(TrainingError):
    """The prior kept producing episodes with classes absent from support."""


# INFERENCE

class InferenceError(PfnLabError):
    pass


class SupportBudgetExceededError(InferenceError):
    def __init__(self, n_train: int, budget: int):
        super().__init__(
            f"Training set has {n_train} rows, above the support budget of {budget}; "
            "switch inference.mode to 'ensemble'",
            n_train=n_train,
            budget=budget,
        )


# BENCH

class BenchError(PfnLabError):
    pass


class LengthMismatchError(BenchError):
    def __init__(self, n_preds: int, n_truth: int):
        super().__init__(
            f"Predictions ({n_preds}) and truth ({n_truth}) differ in length",
            n_preds=n_preds,
            n_truth=n_truth,
        )


class InsufficientVariantsError(BenchError):
    pass


# Errors that map to CLI exit code 1 (configuration / validation)
USER_FACING_ERRORS = (
    ConfigurationError,
    DataValidationError,
    CheckpointMismatchError,
    DimensionMismatchError,
    SupportBudgetExceededError,
    InsufficientVariantsError,
)
