"""
Experiment config file schema.
Every section rejects unknown keys.
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from pfnlab.core.models.dataset import ColumnKind, TaskKind
from pfnlab.core.models.inference import InferenceMode
from pfnlab.core.models.preprocessing import QuantileOutput
from pfnlab.core.models.scores import VariantMethod
from pfnlab.core.models.training import LRSchedule
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.services.tabular_constraints import TabularConstraints

_MODEL_DEFAULTS = ModelConfig()


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _ordered_range(value: Tuple[int, int]) -> Tuple[int, int]:
    if value[0] > value[1]:
        raise ValueError(f"range minimum exceeds maximum: {value}")
    return value


class ColumnSpec(StrictModel):
    name: str = Field(..., min_length=1)
    kind: ColumnKind = ColumnKind.NUMERIC
    target: bool = False


class DatasetSection(StrictModel):
    """A CSV file, its columns in file order and the split protocol."""
    path: str
    task: TaskKind
    columns: List[ColumnSpec] = Field(..., min_length=2)
    train_fraction: float = Field(default=TabularConstraints.DEFAULT_TRAIN_FRACTION, gt=0.0, lt=1.0)
    split_seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_columns(self) -> "DatasetSection":
        targets = [column.name for column in self.columns if column.target]
        if len(targets) != 1:
            raise ValueError(f"exactly one column must be the target, found {len(targets)}")
        names = [column.name for column in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        return self


class ModelSection(StrictModel):
    hidden_dim: int = Field(default=_MODEL_DEFAULTS.hidden_dim, ge=1)
    n_layers: int = Field(default=_MODEL_DEFAULTS.n_layers, ge=0)
    n_heads: int = Field(default=_MODEL_DEFAULTS.n_heads, ge=1)
    feedforward_dim: int = Field(default=_MODEL_DEFAULTS.feedforward_dim, ge=1)
    max_features: int = Field(default=TabularConstraints.MAX_FEATURES, ge=1)
    max_classes: int = Field(default=TabularConstraints.MAX_CLASSES, ge=2, le=TabularConstraints.MAX_CLASSES)
    query_attends_self: bool = True
    dtype: Literal["float32", "float64"] = "float32"
    quantile_output: QuantileOutput = QuantileOutput.UNIFORM

    @model_validator(mode="after")
    def check_heads(self) -> "ModelSection":
        if self.hidden_dim % self.n_heads != 0:
            raise ValueError(f"hidden_dim {self.hidden_dim} must be divisible by n_heads {self.n_heads}")
        return self


class PriorSection(StrictModel):
    min_rows: int = Field(default=50, ge=2)
    max_rows: int = Field(default=TabularConstraints.MAX_PRIOR_ROWS, le=TabularConstraints.MAX_PRIOR_ROWS)
    feature_count_range: Tuple[int, int] = (2, 20)
    class_count_range: Tuple[int, int] = (2, TabularConstraints.MAX_CLASSES)
    latent_width_range: Tuple[int, int] = (8, 64)
    mixture_components_range: Tuple[int, int] = (1, 4)
    component_separation: float = Field(default=2.0, ge=0.0)
    noise_scale: float = Field(default=0.1, ge=0.0)
    missing_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    support_fraction: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    seed: Optional[int] = Field(default=None, ge=0)

    @field_validator(
        "feature_count_range", "class_count_range", "latent_width_range", "mixture_components_range"
    )
    @classmethod
    def check_ranges(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        return _ordered_range(value)


class TrainSection(StrictModel):
    """Learning rate and weight decay default to the regime of the command."""
    learning_rate: Optional[float] = Field(default=None, gt=0.0)
    weight_decay: Optional[float] = Field(default=None, ge=0.0)
    max_steps: int = Field(default=1000, ge=0)
    eval_every: int = Field(default=TabularConstraints.DEFAULT_EVAL_EVERY, ge=1)
    patience: int = Field(default=TabularConstraints.DEFAULT_PATIENCE, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    support_fraction: float = Field(default=TabularConstraints.DEFAULT_SUPPORT_FRACTION, gt=0.0, lt=1.0)
    validation_fraction: float = Field(default=TabularConstraints.DEFAULT_VALIDATION_FRACTION, gt=0.0, lt=1.0)
    schedule: LRSchedule = LRSchedule.CONSTANT
    grad_clip_norm: Optional[float] = Field(default=TabularConstraints.GRAD_CLIP_NORM, gt=0.0)
    max_resplit_attempts: int = Field(default=32, ge=1)
    eval_episodes: int = Field(default=16, ge=0)


class InferenceSection(StrictModel):
    mode: InferenceMode = InferenceMode.FULL_CONTEXT
    support_budget: int = Field(default=TabularConstraints.SUPPORT_BUDGET, ge=1)
    subset_size: int = Field(default=TabularConstraints.ENSEMBLE_SUBSET_SIZE, ge=1)
    n_ensembles: int = Field(default=TabularConstraints.ENSEMBLE_MEMBERS, ge=1)
    query_chunk_size: int = Field(default=1024, ge=1)
    resample_per_observation: bool = False
    seed: Optional[int] = Field(default=None, ge=0)


class VariantSection(StrictModel):
    """One compared variant; learning rate and weight decay default per method."""
    name: str = Field(..., min_length=1)
    method: VariantMethod
    inference: InferenceSection = Field(default_factory=InferenceSection)
    learning_rate: Optional[float] = Field(default=None, gt=0.0)
    weight_decay: Optional[float] = Field(default=None, ge=0.0)


class SyntheticSuiteSection(StrictModel):
    n_classification: int = Field(default=10, ge=0)
    n_regression: int = Field(default=0, ge=0)
    row_range: Tuple[int, int] = (500, 2000)
    feature_range: Tuple[int, int] = (2, 10)
    class_range: Tuple[int, int] = (2, 4)
    mixed_fraction: float = Field(default=0.3, ge=0.0, le=1.0)
    seed: Optional[int] = Field(default=None, ge=0)

    @field_validator("row_range", "feature_range", "class_range")
    @classmethod
    def check_ranges(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        return _ordered_range(value)


class BenchDatasetSpec(StrictModel):
    id: str = Field(..., min_length=1)
    dataset: DatasetSection


class BenchSection(StrictModel):
    variants: List[VariantSection] = Field(default_factory=list)
    datasets: List[BenchDatasetSpec] = Field(default_factory=list)
    synthetic_suite: Optional[SyntheticSuiteSection] = None
    checkpoint: Optional[str] = None
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def check_names(self) -> "BenchSection":
        names = [variant.name for variant in self.variants]
        if len(set(names)) != len(names):
            raise ValueError("variant names must be unique")
        return self


class ExperimentConfig(StrictModel):
    """The whole experiment file. Section seeds default to `seed`."""
    seed: int = Field(default=0, ge=0)
    dataset: Optional[DatasetSection] = None
    model: ModelSection = Field(default_factory=ModelSection)
    prior: PriorSection = Field(default_factory=PriorSection)
    train: TrainSection = Field(default_factory=TrainSection)
    inference: InferenceSection = Field(default_factory=InferenceSection)
    bench: Optional[BenchSection] = None
