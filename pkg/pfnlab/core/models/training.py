"""
Training domain models: regimes, training and prior configuration, history.
"""
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pfnlab.core.services.tabular_constraints import TabularConstraints


class TrainRegime(str, Enum):
    PRETRAIN = "pretrain"
    FINETUNE = "finetune"
    SCRATCH = "scratch"


class LRSchedule(str, Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


@dataclass(frozen=True)
class TrainConfig:
    """
    Optimisation settings for one training run.

    Leaving `learning_rate` or `weight_decay` unset picks the regime default:
    finetune 1e-5 / 0, scratch 1e-4 / 1e-5.
    """
    regime: TrainRegime
    learning_rate: Optional[float] = None
    weight_decay: Optional[float] = None
    max_steps: int = 1000
    eval_every: int = TabularConstraints.DEFAULT_EVAL_EVERY
    patience: int = TabularConstraints.DEFAULT_PATIENCE
    seed: int = 0
    support_fraction: float = TabularConstraints.DEFAULT_SUPPORT_FRACTION
    schedule: LRSchedule = LRSchedule.CONSTANT
    grad_clip_norm: Optional[float] = TabularConstraints.GRAD_CLIP_NORM
    max_resplit_attempts: int = 32
    eval_episodes: int = 16

    def __post_init__(self):
        default_lr, default_wd = TabularConstraints.regime_defaults(TrainRegime(self.regime).value)
        object.__setattr__(self, "regime", TrainRegime(self.regime))
        if self.learning_rate is None:
            object.__setattr__(self, "learning_rate", default_lr)
        if self.weight_decay is None:
            object.__setattr__(self, "weight_decay", default_wd)

        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if self.eval_every < 1 or self.patience < 1:
            raise ValueError("eval_every and patience must be at least 1")
        if not 0.0 < self.support_fraction < 1.0:
            raise ValueError("support_fraction must be in (0, 1)")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["regime"] = self.regime.value
        data["schedule"] = LRSchedule(self.schedule).value
        return data


@dataclass(frozen=True)
class PriorConfig:
    """
    Synthetic classification prior.

    Tasks are drawn as: Gaussian mixture inputs -> random 2-layer tanh map ->
    scalar score plus noise -> binned at random quantile thresholds.
    """
    min_rows: int = 50
    max_rows: int = TabularConstraints.MAX_PRIOR_ROWS
    feature_count_range: Tuple[int, int] = (2, 20)
    class_count_range: Tuple[int, int] = (2, TabularConstraints.MAX_CLASSES)
    latent_width_range: Tuple[int, int] = (8, 64)
    mixture_components_range: Tuple[int, int] = (1, 4)
    component_separation: float = 2.0
    noise_scale: float = 0.1
    missing_rate: float = 0.0
    identity_map: bool = False
    seed: int = 0
    max_resample_attempts: int = 1000

    def __post_init__(self):
        if not 2 <= self.min_rows <= self.max_rows <= TabularConstraints.MAX_PRIOR_ROWS:
            raise ValueError(f"Need 2 <= min_rows <= max_rows <= {TabularConstraints.MAX_PRIOR_ROWS}")
        low, high = self.feature_count_range
        if not 1 <= low <= high:
            raise ValueError("feature_count_range must satisfy 1 <= min <= max")
        low, high = self.class_count_range
        if not 2 <= low <= high <= TabularConstraints.MAX_CLASSES:
            raise ValueError(f"class_count_range must lie within [2, {TabularConstraints.MAX_CLASSES}]")
        low, high = self.latent_width_range
        if not 1 <= low <= high:
            raise ValueError("latent_width_range must satisfy 1 <= min <= max")
        low, high = self.mixture_components_range
        if not 1 <= low <= high:
            raise ValueError("mixture_components_range must satisfy 1 <= min <= max")
        if self.noise_scale < 0 or not 0.0 <= self.missing_rate < 1.0:
            raise ValueError("noise_scale must be >= 0 and missing_rate in [0, 1)")

    def validate_against(self, max_features: int, max_classes: int) -> None:
        if self.feature_count_range[1] > max_features:
            raise ValueError(
                f"Prior feature count {self.feature_count_range[1]} exceeds model max_features {max_features}"
            )
        if self.class_count_range[1] > max_classes:
            raise ValueError(
                f"Prior class count {self.class_count_range[1]} exceeds model max_classes {max_classes}"
            )


@dataclass(frozen=True)
class StepRecord:
    """One optimisation step; validation_metric is set on evaluation steps."""
    step: int
    loss: float
    smoothed_loss: float
    validation_metric: Optional[float] = None

    def to_log_line(self) -> str:
        metric = "nan" if self.validation_metric is None else f"{self.validation_metric:.10g}"
        return f"{self.step}\t{self.loss:.10g}\t{metric}"


@dataclass
class TrainingHistory:
    records: List[StepRecord] = field(default_factory=list)

    def append(self, record: StepRecord) -> None:
        self.records.append(record)

    @property
    def losses(self) -> List[float]:
        return [record.loss for record in self.records]

    @property
    def evaluations(self) -> List[StepRecord]:
        return [record for record in self.records if record.validation_metric is not None]

    @property
    def best_validation_metric(self) -> float:
        metrics = [record.validation_metric for record in self.evaluations]
        return max(metrics) if metrics else -math.inf

    def __len__(self) -> int:
        return len(self.records)
