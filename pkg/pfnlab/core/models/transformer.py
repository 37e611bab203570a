"""
Retrieval transformer configuration.
"""
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Iterable, Optional

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.preprocessing import QuantileOutput
from pfnlab.core.services.tabular_constraints import TabularConstraints


@dataclass(frozen=True)
class ModelConfig:
    """Shape of the retrieval transformer."""
    hidden_dim: int = 256
    n_layers: int = 4
    n_heads: int = 4
    feedforward_dim: int = 512
    max_features: int = TabularConstraints.MAX_FEATURES
    max_classes: int = TabularConstraints.MAX_CLASSES
    task: TaskKind = TaskKind.CLASSIFICATION
    query_attends_self: bool = True
    dtype: str = "float32"
    quantile_output: QuantileOutput = QuantileOutput.UNIFORM

    def __post_init__(self):
        if self.hidden_dim % self.n_heads != 0:
            raise ValueError(
                f"hidden_dim {self.hidden_dim} must be divisible by n_heads {self.n_heads}"
            )
        if self.task == TaskKind.CLASSIFICATION and not 2 <= self.max_classes <= TabularConstraints.MAX_CLASSES:
            raise ValueError(f"max_classes must be in [2, {TabularConstraints.MAX_CLASSES}]")
        if self.max_features < 1 or self.n_layers < 0 or self.feedforward_dim < 1:
            raise ValueError("max_features, feedforward_dim must be positive and n_layers non-negative")
        object.__setattr__(self, "quantile_output", QuantileOutput(self.quantile_output))
        if self.dtype not in ("float32", "float64"):
            raise ValueError("dtype must be float32 or float64")

    @property
    def head_dim(self) -> int:
        return self.hidden_dim // self.n_heads

    @property
    def output_dim(self) -> int:
        return self.max_classes if self.task == TaskKind.CLASSIFICATION else 1

    def for_task(self, task: TaskKind) -> "ModelConfig":
        return replace(self, task=task)

    def first_difference(self, other: "ModelConfig", skip: Iterable[str] = ()) -> Optional[str]:
        """Name of the first field that differs from `other`, in declaration order."""
        skipped = set(skip)
        for field in fields(self):
            if field.name not in skipped and getattr(self, field.name) != getattr(other, field.name):
                return field.name
        return None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["task"] = self.task.value
        data["quantile_output"] = self.quantile_output.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelConfig":
        values = dict(data)
        values["task"] = TaskKind(values["task"])
        values["quantile_output"] = QuantileOutput(values.get("quantile_output", QuantileOutput.UNIFORM.value))
        return cls(**values)
