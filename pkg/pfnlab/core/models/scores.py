"""
Benchmark domain models: metrics, score tables and compared variants.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pfnlab.core.models.dataset import Dataset, SplitSpec, TaskKind
from pfnlab.core.models.inference import InferenceConfig


@dataclass(frozen=True)
class Metrics:
    """Test-set metrics; only the field matching the task is set."""
    n_test: int
    accuracy: Optional[float] = None
    r2: Optional[float] = None

    @property
    def value(self) -> float:
        return self.accuracy if self.accuracy is not None else self.r2


class VariantMethod(str, Enum):
    SCRATCH = "scratch"
    ICL = "icl"
    FINETUNE = "finetune"

    @property
    def display_name(self) -> str:
        return {"scratch": "Scratch", "icl": "ICL", "finetune": "Fine-tune"}[self.value]


@dataclass(frozen=True)
class VariantSpec:
    """One compared configuration: how the model is obtained and how it predicts."""
    name: str
    method: VariantMethod
    inference: InferenceConfig

    @property
    def pretrained(self) -> bool:
        return self.method != VariantMethod.SCRATCH

    @property
    def finetuned(self) -> bool:
        return self.method == VariantMethod.FINETUNE

    @property
    def trains(self) -> bool:
        return self.method != VariantMethod.ICL


@dataclass(frozen=True, eq=False)
class BenchDataset:
    """A benchmark dataset; `split` overrides the comparison-wide protocol."""
    dataset_id: str
    dataset: Dataset
    split: Optional[SplitSpec] = None

    @property
    def category(self) -> str:
        """'<task>/<mixed|numerical>' following the feature-type split of the benchmark."""
        kind = "mixed" if self.dataset.has_categorical_features else "numerical"
        return f"{self.dataset.task.value}/{kind}"


CATEGORIES: Tuple[str, ...] = (
    f"{TaskKind.CLASSIFICATION.value}/mixed",
    f"{TaskKind.CLASSIFICATION.value}/numerical",
    f"{TaskKind.REGRESSION.value}/mixed",
    f"{TaskKind.REGRESSION.value}/numerical",
)


@dataclass(frozen=True)
class ScoreEntry:
    """Raw (None when the run failed) and normalized score of one cell."""
    dataset_id: str
    variant_id: str
    category: str
    raw: Optional[float]
    normalized: Optional[float] = None


@dataclass
class ScoreTable:
    """
    Scores keyed by (dataset, variant) plus per-variant aggregates.
    `aggregates` maps (variant, category) to the mean normalized score.
    """
    entries: List[ScoreEntry] = field(default_factory=list)
    aggregates: Dict[Tuple[str, str], float] = field(default_factory=dict)

    def add(self, dataset_id: str, variant_id: str, category: str, raw: Optional[float]) -> None:
        self.entries.append(ScoreEntry(dataset_id, variant_id, category, raw))

    @property
    def dataset_ids(self) -> List[str]:
        return list(dict.fromkeys(entry.dataset_id for entry in self.entries))

    @property
    def variant_ids(self) -> List[str]:
        return list(dict.fromkeys(entry.variant_id for entry in self.entries))

    def raw(self, dataset_id: str, variant_id: str) -> Optional[float]:
        return self._entry(dataset_id, variant_id).raw

    def normalized(self, dataset_id: str, variant_id: str) -> Optional[float]:
        return self._entry(dataset_id, variant_id).normalized

    def aggregate(self, variant_id: str, category: Optional[str] = None) -> Optional[float]:
        """Mean normalized score of a variant; across all categories when none is given."""
        if category is not None:
            return self.aggregates.get((variant_id, category))
        values = [
            entry.normalized for entry in self.entries
            if entry.variant_id == variant_id and entry.normalized is not None
        ]
        return sum(values) / len(values) if values else None

    def _entry(self, dataset_id: str, variant_id: str) -> ScoreEntry:
        for entry in self.entries:
            if entry.dataset_id == dataset_id and entry.variant_id == variant_id:
                return entry
        raise KeyError((dataset_id, variant_id))


@dataclass(frozen=True)
class ComparisonReport:
    table: ScoreTable
    rendered: str
    variants: Tuple[VariantSpec, ...]
