"""
Preprocessing domain models.
Fitted transformation state and the processed feature matrix fed to the model.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from pfnlab.core.models.dataset import ColumnSchema, TaskKind


class QuantileOutput(str, Enum):
    """Output distribution of a quantile map."""
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class QuantileMap:
    """
    Piecewise-linear map from raw values to quantile ranks.

    Knots are sorted strictly by input value; duplicated inputs are collapsed
    to a single knot carrying the mean of their ranks.
    """
    knot_values: np.ndarray
    knot_ranks: np.ndarray
    n_quantiles: int
    output_kind: QuantileOutput = QuantileOutput.UNIFORM

    @property
    def knots(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.knot_values.tolist(), self.knot_ranks.tolist()))

    @property
    def is_constant(self) -> bool:
        return self.knot_values.size == 1


@dataclass(frozen=True)
class LabelEncoding:
    """Class value -> dense index, in first-appearance order."""
    classes: Tuple[Any, ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def index(self) -> Dict[Any, int]:
        return {label: i for i, label in enumerate(self.classes)}


@dataclass(frozen=True)
class CategoryEncoding:
    """Category text -> integer code, in first-appearance order."""
    categories: Tuple[Any, ...]

    @property
    def index(self) -> Dict[Any, int]:
        return {category: i for i, category in enumerate(self.categories)}


@dataclass(frozen=True)
class PreprocessState:
    """
    Everything fitted on training rows.

    Exactly one of `label_encoding` (classification) and `target_map`
    (regression) is set.
    """
    feature_columns: Tuple[ColumnSchema, ...]
    feature_maps: Tuple[QuantileMap, ...]
    category_encodings: Dict[int, CategoryEncoding]
    task: TaskKind
    max_features: int
    label_encoding: Optional[LabelEncoding] = None
    target_map: Optional[QuantileMap] = None

    @property
    def n_features(self) -> int:
        return len(self.feature_columns)

    @property
    def n_classes(self) -> Optional[int]:
        return self.label_encoding.n_classes if self.label_encoding else None


@dataclass(frozen=True, eq=False)
class ProcessedMatrix:
    """
    Quantile-transformed, scaled and zero-padded features.

    `values` is n_rows x max_features; `effective_counts` holds d_f^i per row.
    """
    values: np.ndarray
    effective_counts: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("ProcessedMatrix values must be 2-dimensional")
        if self.effective_counts.shape != (self.values.shape[0],):
            raise ValueError("effective_counts must have one entry per row")

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    def take(self, indices) -> "ProcessedMatrix":
        rows = np.asarray(indices, dtype=int)
        return ProcessedMatrix(values=self.values[rows], effective_counts=self.effective_counts[rows])


@dataclass(frozen=True, eq=False)
class PreparedTable:
    """
    A preprocessed dataset: processed features, encoded targets and the state
    that produced them. Classification targets are dense class indices stored
    as floats (-1 marks a label unseen at fit time).
    """
    features: ProcessedMatrix
    targets: np.ndarray
    state: PreprocessState
    raw_targets: Tuple[Any, ...] = field(default=())

    @property
    def n_rows(self) -> int:
        return self.features.n_rows

    @property
    def task(self) -> TaskKind:
        return self.state.task

    @property
    def n_classes(self) -> Optional[int]:
        return self.state.n_classes

    def take(self, indices) -> "PreparedTable":
        rows = np.asarray(indices, dtype=int)
        raw = tuple(self.raw_targets[i] for i in rows) if self.raw_targets else ()
        return PreparedTable(
            features=self.features.take(rows),
            targets=self.targets[rows],
            state=self.state,
            raw_targets=raw,
        )
