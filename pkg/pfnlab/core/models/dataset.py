"""
Dataset domain models.
Canonical in-memory representation of a tabular dataset before preprocessing.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Sequence, Tuple

import numpy as np


class TaskKind(str, Enum):
    """Prediction task."""
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class ColumnKind(str, Enum):
    """Feature column type."""
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class ColumnSchema:
    """One column of a dataset schema."""
    name: str
    kind: ColumnKind = ColumnKind.NUMERIC
    is_target: bool = False


def validate_schema(schema: Sequence[ColumnSchema]) -> None:
    """
    Check schema invariants.

    Raises:
        ValueError: If there is not exactly one target or names repeat
    """
    targets = [column.name for column in schema if column.is_target]
    if len(targets) != 1:
        raise ValueError(f"Schema must have exactly one target column, found {len(targets)}")
    names = [column.name for column in schema]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise ValueError(f"Duplicate column names in schema: {duplicates}")


_is_missing = np.vectorize(lambda value: value is None, otypes=[bool])


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A table of raw cells.

    `cells` is an object matrix (n_rows x n_columns) in schema order: numeric
    cells hold floats, categorical cells hold text, missing cells hold None.
    `missing_mask` is True exactly where a cell is None.
    """
    schema: Tuple[ColumnSchema, ...]
    cells: np.ndarray
    task: TaskKind
    missing_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        validate_schema(self.schema)
        if self.cells.ndim != 2 or self.cells.shape[1] != len(self.schema):
            raise ValueError(
                f"cells shape {self.cells.shape} does not match schema width {len(self.schema)}"
            )
        object.__setattr__(self, "missing_mask", _is_missing(self.cells))

    @property
    def n_rows(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.schema) - 1

    @property
    def target_index(self) -> int:
        return next(i for i, column in enumerate(self.schema) if column.is_target)

    @property
    def target_column(self) -> ColumnSchema:
        return self.schema[self.target_index]

    @property
    def feature_indices(self) -> List[int]:
        return [i for i, column in enumerate(self.schema) if not column.is_target]

    @property
    def feature_columns(self) -> List[ColumnSchema]:
        return [self.schema[i] for i in self.feature_indices]

    @property
    def has_categorical_features(self) -> bool:
        return any(column.kind == ColumnKind.CATEGORICAL for column in self.feature_columns)

    def column_values(self, index: int) -> List[Any]:
        return list(self.cells[:, index])

    def targets(self) -> List[Any]:
        return self.column_values(self.target_index)

    def feature_mask(self) -> np.ndarray:
        """Missing mask restricted to feature columns."""
        return self.missing_mask[:, self.feature_indices]

    def take(self, indices: Sequence[int]) -> "Dataset":
        """Subset of rows, in the given order."""
        rows = np.asarray(indices, dtype=int)
        return Dataset(schema=self.schema, cells=self.cells[rows], task=self.task)

    def equals(self, other: "Dataset") -> bool:
        """Cell-for-cell and mask-for-mask equality."""
        if self.schema != other.schema or self.task != other.task:
            return False
        if self.cells.shape != other.cells.shape:
            return False
        if not np.array_equal(self.missing_mask, other.missing_mask):
            return False
        return all(a == b for a, b in zip(self.cells.ravel(), other.cells.ravel()))


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/test partition request."""
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class DatasetSource:
    """Where a dataset lives, how to read it and how to split it."""
    path: str
    schema: Tuple[ColumnSchema, ...]
    task: TaskKind
    split: SplitSpec = field(default_factory=SplitSpec)
