"""
Dataset repository port.
Defines the interface for reading and writing tabular datasets.
"""
from abc import ABC, abstractmethod
from typing import Sequence

from pfnlab.core.models.dataset import ColumnSchema, Dataset, TaskKind


class DatasetRepositoryPort(ABC):
    @abstractmethod
    def load(self, path: str, schema: Sequence[ColumnSchema], task: TaskKind) -> Dataset:
        """Load and validate a dataset against its schema."""
        pass

    @abstractmethod
    def save(self, dataset: Dataset, path: str) -> None:
        """Write a dataset so that `load` reproduces it exactly."""
        pass
