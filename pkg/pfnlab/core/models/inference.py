"""
Inference domain models.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.services.tabular_constraints import TabularConstraints


class InferenceMode(str, Enum):
    FULL_CONTEXT = "full_context"
    ENSEMBLE = "ensemble"


@dataclass(frozen=True)
class InferenceConfig:
    """How the training set is used as support at prediction time."""
    mode: InferenceMode = InferenceMode.FULL_CONTEXT
    support_budget: int = TabularConstraints.SUPPORT_BUDGET
    subset_size: int = TabularConstraints.ENSEMBLE_SUBSET_SIZE
    n_ensembles: int = TabularConstraints.ENSEMBLE_MEMBERS
    seed: int = 0
    query_chunk_size: int = 1024
    resample_per_observation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", InferenceMode(self.mode))
        if self.support_budget < 1 or self.subset_size < 1 or self.query_chunk_size < 1:
            raise ValueError("support_budget, subset_size and query_chunk_size must be positive")
        if self.n_ensembles < 1:
            raise ValueError("n_ensembles must be at least 1")

    @property
    def retrieval_size(self) -> int:
        """Number of support rows one forward pass sees."""
        return self.subset_size if self.mode == InferenceMode.ENSEMBLE else self.support_budget


@dataclass(frozen=True, eq=False)
class Predictions:
    """
    Model predictions in encoded space.

    Classification: `probabilities` (n x K, rows sum to 1).
    Regression: `values` in quantile-rank space.
    """
    task: TaskKind
    probabilities: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @property
    def n_rows(self) -> int:
        array = self.probabilities if self.task == TaskKind.CLASSIFICATION else self.values
        return int(array.shape[0])

    @property
    def class_indices(self) -> np.ndarray:
        return np.argmax(self.probabilities, axis=1)
