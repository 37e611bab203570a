"""
Prior dump use case.
"""
import os
from typing import List

import numpy as np

from pfnlab.core.models.errors import ConfigurationError
from pfnlab.core.models.training import PriorConfig
from pfnlab.core.ports.dataset_repository import DatasetRepositoryPort
from pfnlab.core.services.prior import sample_prior_dataset
from pfnlab.infrastructure.logging import log_operation


class DumpPriorUseCase:
    """Writes sampled prior datasets as CSV files, `prior-000.csv` onwards."""

    def __init__(self, dataset_repository: DatasetRepositoryPort):
        self.dataset_repository = dataset_repository

    @log_operation("dump_prior")
    def execute(self, prior_config: PriorConfig, count: int, out_dir: str) -> List[str]:
        """
        Args:
            prior_config: Prior to sample; its seed fixes the sequence
            count: Number of datasets
            out_dir: Target directory, created when missing

        Returns:
            Written file paths, in sampling order
        """
        if count < 0:
            raise ConfigurationError(f"--n must be non-negative, got {count}")
        os.makedirs(out_dir, exist_ok=True)
        rng = np.random.default_rng(prior_config.seed)
        paths = []
        for index in range(count):
            dataset = sample_prior_dataset(prior_config, rng)
            path = os.path.join(out_dir, f"prior-{index:03d}.csv")
            self.dataset_repository.save(dataset, path)
            paths.append(path)
        return paths
