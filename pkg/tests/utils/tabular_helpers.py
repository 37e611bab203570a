#!/usr/bin/env python3
"""
Factories for datasets, episodes, CSV files and experiment configs used
across the test suite.
"""
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from pfnlab.core.models.dataset import ColumnKind, ColumnSchema, Dataset, TaskKind
from pfnlab.core.models.episode import Episode
from pfnlab.core.models.preprocessing import ProcessedMatrix
from pfnlab.core.models.transformer import ModelConfig

SMALL_MODEL = {
    "hidden_dim": 16,
    "n_layers": 1,
    "n_heads": 2,
    "feedforward_dim": 32,
    "max_features": 8,
    "max_classes": 10,
}

SMALL_PRIOR = {
    "min_rows": 20,
    "max_rows": 60,
    "feature_count_range": [2, 4],
    "class_count_range": [2, 3],
    "latent_width_range": [4, 8],
    "mixture_components_range": [1, 2],
}


class TabularTestHelpers:
    """Builders for small, deterministic test inputs."""

    @staticmethod
    def small_model_config(**overrides: Any) -> ModelConfig:
        values = dict(SMALL_MODEL)
        values.update(overrides)
        return ModelConfig(**values)

    @staticmethod
    def numeric_schema(n_features: int, target: str = "target") -> tuple:
        features = tuple(ColumnSchema(f"x{i}") for i in range(n_features))
        return features + (ColumnSchema(target, ColumnKind.NUMERIC, is_target=True),)

    @classmethod
    def dataset_from_rows(
        cls,
        rows: Sequence[Sequence[Any]],
        task: TaskKind = TaskKind.CLASSIFICATION,
        schema: Optional[tuple] = None,
    ) -> Dataset:
        """Rows hold the features followed by the target; None marks a missing cell."""
        cells = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                cells[i, j] = value
        return Dataset(
            schema=schema or cls.numeric_schema(len(rows[0]) - 1),
            cells=cells,
            task=task,
        )

    @classmethod
    def blob_dataset(
        cls,
        n_rows: int = 60,
        n_features: int = 3,
        n_classes: int = 2,
        seed: int = 0,
    ) -> Dataset:
        """Gaussian blobs, one per class, with balanced labels."""
        rng = np.random.default_rng(seed)
        labels = np.arange(n_rows) % n_classes
        centers = rng.normal(scale=3.0, size=(n_classes, n_features))
        inputs = centers[labels] + rng.normal(size=(n_rows, n_features))
        rows = [list(inputs[i]) + [float(labels[i])] for i in range(n_rows)]
        return cls.dataset_from_rows(rows)

    @classmethod
    def regression_dataset(cls, n_rows: int = 40, n_features: int = 2, seed: int = 0) -> Dataset:
        rng = np.random.default_rng(seed)
        inputs = rng.normal(size=(n_rows, n_features))
        targets = inputs @ rng.normal(size=n_features)
        rows = [list(inputs[i]) + [float(targets[i])] for i in range(n_rows)]
        return cls.dataset_from_rows(rows, task=TaskKind.REGRESSION)

    @staticmethod
    def episode(
        n_support: int = 6,
        n_query: int = 3,
        width: int = 8,
        n_classes: int = 3,
        task: TaskKind = TaskKind.CLASSIFICATION,
        seed: int = 0,
    ) -> Episode:
        """Random features; every class occurs in the support labels."""
        rng = np.random.default_rng(seed)
        x_support = rng.uniform(size=(n_support, width))
        x_query = rng.uniform(size=(n_query, width))
        if task == TaskKind.CLASSIFICATION:
            y_support = (np.arange(n_support) % n_classes).astype(float)
            y_query = rng.integers(0, n_classes, size=n_query).astype(float)
        else:
            y_support = rng.uniform(size=n_support)
            y_query = rng.uniform(size=n_query)
            n_classes = None
        return Episode(
            x_support=ProcessedMatrix(x_support, np.full(n_support, width)),
            y_support=y_support,
            x_query=ProcessedMatrix(x_query, np.full(n_query, width)),
            y_query=y_query,
            task=task,
            n_classes=n_classes,
        )

    @staticmethod
    def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        lines = [",".join(header)] + [",".join(str(value) for value in row) for row in rows]
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
        return path

    @classmethod
    def write_dataset_csv(cls, path: str, dataset: Dataset) -> str:
        header = [column.name for column in dataset.schema]
        rows = [
            ["NA" if value is None else repr(value.item() if isinstance(value, np.generic) else value) for value in row]
            for row in dataset.cells
        ]
        return cls.write_csv(path, header, rows)

    @staticmethod
    def dataset_section(path: str, n_features: int, task: str = "classification") -> Dict[str, Any]:
        columns: List[Dict[str, Any]] = [{"name": f"x{i}"} for i in range(n_features)]
        columns.append({"name": "target", "target": True})
        return {"path": path, "task": task, "columns": columns}

    @staticmethod
    def experiment_config(**sections: Any) -> Dict[str, Any]:
        """A desk-sized experiment config; keyword sections replace the defaults."""
        config: Dict[str, Any] = {
            "seed": 0,
            "model": dict(SMALL_MODEL),
            "prior": dict(SMALL_PRIOR),
            "train": {"max_steps": 10, "eval_episodes": 2},
        }
        config.update(sections)
        return config

    @staticmethod
    def write_config(path: str, config: Dict[str, Any]) -> str:
        with open(path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(config, handle, sort_keys=False)
        return path
