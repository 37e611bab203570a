"""
Desk-scale synthetic tasks for comparisons and smoke checks.
"""
from typing import List, Tuple

import numpy as np

from pfnlab.core.models.dataset import ColumnKind, ColumnSchema, Dataset, TaskKind
from pfnlab.core.models.scores import BenchDataset
from pfnlab.core.models.training import PriorConfig
from pfnlab.core.services.prior import bin_scores, random_score, sample_mixture_inputs

CATEGORY_LEVELS = tuple("abcdefgh")


def _schema(n_numeric: int, n_categorical: int) -> Tuple[ColumnSchema, ...]:
    numeric = tuple(ColumnSchema(f"x{i}") for i in range(n_numeric))
    categorical = tuple(
        ColumnSchema(f"c{i}", ColumnKind.CATEGORICAL) for i in range(n_categorical)
    )
    return numeric + categorical + (ColumnSchema("target", is_target=True),)


def _assemble(
    numeric: np.ndarray,
    categorical: np.ndarray,
    targets: np.ndarray,
    task: TaskKind,
) -> Dataset:
    n_rows = numeric.shape[0]
    cells = np.empty((n_rows, numeric.shape[1] + categorical.shape[1] + 1), dtype=object)
    cells[:, :numeric.shape[1]] = numeric
    cells[:, numeric.shape[1]:-1] = categorical
    cells[:, -1] = targets.astype(float)
    return Dataset(
        schema=_schema(numeric.shape[1], categorical.shape[1]),
        cells=cells,
        task=task,
    )


def _categorize(rng: np.random.Generator, column: np.ndarray) -> np.ndarray:
    """Bin a numeric column at its quantiles into shuffled category names."""
    n_levels = int(rng.integers(2, len(CATEGORY_LEVELS) + 1))
    edges = np.quantile(column, np.linspace(0, 1, n_levels + 1)[1:-1])
    levels = rng.permutation(np.array(CATEGORY_LEVELS[:n_levels], dtype=object))
    return levels[np.searchsorted(edges, column)]


def make_classification_task(
    rng: np.random.Generator,
    n_rows: int,
    n_features: int,
    n_classes: int,
    n_categorical: int = 0,
    noise_scale: float = 0.1,
) -> Dataset:
    """
    Prior-style task: mixture inputs through a random tanh map, binned into
    classes. The last `n_categorical` inputs are turned into categorical
    columns after labelling.
    """
    defaults = PriorConfig()
    inputs = sample_mixture_inputs(rng, n_rows, n_features, 2, defaults.component_separation)
    score = random_score(rng, inputs, 16, noise_scale)
    labels = bin_scores(rng, score, n_classes)

    n_numeric = n_features - n_categorical
    categorical = np.column_stack(
        [_categorize(rng, inputs[:, n_numeric + j]) for j in range(n_categorical)]
    ) if n_categorical else np.empty((n_rows, 0), dtype=object)
    return _assemble(inputs[:, :n_numeric].astype(object), categorical, labels, TaskKind.CLASSIFICATION)


def make_separable_task(rng: np.random.Generator, n_rows: int = 500, n_features: int = 4) -> Dataset:
    """Binary task labelled by the sign of a random linear projection."""
    inputs = rng.normal(size=(n_rows, n_features))
    direction = rng.normal(size=n_features)
    labels = (inputs @ direction > 0).astype(int)
    return _assemble(inputs.astype(object), np.empty((n_rows, 0), dtype=object), labels, TaskKind.CLASSIFICATION)


def make_linear_regression_task(
    rng: np.random.Generator,
    n_rows: int = 500,
    n_features: int = 4,
    n_categorical: int = 0,
) -> Dataset:
    """Noiseless linear target."""
    inputs = rng.normal(size=(n_rows, n_features))
    targets = inputs @ rng.normal(size=n_features)
    n_numeric = n_features - n_categorical
    categorical = np.column_stack(
        [_categorize(rng, inputs[:, n_numeric + j]) for j in range(n_categorical)]
    ) if n_categorical else np.empty((n_rows, 0), dtype=object)
    return _assemble(inputs[:, :n_numeric].astype(object), categorical, targets, TaskKind.REGRESSION)


def make_synthetic_suite(
    n_classification: int = 10,
    n_regression: int = 0,
    seed: int = 0,
    row_range: Tuple[int, int] = (500, 2000),
    feature_range: Tuple[int, int] = (2, 10),
    class_range: Tuple[int, int] = (2, 4),
    mixed_fraction: float = 0.3,
) -> List[BenchDataset]:
    """
    A seeded suite of classification and regression tasks. A share of the
    tasks carries categorical columns and lands in the 'mixed' category.
    """
    rng = np.random.default_rng(seed)
    suite = []
    for index in range(n_classification):
        n_rows = int(rng.integers(row_range[0], row_range[1] + 1))
        n_features = int(rng.integers(feature_range[0], feature_range[1] + 1))
        n_classes = int(rng.integers(class_range[0], class_range[1] + 1))
        n_categorical = 1 if n_features > 1 and rng.random() < mixed_fraction else 0
        dataset = make_classification_task(rng, n_rows, n_features, n_classes, n_categorical)
        suite.append(BenchDataset(f"synthetic-clf-{index:02d}", dataset))
    for index in range(n_regression):
        n_rows = int(rng.integers(row_range[0], row_range[1] + 1))
        n_features = int(rng.integers(feature_range[0], feature_range[1] + 1))
        n_categorical = 1 if n_features > 1 and rng.random() < mixed_fraction else 0
        dataset = make_linear_regression_task(rng, n_rows, n_features, n_categorical)
        suite.append(BenchDataset(f"synthetic-reg-{index:02d}", dataset))
    return suite
