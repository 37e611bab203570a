"""
Deterministic dataset splits and per-step support/query resplits.
"""
import logging
from typing import Tuple

import numpy as np

from pfnlab.core.models.dataset import Dataset, SplitSpec, TaskKind
from pfnlab.core.models.episode import Episode
from pfnlab.core.models.errors import DegenerateSplitError, IrreducibleDegeneracyError
from pfnlab.core.models.preprocessing import PreparedTable

logger = logging.getLogger(__name__)


def round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


def split_indices(n_rows: int, spec: SplitSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row indices of the train and test parts.

    Raises:
        DegenerateSplitError: If either part would be empty
    """
    n_train = round_half_up(spec.train_fraction * n_rows)
    if n_train < 1 or n_train > n_rows - 1:
        raise DegenerateSplitError(
            f"Splitting {n_rows} rows at fraction {spec.train_fraction} leaves an empty side",
            n_rows=n_rows,
            train_fraction=spec.train_fraction,
        )
    order = np.random.default_rng(spec.seed).permutation(n_rows)
    return np.sort(order[:n_train]), np.sort(order[n_train:])


def train_test_split(dataset: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Disjoint, exhaustive and deterministic partition of `dataset`."""
    train_idx, test_idx = split_indices(dataset.n_rows, spec)
    return dataset.take(train_idx), dataset.take(test_idx)


def carve_validation(dataset: Dataset, fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """
    Hold out a fixed validation part of a training split for early stopping.

    Returns:
        (fitting part, validation part)
    """
    fit, validation = train_test_split(dataset, SplitSpec(train_fraction=1.0 - fraction, seed=seed))
    return fit, validation


def support_size(n_rows: int, fraction: float) -> int:
    return int(np.clip(round_half_up(fraction * n_rows), 1, n_rows - 1))


def make_finetune_episode(
    table: PreparedTable,
    fraction: float,
    rng: np.random.Generator,
    max_attempts: int = 32,
) -> Episode:
    """
    A fresh random support/query partition of a preprocessed training set.

    Classes with a single instance are pinned to support and never queried.
    Partitions that leave a class out of support are redrawn.

    Args:
        table: Preprocessed training rows
        fraction: Support fraction
        rng: Random stream, advanced by each call
        max_attempts: Redraw budget

    Raises:
        DegenerateSplitError: If the table has fewer than 2 rows
        IrreducibleDegeneracyError: If the redraw budget runs out
    """
    n_rows = table.n_rows
    if n_rows < 2:
        raise DegenerateSplitError("Fine-tuning needs at least 2 training rows", n_rows=n_rows)

    n_support = support_size(n_rows, fraction)
    classification = table.task == TaskKind.CLASSIFICATION
    pinned = np.zeros(n_rows, dtype=bool)
    if classification:
        labels, counts = np.unique(table.targets, return_counts=True)
        singletons = labels[counts == 1]
        pinned = np.isin(table.targets, singletons)
        if pinned.all():
            raise IrreducibleDegeneracyError(
                "Every class has a single instance; no query rows remain",
                n_rows=n_rows,
            )
        n_support = int(np.clip(max(n_support, pinned.sum()), 1, n_rows - 1))
        required = set(labels.tolist())

    free = np.flatnonzero(~pinned)
    fixed = np.flatnonzero(pinned)
    n_free_support = n_support - fixed.size

    for attempt in range(max_attempts):
        order = rng.permutation(free)
        support_idx = np.sort(np.concatenate([fixed, order[:n_free_support]]))
        query_idx = np.sort(order[n_free_support:])
        if not classification or set(table.targets[support_idx].tolist()) == required:
            return _episode_from(table, support_idx, query_idx)
        logger.debug(
            "Resplitting fine-tune episode: class missing from support",
            extra={"extra_fields": {"attempt": attempt + 1}},
        )

    raise IrreducibleDegeneracyError(
        f"No support/query split covering every class after {max_attempts} attempts",
        attempts=max_attempts,
    )


def _episode_from(table: PreparedTable, support_idx: np.ndarray, query_idx: np.ndarray) -> Episode:
    return Episode(
        x_support=table.features.take(support_idx),
        y_support=table.targets[support_idx],
        x_query=table.features.take(query_idx),
        y_query=table.targets[query_idx],
        task=table.task,
        n_classes=table.n_classes,
    )
