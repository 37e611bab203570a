"""
Test metrics.
"""
from typing import Sequence

import numpy as np

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.errors import LengthMismatchError
from pfnlab.core.models.preprocessing import PreparedTable
from pfnlab.core.models.results import PredictionOutcome
from pfnlab.core.models.scores import Metrics


def _paired(preds: Sequence, truth: Sequence, minimum: int):
    preds = np.asarray(preds)
    truth = np.asarray(truth)
    if preds.shape[0] != truth.shape[0]:
        raise LengthMismatchError(preds.shape[0], truth.shape[0])
    if truth.shape[0] < minimum:
        raise ValueError(f"Need at least {minimum} test rows, got {truth.shape[0]}")
    return preds, truth


def accuracy(preds: Sequence[int], truth: Sequence[int]) -> Metrics:
    """Fraction of exact matches."""
    preds, truth = _paired(preds, truth, 1)
    correct = int(np.sum(preds == truth))
    return Metrics(n_test=int(truth.shape[0]), accuracy=correct / truth.shape[0])


def r2_score(preds: Sequence[float], truth: Sequence[float]) -> Metrics:
    """
    Coefficient of determination 1 - SS_res / SS_tot.
    A constant truth gives 1 for an exact prediction and 0 otherwise.
    """
    preds, truth = _paired(np.asarray(preds, dtype=float), np.asarray(truth, dtype=float), 2)
    ss_res = float(np.sum((truth - preds) ** 2))
    ss_tot = float(np.sum((truth - truth.mean()) ** 2))
    if ss_tot == 0.0:
        value = 1.0 if ss_res == 0.0 else 0.0
    else:
        value = 1.0 - ss_res / ss_tot
    return Metrics(n_test=int(truth.shape[0]), r2=value)


def score_predictions(outcome: PredictionOutcome, test: PreparedTable) -> Metrics:
    """
    Accuracy against the encoded test labels (labels unseen in training never
    match), or R^2 on the original target scale.
    """
    if outcome.predictions.task == TaskKind.CLASSIFICATION:
        return accuracy(outcome.predictions.class_indices, test.targets.astype(int))
    return r2_score(outcome.decoded, np.asarray(test.raw_targets, dtype=float))
