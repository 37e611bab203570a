#!/usr/bin/env python3
"""
Metric tests: accuracy, R^2 and their degenerate inputs.
"""
import numpy as np
import pytest

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.errors import LengthMismatchError
from pfnlab.core.models.inference import Predictions
from pfnlab.core.models.preprocessing import LabelEncoding, PreparedTable, PreprocessState, ProcessedMatrix
from pfnlab.core.models.results import PredictionOutcome
from pfnlab.core.services.metrics import accuracy, r2_score, score_predictions


@pytest.mark.unit
def test_accuracy_counts_exact_matches():
    metrics = accuracy([0, 1, 1, 0], [0, 1, 0, 0])
    assert metrics.accuracy == 0.75
    assert metrics.n_test == 4
    assert metrics.value == 0.75
    assert metrics.r2 is None


@pytest.mark.unit
def test_r2_of_a_near_fit():
    assert r2_score([1.0, 2.0, 4.0], [1.0, 2.0, 3.0]).r2 == pytest.approx(0.5)


@pytest.mark.unit
def test_r2_of_a_perfect_fit_is_one():
    assert r2_score([3.0, -1.0, 2.0], [3.0, -1.0, 2.0]).r2 == 1.0


@pytest.mark.unit
def test_r2_against_a_constant_truth():
    assert r2_score([2.0, 2.0], [2.0, 2.0]).r2 == 1.0
    assert r2_score([2.0, 2.5], [2.0, 2.0]).r2 == 0.0


@pytest.mark.unit
def test_r2_can_be_negative():
    assert r2_score([3.0, 2.0, 1.0], [1.0, 2.0, 3.0]).r2 == pytest.approx(-3.0)


@pytest.mark.unit
def test_length_mismatch_is_rejected():
    with pytest.raises(LengthMismatchError):
        accuracy([0, 1], [0, 1, 1])
    with pytest.raises(LengthMismatchError):
        r2_score([0.0, 1.0], [0.0])


@pytest.mark.unit
def test_r2_needs_two_rows():
    with pytest.raises(ValueError):
        r2_score([1.0], [1.0])


@pytest.mark.unit
def test_unseen_test_labels_never_count_as_correct():
    state = PreprocessState(
        feature_columns=(),
        feature_maps=(),
        category_encodings={},
        task=TaskKind.CLASSIFICATION,
        max_features=2,
        label_encoding=LabelEncoding(("a", "b")),
    )
    test = PreparedTable(
        features=ProcessedMatrix(np.zeros((3, 2)), np.ones(3, dtype=int)),
        targets=np.array([0.0, 1.0, -1.0]),
        state=state,
    )
    predictions = Predictions(
        task=TaskKind.CLASSIFICATION,
        probabilities=np.array([[0.9, 0.1], [0.2, 0.8], [0.5, 0.5]]),
    )
    outcome = PredictionOutcome(predictions=predictions, decoded=["a", "b", "a"], n_support=10)
    assert score_predictions(outcome, test).accuracy == pytest.approx(2 / 3)
