"""
Prediction paths: the whole training set as support, or an ensemble of
random training subsets.
"""
import logging
from typing import List, Tuple

import numpy as np

from pfnlab.core.models.dataset import Dataset, TaskKind
from pfnlab.core.models.episode import Episode
from pfnlab.core.models.errors import SupportBudgetExceededError, TooManyClassesError
from pfnlab.core.models.inference import InferenceConfig, InferenceMode, Predictions
from pfnlab.core.models.preprocessing import PreparedTable, ProcessedMatrix
from pfnlab.core.models.results import PredictionOutcome
from pfnlab.core.services.preprocessing import (
    apply_preprocess,
    decode_class_indices,
    decode_regression,
    prepare_dataset,
)
from pfnlab.core.services.retrieval_transformer import (
    RetrievalTransformer,
    predict_proba,
    predict_values,
)

logger = logging.getLogger(__name__)


def _support_outputs(
    model: RetrievalTransformer,
    support: PreparedTable,
    x_test: ProcessedMatrix,
    chunk_size: int,
) -> np.ndarray:
    """Outputs for every test row with `support` as context, in query chunks."""
    present = np.unique(support.targets).astype(int) if support.task == TaskKind.CLASSIFICATION else None
    outputs = []
    for start in range(0, x_test.n_rows, chunk_size):
        rows = np.arange(start, min(start + chunk_size, x_test.n_rows))
        episode = Episode(
            x_support=support.features,
            y_support=support.targets,
            x_query=x_test.take(rows),
            task=support.task,
            n_classes=support.n_classes,
        )
        if support.task == TaskKind.CLASSIFICATION:
            outputs.append(predict_proba(model, episode, present_classes=present))
        else:
            outputs.append(predict_values(model, episode))
    return np.concatenate(outputs, axis=0)


def _wrap(task: TaskKind, outputs: np.ndarray) -> Predictions:
    if task == TaskKind.CLASSIFICATION:
        return Predictions(task=task, probabilities=outputs)
    return Predictions(task=task, values=outputs)


def predict_full_context(
    model: RetrievalTransformer,
    train: PreparedTable,
    x_test: ProcessedMatrix,
    config: InferenceConfig,
) -> Predictions:
    """
    One pass with the whole training set as support.

    Raises:
        SupportBudgetExceededError: If the training set exceeds the support budget
    """
    if train.n_rows > config.support_budget:
        raise SupportBudgetExceededError(train.n_rows, config.support_budget)
    return _wrap(train.task, _support_outputs(model, train, x_test, config.query_chunk_size))


def effective_subset_size(n_train: int, config: InferenceConfig) -> int:
    if config.subset_size > n_train:
        logger.warning(
            "Ensemble subset larger than the training set; using every training row",
            extra={"extra_fields": {"subset_size": config.subset_size, "n_train": n_train}},
        )
        return n_train
    return config.subset_size


def subset_indices(n_train: int, config: InferenceConfig) -> List[np.ndarray]:
    """Sorted support indices of every ensemble member, drawn without replacement."""
    rng = np.random.default_rng(config.seed)
    size = effective_subset_size(n_train, config)
    return [np.sort(rng.choice(n_train, size=size, replace=False)) for _ in range(config.n_ensembles)]


def average_members(member_outputs: List[np.ndarray], task: TaskKind) -> np.ndarray:
    """Mean over members in member order; probabilities renormalized per row."""
    total = np.zeros_like(member_outputs[0])
    for outputs in member_outputs:
        total = total + outputs
    mean = total / len(member_outputs)
    if task == TaskKind.CLASSIFICATION:
        mean = mean / mean.sum(axis=1, keepdims=True)
    return mean


def predict_ensembled(
    model: RetrievalTransformer,
    train: PreparedTable,
    x_test: ProcessedMatrix,
    config: InferenceConfig,
) -> Predictions:
    """
    Average of `n_ensembles` predictions, each using a random training subset
    as support. A class missing from a member's subset gets probability 0 in
    that member.

    By default each member's subset is shared by all test rows; with
    `resample_per_observation` every test row draws its own subsets.
    """
    if config.resample_per_observation:
        return _predict_resampled_per_observation(model, train, x_test, config)

    members = [
        _support_outputs(model, train.take(indices), x_test, config.query_chunk_size)
        for indices in subset_indices(train.n_rows, config)
    ]
    return _wrap(train.task, average_members(members, train.task))


def _predict_resampled_per_observation(
    model: RetrievalTransformer,
    train: PreparedTable,
    x_test: ProcessedMatrix,
    config: InferenceConfig,
) -> Predictions:
    rng = np.random.default_rng(config.seed)
    size = effective_subset_size(train.n_rows, config)
    rows = []
    for row in range(x_test.n_rows):
        query = x_test.take([row])
        members = []
        for _ in range(config.n_ensembles):
            indices = np.sort(rng.choice(train.n_rows, size=size, replace=False))
            members.append(_support_outputs(model, train.take(indices), query, 1))
        rows.append(average_members(members, train.task))
    return _wrap(train.task, np.concatenate(rows, axis=0))


def predict(
    model: RetrievalTransformer,
    train: PreparedTable,
    x_test: ProcessedMatrix,
    config: InferenceConfig,
) -> Predictions:
    """Dispatch on the configured inference mode."""
    model.eval()
    if config.mode == InferenceMode.ENSEMBLE:
        return predict_ensembled(model, train, x_test, config)
    return predict_full_context(model, train, x_test, config)


def predict_split(
    model: RetrievalTransformer,
    train_split: Dataset,
    test_split: Dataset,
    config: InferenceConfig,
) -> Tuple[PredictionOutcome, PreparedTable]:
    """
    Fit preprocessing on the training split, predict the test split with the
    training rows as support and decode predictions to the original labels
    or target scale.

    Returns:
        (prediction outcome, preprocessed test split)

    Raises:
        TooManyClassesError: If the training split has more classes than the model head
    """
    train = prepare_dataset(train_split, model.config.max_features, output_kind=model.config.quantile_output)
    if train.task == TaskKind.CLASSIFICATION and train.n_classes > model.config.max_classes:
        raise TooManyClassesError(train.n_classes, model.config.max_classes)
    test = apply_preprocess(train.state, test_split)

    predictions = predict(model, train, test.features, config)
    if predictions.task == TaskKind.CLASSIFICATION:
        decoded = decode_class_indices(train.state, predictions.class_indices)
    else:
        decoded = decode_regression(train.state, predictions.values).tolist()
    return PredictionOutcome(predictions=predictions, decoded=decoded, n_support=train.n_rows), test
