"""
Feature and target preprocessing.

Fit once on training rows, then apply to any split:
categorical codes -> per-column quantile map -> missing to zero ->
scale by d_f / d_f^i -> zero-pad to max_features.
"""
import logging
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from pfnlab.core.models.dataset import ColumnKind, Dataset, TaskKind
from pfnlab.core.models.errors import (
    AllFeaturesMissingError,
    DimensionMismatchError,
    TooManyFeaturesError,
    UnseenLabelError,
)
from pfnlab.core.models.preprocessing import (
    CategoryEncoding,
    LabelEncoding,
    PreparedTable,
    PreprocessState,
    ProcessedMatrix,
    QuantileOutput,
)
from pfnlab.core.services.quantile_transform import (
    apply_quantile_map,
    fit_quantile_map,
    invert_quantile_map,
)
from pfnlab.core.services.tabular_constraints import TabularConstraints

logger = logging.getLogger(__name__)

UNSEEN_LABEL = -1


def fit_label_encoding(raw_targets: Sequence[Any]) -> LabelEncoding:
    """Dense class indices in first-appearance order."""
    return LabelEncoding(classes=tuple(dict.fromkeys(raw_targets)))


def encode_labels(
    raw_targets: Sequence[Any],
    encoding: Optional[LabelEncoding] = None,
    strict: bool = True,
) -> Tuple[np.ndarray, LabelEncoding]:
    """
    Encode classification targets.

    Args:
        raw_targets: Raw label values
        encoding: A fitted mapping to apply; fitted on `raw_targets` when None
        strict: Raise on labels outside the mapping instead of encoding -1

    Returns:
        (float array of class indices, the mapping used)

    Raises:
        UnseenLabelError: In strict mode, for a label absent from the mapping
    """
    if encoding is None:
        encoding = fit_label_encoding(raw_targets)
    index = encoding.index
    encoded = np.empty(len(raw_targets), dtype=float)
    for i, label in enumerate(raw_targets):
        if label in index:
            encoded[i] = index[label]
        elif strict:
            raise UnseenLabelError(label)
        else:
            encoded[i] = UNSEEN_LABEL
    return encoded, encoding


def encode_categoricals(
    values: Sequence[Any],
    encoding: Optional[CategoryEncoding] = None,
) -> Tuple[np.ndarray, CategoryEncoding]:
    """
    Ordinal codes in first-appearance order.

    Missing cells (None) and categories unseen by `encoding` become NaN, so
    they are treated as missing downstream.
    """
    if encoding is None:
        encoding = CategoryEncoding(
            categories=tuple(dict.fromkeys(value for value in values if value is not None))
        )
    index = encoding.index
    codes = np.array(
        [index.get(value, np.nan) if value is not None else np.nan for value in values],
        dtype=float,
    )
    return codes, encoding


def scale_and_pad(
    row: Sequence[float],
    missing: Sequence[bool],
    max_features: int,
    row_index: Optional[int] = None,
) -> Tuple[np.ndarray, int]:
    """
    Zero missing entries, rescale by d_f / d_f^i and pad to max_features.

    Args:
        row: Transformed features of one observation (length d_f)
        missing: Per-feature missing flags
        max_features: Model input width

    Returns:
        (padded row of length max_features, effective feature count d_f^i)

    Raises:
        AllFeaturesMissingError: If no feature is observed
        DimensionMismatchError: If the row is wider than max_features
    """
    values = np.asarray(row, dtype=float)
    flags = np.asarray(missing, dtype=bool)
    n_features = values.shape[0]
    if n_features > max_features:
        raise DimensionMismatchError(
            f"Row has {n_features} features, model accepts {max_features}"
        )
    effective = int(n_features - flags.sum())
    if effective == 0:
        raise AllFeaturesMissingError(row_index)

    padded = np.zeros(max_features, dtype=float)
    padded[:n_features] = np.where(flags, 0.0, values) * (n_features / effective)
    return padded, effective


def scale_and_pad_matrix(
    transformed: np.ndarray,
    missing: np.ndarray,
    max_features: int,
) -> ProcessedMatrix:
    """Row-wise `scale_and_pad` over a whole matrix."""
    n_rows, n_features = transformed.shape
    if n_features > max_features:
        raise DimensionMismatchError(
            f"Matrix has {n_features} features, model accepts {max_features}"
        )
    effective = n_features - missing.sum(axis=1)
    empty_rows = np.flatnonzero(effective == 0)
    if empty_rows.size:
        raise AllFeaturesMissingError(int(empty_rows[0]))

    values = np.zeros((n_rows, max_features), dtype=float)
    scale = (n_features / effective)[:, None]
    values[:, :n_features] = np.where(missing, 0.0, transformed) * scale
    return ProcessedMatrix(values=values, effective_counts=effective.astype(int))


def _raw_feature_column(
    dataset: Dataset,
    column_index: int,
    encoding: Optional[CategoryEncoding],
) -> Tuple[np.ndarray, Optional[CategoryEncoding]]:
    column = dataset.schema[column_index]
    values = dataset.column_values(column_index)
    if column.kind == ColumnKind.CATEGORICAL:
        return encode_categoricals(values, encoding)
    numeric = np.array([np.nan if value is None else value for value in values], dtype=float)
    return numeric, None


def fit_preprocess(
    dataset: Dataset,
    max_features: int = TabularConstraints.MAX_FEATURES,
    n_quantiles: Optional[int] = None,
    output_kind: QuantileOutput = QuantileOutput.UNIFORM,
) -> PreprocessState:
    """
    Fit quantile maps, category codes and the target mapping on training rows.

    Raises:
        TooManyFeaturesError: If the dataset is wider than max_features
        EmptyColumnError: If a feature column has no observed value
    """
    if dataset.n_features > max_features:
        raise TooManyFeaturesError(dataset.n_features, max_features)

    feature_maps = []
    category_encodings = {}
    for position, column_index in enumerate(dataset.feature_indices):
        raw, encoding = _raw_feature_column(dataset, column_index, None)
        if encoding is not None:
            category_encodings[position] = encoding
        feature_maps.append(
            fit_quantile_map(raw, n_quantiles, output_kind, column=dataset.schema[column_index].name)
        )

    label_encoding = None
    target_map = None
    if dataset.task == TaskKind.CLASSIFICATION:
        label_encoding = fit_label_encoding(dataset.targets())
    else:
        target_map = fit_quantile_map(
            np.asarray(dataset.targets(), dtype=float),
            n_quantiles,
            QuantileOutput.UNIFORM,
            column=dataset.target_column.name,
        )

    return PreprocessState(
        feature_columns=tuple(dataset.feature_columns),
        feature_maps=tuple(feature_maps),
        category_encodings=category_encodings,
        task=dataset.task,
        max_features=max_features,
        label_encoding=label_encoding,
        target_map=target_map,
    )


def transform_features(state: PreprocessState, dataset: Dataset) -> ProcessedMatrix:
    """Apply fitted feature preprocessing to any rows with the same schema."""
    if tuple(dataset.feature_columns) != state.feature_columns:
        raise DimensionMismatchError("Dataset feature columns differ from the fitted preprocessing state")

    transformed = np.zeros((dataset.n_rows, state.n_features), dtype=float)
    missing = np.zeros((dataset.n_rows, state.n_features), dtype=bool)
    for position, column_index in enumerate(dataset.feature_indices):
        raw, _ = _raw_feature_column(dataset, column_index, state.category_encodings.get(position))
        missing[:, position] = np.isnan(raw)
        transformed[:, position] = np.nan_to_num(apply_quantile_map(state.feature_maps[position], raw))

    return scale_and_pad_matrix(transformed, missing, state.max_features)


def encode_targets(state: PreprocessState, raw_targets: Sequence[Any], strict: bool = False) -> np.ndarray:
    """Targets in model space: class indices or uniform quantile ranks."""
    if state.task == TaskKind.CLASSIFICATION:
        encoded, _ = encode_labels(raw_targets, state.label_encoding, strict=strict)
        return encoded
    return apply_quantile_map(state.target_map, np.asarray(raw_targets, dtype=float))


def apply_preprocess(state: PreprocessState, dataset: Dataset, strict_labels: bool = False) -> PreparedTable:
    """
    Features and targets of `dataset` under a fitted state. The state is
    never modified.
    """
    raw_targets = dataset.targets()
    return PreparedTable(
        features=transform_features(state, dataset),
        targets=encode_targets(state, raw_targets, strict=strict_labels),
        state=state,
        raw_targets=tuple(raw_targets),
    )


def prepare_dataset(
    dataset: Dataset,
    max_features: int = TabularConstraints.MAX_FEATURES,
    n_quantiles: Optional[int] = None,
    output_kind: QuantileOutput = QuantileOutput.UNIFORM,
) -> PreparedTable:
    """Fit on `dataset` and apply to it."""
    state = fit_preprocess(dataset, max_features, n_quantiles, output_kind)
    logger.debug(
        "Fitted preprocessing",
        extra={"extra_fields": {"rows": dataset.n_rows, "features": dataset.n_features}},
    )
    return apply_preprocess(state, dataset, strict_labels=True)


def decode_class_indices(state: PreprocessState, indices: Sequence[int]) -> List[Any]:
    classes = state.label_encoding.classes
    return [classes[int(i)] for i in indices]


def decode_regression(state: PreprocessState, values: Sequence[float]) -> np.ndarray:
    """Model outputs (quantile ranks) back on the original target scale."""
    return invert_quantile_map(state.target_map, values)
