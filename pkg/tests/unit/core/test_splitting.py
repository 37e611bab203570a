#!/usr/bin/env python3
"""
Split tests: deterministic train/test partitions and fine-tuning resplits.
"""
import numpy as np
import pytest

from pfnlab.core.models.dataset import SplitSpec
from pfnlab.core.models.errors import DegenerateSplitError, IrreducibleDegeneracyError
from pfnlab.core.services.preprocessing import prepare_dataset
from pfnlab.core.services.splitting import (
    carve_validation,
    make_finetune_episode,
    round_half_up,
    split_indices,
    support_size,
    train_test_split,
)
from tests.utils.tabular_helpers import TabularTestHelpers


@pytest.mark.unit
def test_ten_rows_split_eight_two():
    train_idx, test_idx = split_indices(10, SplitSpec(train_fraction=0.8, seed=0))
    assert len(train_idx) == 8 and len(test_idx) == 2
    assert sorted(np.concatenate([train_idx, test_idx]).tolist()) == list(range(10))
    assert not set(train_idx.tolist()) & set(test_idx.tolist())


@pytest.mark.unit
def test_split_is_deterministic_per_seed():
    first = split_indices(50, SplitSpec(0.8, seed=11))
    second = split_indices(50, SplitSpec(0.8, seed=11))
    other = split_indices(50, SplitSpec(0.8, seed=12))
    np.testing.assert_array_equal(first[0], second[0])
    np.testing.assert_array_equal(first[1], second[1])
    assert first[1].tolist() != other[1].tolist()


@pytest.mark.unit
def test_sizes_round_half_up():
    assert round_half_up(2.5) == 3
    assert round_half_up(2.4999) == 2
    train_idx, _ = split_indices(5, SplitSpec(0.5, seed=0))
    assert len(train_idx) == 3


@pytest.mark.unit
@pytest.mark.parametrize("n_rows, fraction", [(1, 0.5), (10, 0.99), (10, 0.01)])
def test_split_leaving_an_empty_side_raises(n_rows, fraction):
    with pytest.raises(DegenerateSplitError):
        split_indices(n_rows, SplitSpec(fraction, seed=0))


@pytest.mark.unit
def test_dataset_split_keeps_rows_intact(blob_dataset):
    train, test = train_test_split(blob_dataset, SplitSpec(0.8, seed=3))
    assert train.n_rows == 48 and test.n_rows == 12
    train_idx, test_idx = split_indices(blob_dataset.n_rows, SplitSpec(0.8, seed=3))
    assert train.equals(blob_dataset.take(train_idx))
    assert test.equals(blob_dataset.take(test_idx))


@pytest.mark.unit
def test_validation_carve_out_is_ten_percent(blob_dataset):
    fit, validation = carve_validation(blob_dataset, 0.1, seed=0)
    assert (fit.n_rows, validation.n_rows) == (54, 6)


@pytest.mark.unit
def test_support_size_stays_inside_the_table():
    assert support_size(10, 0.8) == 8
    assert support_size(2, 0.99) == 1
    assert support_size(2, 0.01) == 1


@pytest.mark.unit
def test_resplits_differ_between_steps_and_repeat_per_seed(blob_dataset):
    table = prepare_dataset(blob_dataset, max_features=4)

    def draws(seed):
        rng = np.random.default_rng(seed)
        return [make_finetune_episode(table, 0.8, rng).x_query.values.tolist() for _ in range(3)]

    first = draws(5)
    assert first == draws(5)
    assert first[0] != first[1]


@pytest.mark.unit
def test_hundred_resplits_are_practically_all_distinct(blob_dataset):
    table = prepare_dataset(blob_dataset, max_features=4)
    rng = np.random.default_rng(13)
    partitions = {make_finetune_episode(table, 0.8, rng).x_query.values.tobytes() for _ in range(100)}
    assert len(partitions) >= 99


@pytest.mark.unit
def test_episode_sizes_follow_the_support_fraction(blob_dataset):
    table = prepare_dataset(blob_dataset, max_features=4)
    episode = make_finetune_episode(table, 0.8, np.random.default_rng(0))
    assert episode.n_support == 48 and episode.n_query == 12
    assert episode.n_classes == 2
    assert set(episode.y_support.tolist()) == {0.0, 1.0}


@pytest.mark.unit
def test_singleton_class_is_pinned_to_support():
    rows = [[float(i), "a"] for i in range(5)] + [[float(i), "b"] for i in range(5, 10)] + [[99.0, "c"]]
    table = prepare_dataset(TabularTestHelpers.dataset_from_rows(rows), max_features=2)
    rng = np.random.default_rng(0)
    for _ in range(20):
        episode = make_finetune_episode(table, 0.5, rng)
        assert 2.0 in episode.y_support.tolist()
        assert 2.0 not in episode.y_query.tolist()


@pytest.mark.unit
def test_all_singleton_classes_cannot_be_resplit():
    rows = [[1.0, "a"], [2.0, "b"], [3.0, "c"]]
    table = prepare_dataset(TabularTestHelpers.dataset_from_rows(rows), max_features=2)
    with pytest.raises(IrreducibleDegeneracyError):
        make_finetune_episode(table, 0.5, np.random.default_rng(0))


@pytest.mark.unit
def test_single_row_table_cannot_be_resplit():
    table = prepare_dataset(TabularTestHelpers.dataset_from_rows([[1.0, "a"]]), max_features=2)
    with pytest.raises(DegenerateSplitError):
        make_finetune_episode(table, 0.5, np.random.default_rng(0))
