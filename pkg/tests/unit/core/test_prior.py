#!/usr/bin/env python3
"""
Synthetic prior tests: determinism, configured ranges, missing cells and
episode validity.
"""
import dataclasses

import numpy as np
import pytest

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.training import PriorConfig
from pfnlab.core.services.prior import (
    PriorSampler,
    bin_scores,
    sample_prior_dataset,
    split_support_query,
    support_covers_classes,
    validation_episodes,
)
from pfnlab.core.services.splitting import support_size


@pytest.mark.unit
def test_same_seed_gives_the_same_dataset(small_prior_config):
    first = sample_prior_dataset(small_prior_config, np.random.default_rng(7))
    second = sample_prior_dataset(small_prior_config, np.random.default_rng(7))
    assert first.equals(second)


@pytest.mark.unit
def test_datasets_respect_the_configured_ranges(small_prior_config):
    rng = np.random.default_rng(0)
    for _ in range(20):
        dataset = sample_prior_dataset(small_prior_config, rng)
        assert dataset.task == TaskKind.CLASSIFICATION
        assert 20 <= dataset.n_rows <= 60
        assert 2 <= dataset.n_features <= 4
        assert len(set(dataset.targets())) <= 3


@pytest.mark.unit
def test_binary_class_range_gives_two_classes(small_prior_config):
    config = dataclasses.replace(small_prior_config, class_count_range=(2, 2))
    rng = np.random.default_rng(1)
    for _ in range(10):
        labels = set(sample_prior_dataset(config, rng).targets())
        assert labels == {0.0, 1.0}


@pytest.mark.unit
def test_bins_keep_every_class_populated():
    rng = np.random.default_rng(2)
    labels = bin_scores(rng, rng.normal(size=1000), 5)
    counts = np.bincount(labels, minlength=5)
    assert counts.min() >= 1000 * 0.5 / 5 * 0.8


@pytest.mark.unit
def test_missing_cells_never_blank_a_whole_row(small_prior_config):
    config = dataclasses.replace(small_prior_config, missing_rate=0.6)
    dataset = sample_prior_dataset(config, np.random.default_rng(3))
    mask = dataset.feature_mask()
    assert mask.any()
    assert not mask.all(axis=1).any()
    assert not dataset.missing_mask[:, dataset.target_index].any()


@pytest.mark.unit
def test_episodes_are_model_ready(small_prior_config):
    sampler = PriorSampler(small_prior_config, max_features=8, rng=np.random.default_rng(4))
    for episode in sampler.sample_episodes(10):
        assert episode.width == 8
        assert np.all(np.isfinite(episode.x_support.values))
        assert set(episode.y_query.tolist()) <= set(episode.y_support.tolist())
        assert set(episode.y_support.tolist()) == set(range(episode.n_classes))


@pytest.mark.unit
def test_fixed_support_fraction_sets_the_support_size(small_prior_config):
    sampler = PriorSampler(small_prior_config, 8, np.random.default_rng(5), support_fraction=0.5)
    episode = sampler.sample_episode()
    n_rows = episode.n_support + episode.n_query
    assert episode.n_support == support_size(n_rows, 0.5)


@pytest.mark.unit
def test_sampler_stream_is_deterministic(small_prior_config):
    first = PriorSampler(small_prior_config, 8).sample_episodes(3)
    second = PriorSampler(small_prior_config, 8).sample_episodes(3)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.x_support.values, b.x_support.values)
        np.testing.assert_array_equal(a.y_query, b.y_query)


@pytest.mark.unit
def test_validation_episodes_do_not_reuse_the_training_stream(small_prior_config):
    held_out = validation_episodes(small_prior_config, 2, 8)
    training = PriorSampler(small_prior_config, 8).sample_episodes(2)
    assert not np.array_equal(held_out[0].x_support.values, training[0].x_support.values)


@pytest.mark.unit
@pytest.mark.parametrize("overrides", [
    {"min_rows": 1},
    {"min_rows": 80, "max_rows": 60},
    {"class_count_range": (1, 3)},
    {"class_count_range": (2, 11)},
    {"missing_rate": 1.0},
])
def test_invalid_prior_settings_are_rejected(overrides):
    with pytest.raises(ValueError):
        PriorConfig(**overrides)


@pytest.mark.unit
def test_prior_must_fit_the_model(small_prior_config):
    with pytest.raises(ValueError):
        small_prior_config.validate_against(max_features=3, max_classes=10)
    small_prior_config.validate_against(max_features=4, max_classes=3)


@pytest.mark.unit
def test_few_desk_scale_tasks_leave_a_class_out_of_support():
    config = PriorConfig(
        min_rows=50,
        max_rows=400,
        feature_count_range=(2, 10),
        class_count_range=(2, 4),
        missing_rate=0.05,
    )
    rng = np.random.default_rng(8)
    degenerate = 0
    for _ in range(1000):
        dataset = sample_prior_dataset(config, rng)
        support_idx, _ = split_support_query(dataset, float(rng.uniform(0.1, 0.9)), rng)
        degenerate += not support_covers_classes(dataset, support_idx)
    assert degenerate < 50


@pytest.mark.unit
def test_sampled_episodes_always_cover_their_classes(small_prior_config):
    sampler = PriorSampler(small_prior_config, max_features=8, rng=np.random.default_rng(9))
    for episode in sampler.sample_episodes(200):
        assert set(episode.y_support.tolist()) == set(range(episode.n_classes))
