"""
Synthetic classification prior for pretraining.

Inputs come from a random Gaussian mixture, pass through a randomly weighted
2-layer tanh map to a scalar score, get noise added, and are binned at random
quantile thresholds into class labels.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from pfnlab.core.models.dataset import ColumnKind, ColumnSchema, Dataset, TaskKind
from pfnlab.core.models.episode import Episode
from pfnlab.core.models.errors import DataValidationError, PriorDegeneracyError
from pfnlab.core.models.preprocessing import QuantileOutput
from pfnlab.core.models.training import PriorConfig
from pfnlab.core.services.preprocessing import encode_targets, fit_preprocess, transform_features
from pfnlab.core.services.splitting import support_size
from pfnlab.core.services.tabular_constraints import TabularConstraints

logger = logging.getLogger(__name__)

TARGET_NAME = "target"


def _draw(rng: np.random.Generator, bounds: Tuple[int, int]) -> int:
    low, high = bounds
    return int(rng.integers(low, high + 1))


def prior_schema(n_features: int) -> Tuple[ColumnSchema, ...]:
    features = tuple(ColumnSchema(f"x{i}", ColumnKind.NUMERIC) for i in range(n_features))
    return features + (ColumnSchema(TARGET_NAME, ColumnKind.NUMERIC, is_target=True),)


def sample_mixture_inputs(
    rng: np.random.Generator,
    n_rows: int,
    n_features: int,
    n_components: int,
    separation: float,
) -> np.ndarray:
    means = rng.normal(scale=separation, size=(n_components, n_features))
    weights = rng.dirichlet(np.ones(n_components))
    components = rng.choice(n_components, size=n_rows, p=weights)
    return means[components] + rng.normal(size=(n_rows, n_features))


def random_score(
    rng: np.random.Generator,
    inputs: np.ndarray,
    latent_width: int,
    noise_scale: float,
    identity_map: bool = False,
) -> np.ndarray:
    """Scalar score of every row under a random 2-layer tanh map, plus noise."""
    n_features = inputs.shape[1]
    if identity_map:
        hidden = inputs
    else:
        first = rng.normal(scale=1.0 / np.sqrt(n_features), size=(n_features, latent_width))
        bias = rng.normal(scale=0.5, size=latent_width)
        hidden = np.tanh(inputs @ first + bias)
    readout = rng.normal(size=hidden.shape[1])
    score = hidden @ readout
    spread = score.std() or 1.0
    return score + noise_scale * spread * rng.normal(size=score.shape[0])


def bin_scores(rng: np.random.Generator, score: np.ndarray, n_classes: int) -> np.ndarray:
    """
    Class labels from random quantile thresholds. Class proportions mix a
    Dirichlet draw with the uniform split so no class is vanishingly rare.
    """
    proportions = 0.5 * rng.dirichlet(np.ones(n_classes)) + 0.5 / n_classes
    thresholds = np.quantile(score, np.cumsum(proportions)[:-1])
    return np.searchsorted(thresholds, score, side="right")


def inject_missing(rng: np.random.Generator, cells: np.ndarray, rate: float) -> np.ndarray:
    """Blank feature cells at `rate`, leaving at least one observed feature per row."""
    n_rows, n_features = cells.shape
    missing = rng.random((n_rows, n_features)) < rate
    for row in np.flatnonzero(missing.all(axis=1)):
        missing[row, rng.integers(n_features)] = False
    cells = cells.copy()
    cells[missing] = None
    return cells


def sample_prior_dataset(config: PriorConfig, rng: np.random.Generator) -> Dataset:
    """
    Draw one classification task. Deterministic given (config, rng state).
    """
    n_features = _draw(rng, config.feature_count_range)
    n_rows = _draw(rng, (config.min_rows, config.max_rows))
    n_classes = _draw(rng, config.class_count_range)
    n_components = _draw(rng, config.mixture_components_range)
    latent_width = _draw(rng, config.latent_width_range)

    inputs = sample_mixture_inputs(rng, n_rows, n_features, n_components, config.component_separation)
    score = random_score(rng, inputs, latent_width, config.noise_scale, config.identity_map)
    labels = bin_scores(rng, score, n_classes)

    features = inputs.astype(object)
    if config.missing_rate > 0:
        features = inject_missing(rng, features, config.missing_rate)
    cells = np.empty((n_rows, n_features + 1), dtype=object)
    cells[:, :n_features] = features
    cells[:, n_features] = labels.astype(float)
    return Dataset(schema=prior_schema(n_features), cells=cells, task=TaskKind.CLASSIFICATION)


def split_support_query(
    dataset: Dataset,
    fraction: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Uniformly random support/query row indices, both sorted."""
    n_support = support_size(dataset.n_rows, fraction)
    order = rng.permutation(dataset.n_rows)
    return np.sort(order[:n_support]), np.sort(order[n_support:])


def support_covers_classes(dataset: Dataset, support_idx: np.ndarray) -> bool:
    targets = np.asarray(dataset.targets(), dtype=float)
    return set(targets[support_idx].tolist()) == set(targets.tolist())


class PriorSampler:
    """
    Stream of training-ready prior episodes.

    Preprocessing is fitted on the support part only. Draws whose support
    misses a class are discarded and redrawn.

    Args:
        config: Prior settings
        max_features: Model input width
        rng: Random stream; defaults to one seeded with `config.seed`
        support_fraction: Fixed support fraction; drawn per episode when None
        output_kind: Quantile output of the per-episode preprocessing
    """

    def __init__(
        self,
        config: PriorConfig,
        max_features: int = TabularConstraints.MAX_FEATURES,
        rng: Optional[np.random.Generator] = None,
        support_fraction: Optional[float] = None,
        output_kind: QuantileOutput = QuantileOutput.UNIFORM,
    ):
        self.config = config
        self.output_kind = output_kind
        self.max_features = max_features
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.support_fraction = support_fraction
        self.resamples = 0

    def _fraction(self) -> float:
        if self.support_fraction is not None:
            return self.support_fraction
        low, high = TabularConstraints.PRIOR_SUPPORT_FRACTION_RANGE
        return float(self.rng.uniform(low, high))

    def sample_episode(self) -> Episode:
        """
        Raises:
            PriorDegeneracyError: If the redraw budget is exhausted
        """
        for _ in range(self.config.max_resample_attempts):
            dataset = sample_prior_dataset(self.config, self.rng)
            support_idx, query_idx = split_support_query(dataset, self._fraction(), self.rng)
            if not support_covers_classes(dataset, support_idx):
                self.resamples += 1
                continue
            try:
                return build_episode(dataset, support_idx, query_idx, self.max_features, self.output_kind)
            except DataValidationError as error:
                logger.debug(
                    "Discarding prior episode",
                    extra={"extra_fields": {"reason": error.message}},
                )
                self.resamples += 1

        raise PriorDegeneracyError(
            f"No usable prior episode after {self.config.max_resample_attempts} draws",
            attempts=self.config.max_resample_attempts,
        )

    def sample_episodes(self, count: int) -> List[Episode]:
        return [self.sample_episode() for _ in range(count)]


def build_episode(
    dataset: Dataset,
    support_idx: np.ndarray,
    query_idx: np.ndarray,
    max_features: int,
    output_kind: QuantileOutput = QuantileOutput.UNIFORM,
) -> Episode:
    """Fit preprocessing on the support rows and encode both sides with it."""
    support = dataset.take(support_idx)
    query = dataset.take(query_idx)
    state = fit_preprocess(support, max_features, output_kind=output_kind)
    return Episode(
        x_support=transform_features(state, support),
        y_support=encode_targets(state, support.targets(), strict=True),
        x_query=transform_features(state, query),
        y_query=encode_targets(state, query.targets(), strict=True),
        task=TaskKind.CLASSIFICATION,
        n_classes=state.n_classes,
    )


def sample_prior_episode(
    config: PriorConfig,
    rng: np.random.Generator,
    max_features: int = TabularConstraints.MAX_FEATURES,
    support_fraction: Optional[float] = None,
) -> Episode:
    return PriorSampler(config, max_features, rng, support_fraction).sample_episode()


def validation_episodes(
    config: PriorConfig,
    count: int,
    max_features: int,
    output_kind: QuantileOutput = QuantileOutput.UNIFORM,
) -> List[Episode]:
    """Fixed held-out episodes, drawn from a stream separate from training."""
    rng = np.random.default_rng([config.seed, 1])
    return PriorSampler(config, max_features, rng, output_kind=output_kind).sample_episodes(count)
