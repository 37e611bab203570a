"""
Per-variable quantile transform.
"""
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from pfnlab.core.models.errors import EmptyColumnError
from pfnlab.core.models.preprocessing import QuantileMap, QuantileOutput
from pfnlab.core.services.tabular_constraints import TabularConstraints


def fit_quantile_map(
    values: Sequence[float],
    n_quantiles: Optional[int] = None,
    output_kind: QuantileOutput = QuantileOutput.UNIFORM,
    column: str = "",
) -> QuantileMap:
    """
    Fit knots at the empirical quantiles of the observed values.

    Args:
        values: Column values; NaN marks a missing cell
        n_quantiles: Evenly spaced ranks to sample; defaults to min(1000, n)
        output_kind: Uniform ranks or their standard normal scores
        column: Column name used in error messages

    Returns:
        QuantileMap with strictly increasing knot values

    Raises:
        EmptyColumnError: If every value is missing
    """
    observed = np.asarray(values, dtype=float)
    observed = observed[~np.isnan(observed)]
    if observed.size == 0:
        raise EmptyColumnError(column)

    if n_quantiles is None:
        n_quantiles = min(TabularConstraints.MAX_QUANTILES, observed.size)
    n_quantiles = max(int(n_quantiles), 1)

    if n_quantiles == 1:
        ranks = np.array([TabularConstraints.CONSTANT_COLUMN_RANK])
        quantiles = np.array([np.median(observed)])
    else:
        ranks = np.linspace(0.0, 1.0, n_quantiles)
        quantiles = np.quantile(observed, ranks)

    # Duplicate knot values share the mean of their ranks
    knot_values, inverse = np.unique(quantiles, return_inverse=True)
    knot_ranks = np.bincount(inverse, weights=ranks) / np.bincount(inverse)

    return QuantileMap(
        knot_values=knot_values,
        knot_ranks=knot_ranks,
        n_quantiles=n_quantiles,
        output_kind=QuantileOutput(output_kind),
    )


def quantile_ranks(quantile_map: QuantileMap, x) -> np.ndarray:
    """Uniform rank of every input; NaN inputs stay NaN."""
    values = np.asarray(x, dtype=float)
    if quantile_map.is_constant:
        ranks = np.full(values.shape, TabularConstraints.CONSTANT_COLUMN_RANK)
    else:
        ranks = np.interp(
            values, quantile_map.knot_values, quantile_map.knot_ranks, left=0.0, right=1.0
        )
    return np.where(np.isnan(values), np.nan, ranks)


def apply_quantile_map(quantile_map: QuantileMap, x):
    """
    Map raw values through a fitted quantile map.

    Inputs below the smallest knot clamp to rank 0 and above the largest to
    rank 1. Gaussian output sends clipped ranks through the normal inverse CDF.
    Accepts a scalar or an array and returns the same kind.
    """
    ranks = quantile_ranks(quantile_map, x)
    if quantile_map.output_kind == QuantileOutput.GAUSSIAN:
        clip = TabularConstraints.GAUSSIAN_RANK_CLIP
        ranks = norm.ppf(np.clip(ranks, clip, 1.0 - clip))
    if np.ndim(x) == 0:
        return float(ranks)
    return ranks


def invert_quantile_map(quantile_map: QuantileMap, y) -> np.ndarray:
    """
    Map outputs of `apply_quantile_map` back to the raw scale.
    Ranks outside [0, 1] clamp to the extreme knots.
    """
    outputs = np.asarray(y, dtype=float)
    if quantile_map.output_kind == QuantileOutput.GAUSSIAN:
        outputs = norm.cdf(outputs)
    if quantile_map.is_constant:
        return np.full(outputs.shape, quantile_map.knot_values[0])
    return np.interp(outputs, quantile_map.knot_ranks, quantile_map.knot_values)
