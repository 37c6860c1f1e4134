"""Gradient-based one-side sampling"""

import math
from typing import NamedTuple

import numpy as np

from ..exceptions import ConfigurationError


class GossSample(NamedTuple):
    indices: np.ndarray
    weights: np.ndarray


def _share(fraction: float, n: int) -> int:
    # round away float noise such as 0.3 * 10 == 3.0000000000000004
    return math.ceil(round(fraction * n, 9))


def goss_sample(
    gradient_magnitudes: np.ndarray,
    top_fraction: float,
    rand_fraction: float,
    seed,
) -> GossSample:
    """
    Keep every large-gradient sample and a random share of the rest.

    The ``ceil(a·N)`` largest magnitudes are kept with weight 1 (earlier
    index first on equal magnitudes). ``ceil(b·N)`` of the remaining samples
    are drawn uniformly without replacement and weighted ``(1 − a)/b`` to
    keep gradient sums unbiased. The total is capped at N.

    Args:
        gradient_magnitudes: |g| per sample
        top_fraction: a, share of largest-gradient samples
        rand_fraction: b, share drawn from the small-gradient remainder
        seed: anything accepted by ``numpy.random.default_rng``

    Returns:
        selected indices (ascending) and their weights
    """
    magnitudes = np.asarray(gradient_magnitudes, dtype=np.float64)
    if not (0 <= top_fraction <= 1 and 0 <= rand_fraction <= 1):
        raise ConfigurationError(
            reason=f"GOSS fractions must lie in [0, 1], got a={top_fraction}, b={rand_fraction}"
        )
    if top_fraction + rand_fraction > 1:
        raise ConfigurationError(
            reason=f"GOSS fractions a={top_fraction} and b={rand_fraction} sum above 1"
        )
    n = len(magnitudes)
    top_n = min(_share(top_fraction, n), n)
    rand_n = min(_share(rand_fraction, n), n - top_n)

    ranked = np.argsort(-magnitudes, kind="stable")
    top = ranked[:top_n]
    rest = np.sort(ranked[top_n:])
    if rand_n > 0:
        rng = np.random.default_rng(seed)
        sampled = rng.choice(rest, size=rand_n, replace=False)
        rand_weight = (1.0 - top_fraction) / rand_fraction
    else:
        sampled = np.zeros(0, dtype=np.int64)
        rand_weight = 0.0

    indices = np.concatenate([top, sampled]).astype(np.int64)
    weights = np.concatenate([np.ones(len(top)), np.full(len(sampled), rand_weight)])
    order = np.argsort(indices, kind="stable")
    return GossSample(indices[order], weights[order])
