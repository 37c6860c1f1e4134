"""
Stratified fold plans, hold-out splits and subsampling
"""

import math
from typing import NamedTuple

import numpy as np

from ..core import Dataset
from ..exceptions import ConfigurationError
from ..logger import getLogger

LOGGER = getLogger("splits")


class FoldPlan(NamedTuple):
    """
    Test folds of a k-fold plan.

    ``test_folds[i]`` holds the ascending row indices held out in fold i;
    the training rows of fold i are the complement. ``sparse_classes`` lists
    class ids with fewer samples than folds.
    """

    test_folds: tuple[np.ndarray, ...]
    n_samples: int
    sparse_classes: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.test_folds)

    def train_indices(self, fold: int) -> np.ndarray:
        held_out = np.zeros(self.n_samples, dtype=bool)
        held_out[self.test_folds[fold]] = True
        return np.flatnonzero(~held_out)

    def splits(self):
        """Yield ``(train_indices, test_indices)`` per fold."""
        for fold, test in enumerate(self.test_folds):
            yield self.train_indices(fold), test


def stratified_kfold(labels, k: int, seed: int = 0) -> FoldPlan:
    """
    Stratified k-fold plan.

    Within every class (ascending class id) the rows are shuffled with a
    seeded generator and dealt round-robin over the folds. The dealing
    position carries over from one class to the next, so overall fold sizes
    and per-class fold counts each differ by at most one.

    Raises:
        ConfigurationError: ``k < 2`` or fewer rows than folds
    """
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    n = len(labels)
    if k < 2:
        raise ConfigurationError(reason=f"k-fold needs k >= 2, got {k}")
    if n < k:
        raise ConfigurationError(reason=f"{n} samples cannot fill {k} folds")

    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=np.int64)
    position = 0
    sparse: list[int] = []
    for class_id in np.unique(labels):
        rows = np.flatnonzero(labels == class_id)
        rows = rows[rng.permutation(len(rows))]
        assignment[rows] = (position + np.arange(len(rows))) % k
        position = (position + len(rows)) % k
        if len(rows) < k:
            sparse.append(int(class_id))

    if sparse:
        LOGGER.warning(
            "Classes %s have fewer than %d samples and are missing from some folds",
            sparse,
            k,
        )
    folds = tuple(np.flatnonzero(assignment == fold) for fold in range(k))
    return FoldPlan(folds, n, tuple(sparse))


class HoldoutSplit(NamedTuple):
    train: Dataset
    test: Dataset
    singleton_classes: tuple[int, ...] = ()


def holdout_split(
    dataset: Dataset, test_fraction: float = 0.2, seed: int = 0
) -> HoldoutSplit:
    """
    Stratified train/test split.

    Each class contributes ``round(test_fraction · count)`` rows (halves
    round up) to the test part, always leaving one row for training. A class
    with a single sample stays entirely in training. Both parts keep the
    original row order.
    """
    if not 0 < test_fraction < 1:
        raise ConfigurationError(
            reason=f"test_fraction must lie in (0, 1), got {test_fraction}"
        )
    if dataset.labels is None:
        raise ConfigurationError(reason="holdout_split needs a labeled dataset")
    rng = np.random.default_rng(seed)
    labels = dataset.labels
    in_test = np.zeros(dataset.n_samples, dtype=bool)
    singletons: list[int] = []
    for class_id in np.unique(labels):
        rows = np.flatnonzero(labels == class_id)
        if len(rows) == 1:
            singletons.append(int(class_id))
            continue
        n_test = min(math.floor(test_fraction * len(rows) + 0.5), len(rows) - 1)
        in_test[rows[rng.permutation(len(rows))[:n_test]]] = True

    if singletons:
        LOGGER.warning(
            "Classes %s have a single sample; kept in the training split",
            [dataset.class_names[class_id] for class_id in singletons],
        )
    return HoldoutSplit(
        dataset.subset(np.flatnonzero(~in_test)),
        dataset.subset(np.flatnonzero(in_test)),
        tuple(singletons),
    )


def stratified_subsample(dataset: Dataset, n_rows: int, seed: int = 0) -> Dataset:
    """
    Class-proportional subsample of ``n_rows`` rows.

    Every class present keeps at least one row; the original row order is
    preserved. A dataset no larger than ``n_rows`` is returned unchanged.
    """
    if dataset.labels is None:
        raise ConfigurationError(reason="stratified_subsample needs a labeled dataset")
    if n_rows >= dataset.n_samples:
        return dataset
    if n_rows < 1:
        raise ConfigurationError(reason=f"n_rows must be positive, got {n_rows}")
    rng = np.random.default_rng(seed)
    labels = dataset.labels
    keep = np.zeros(dataset.n_samples, dtype=bool)
    share = n_rows / dataset.n_samples
    for class_id in np.unique(labels):
        rows = np.flatnonzero(labels == class_id)
        quota = max(1, math.floor(share * len(rows) + 0.5))
        keep[rows[rng.permutation(len(rows))[:quota]]] = True
    return dataset.subset(np.flatnonzero(keep))
