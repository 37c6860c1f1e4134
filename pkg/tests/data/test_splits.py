import logging
from collections import Counter

import numpy as np
import pytest

from lccde_toolkit.core import Dataset
from lccde_toolkit.data.splits import holdout_split, stratified_kfold, stratified_subsample
from lccde_toolkit.exceptions import ConfigurationError


def _per_class_fold_counts(plan, labels):
    return np.array(
        [np.bincount(labels[fold], minlength=labels.max() + 1) for fold in plan.test_folds]
    )


def test_kfold_exact_divisibility():
    labels = np.array([0] * 5 + [1] * 5)
    plan = stratified_kfold(labels, 5, seed=0)
    assert plan.k == 5
    for fold in plan.test_folds:
        assert sorted(labels[fold].tolist()) == [0, 1]


def test_kfold_uneven_counts_differ_by_at_most_one():
    labels = np.array([0] * 6 + [1] * 5)
    plan = stratified_kfold(labels, 5, seed=3)
    sizes = [len(fold) for fold in plan.test_folds]
    assert max(sizes) - min(sizes) <= 1
    counts = _per_class_fold_counts(plan, labels)
    assert (counts.max(axis=0) - counts.min(axis=0) <= 1).all()


def test_kfold_is_deterministic():
    labels = np.random.default_rng(0).integers(0, 3, size=40)
    first = stratified_kfold(labels, 4, seed=11)
    second = stratified_kfold(labels, 4, seed=11)
    assert all(np.array_equal(a, b) for a, b in zip(first.test_folds, second.test_folds))


def _check_plan(plan, labels):
    n = len(labels)
    held_out = np.concatenate(plan.test_folds)
    assert sorted(held_out.tolist()) == list(range(n))
    for fold, (train, test) in enumerate(plan.splits()):
        assert np.intersect1d(train, test).size == 0
        assert len(train) + len(test) == n
        assert np.array_equal(train, plan.train_indices(fold))
    sizes = [len(fold) for fold in plan.test_folds]
    assert max(sizes) - min(sizes) <= 1
    counts = _per_class_fold_counts(plan, labels)
    assert (counts.max(axis=0) - counts.min(axis=0) <= 1).all()


@pytest.mark.parametrize("seed", range(20))
def test_kfold_partitions_rows(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(10, 80))
    k = int(rng.integers(2, 8))
    labels = rng.integers(0, 4, size=n)
    _check_plan(stratified_kfold(labels, k, seed=seed), labels)


def test_kfold_partition_and_balance_over_1000_label_vectors():
    rng = np.random.default_rng(2024)
    for case in range(1000):
        n = int(rng.integers(2, 60))
        k = int(rng.integers(2, n + 1))
        labels = rng.integers(0, int(rng.integers(1, 6)), size=n)
        _check_plan(stratified_kfold(labels, k, seed=case), labels)


def test_kfold_warns_about_sparse_classes(caplog):
    labels = np.array([0] * 10 + [1] * 2)
    with caplog.at_level(logging.WARNING, logger="lccde"):
        plan = stratified_kfold(labels, 5)
    assert plan.sparse_classes == (1,)
    assert "fewer than 5 samples" in caplog.text


@pytest.mark.parametrize("k,n", [(1, 10), (0, 10), (5, 4)])
def test_kfold_rejects_bad_fold_counts(k, n):
    with pytest.raises(ConfigurationError):
        stratified_kfold(np.zeros(n, dtype=int), k)


def _dataset(labels) -> Dataset:
    labels = np.asarray(labels)
    features = np.arange(len(labels), dtype=float)[:, None]
    return Dataset(features, labels, ["row"], [f"c{c}" for c in range(labels.max() + 1)])


def test_holdout_exact_arithmetic():
    split = holdout_split(_dataset([0] * 50 + [1] * 50), 0.2, seed=0)
    assert Counter(split.test.labels.tolist()) == {0: 10, 1: 10}
    assert split.train.n_samples == 80


def test_holdout_keeps_singleton_class_in_train(caplog):
    with caplog.at_level(logging.WARNING, logger="lccde"):
        split = holdout_split(_dataset([0] * 9 + [1]), 0.2, seed=0)
    assert split.singleton_classes == (1,)
    assert 1 in split.train.labels.tolist()
    assert 1 not in split.test.labels.tolist()
    assert "single sample" in caplog.text


@pytest.mark.parametrize("seed", range(5))
def test_holdout_partitions_rows(seed):
    labels = np.random.default_rng(seed).integers(0, 3, size=57)
    dataset = _dataset(labels)
    split = holdout_split(dataset, 0.25, seed=seed)
    rows = split.train.features[:, 0].tolist() + split.test.features[:, 0].tolist()
    assert sorted(rows) == dataset.features[:, 0].tolist()
    # original row order is preserved inside each part
    assert split.train.features[:, 0].tolist() == sorted(split.train.features[:, 0])
    assert split.test.features[:, 0].tolist() == sorted(split.test.features[:, 0])


def test_holdout_is_deterministic():
    dataset = _dataset(np.random.default_rng(1).integers(0, 3, size=40))
    first = holdout_split(dataset, 0.2, seed=4)
    second = holdout_split(dataset, 0.2, seed=4)
    assert np.array_equal(first.test.features, second.test.features)


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
def test_holdout_rejects_bad_fraction(fraction):
    with pytest.raises(ConfigurationError):
        holdout_split(_dataset([0, 1, 0, 1]), fraction)


def test_stratified_subsample_keeps_proportions():
    dataset = _dataset([0] * 900 + [1] * 90 + [2] * 10)
    sample = stratified_subsample(dataset, 100, seed=0)
    assert Counter(sample.labels.tolist()) == {0: 90, 1: 9, 2: 1}
    assert sample.features[:, 0].tolist() == sorted(sample.features[:, 0])


def test_stratified_subsample_keeps_rare_classes():
    dataset = _dataset([0] * 999 + [1])
    sample = stratified_subsample(dataset, 10, seed=0)
    assert 1 in sample.labels.tolist()


def test_stratified_subsample_small_dataset_unchanged():
    dataset = _dataset([0, 1, 0])
    assert stratified_subsample(dataset, 10) is dataset
