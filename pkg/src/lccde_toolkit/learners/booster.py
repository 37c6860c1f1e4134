"""
Multiclass softmax boosting: one regression tree per class per round.
"""

import logging
import time
from collections.abc import Callable, Sequence

import numpy as np
from scipy.special import log_softmax, softmax
from typing_extensions import override

from ..core import Dataset, Prediction, validate_dataset
from ..exceptions import DegenerateLabelsError, FeatureDimensionError, InvalidDatasetError
from ..logger import getLogger
from .config import BoosterConfig, Variant
from .growers import grow_depthwise_tree, grow_leafwise_tree, grow_oblivious_tree
from .sampling import goss_sample
from .tree import RegressionTree, presort, softmax_gradients, subset_order

LOGGER = getLogger("learners")


class TrainedForest:
    """
    A fitted boosted forest.

    ``trees[r][c]`` is the tree grown for class ``c`` in round ``r``. Raw
    class scores are ``base_score`` plus the sum of tree outputs; class
    probabilities are their softmax.
    """

    variant: Variant
    trees: tuple[tuple[RegressionTree, ...], ...]
    base_score: np.ndarray
    config: BoosterConfig
    n_features: int
    fit_seconds: float

    def __init__(
        self,
        variant: Variant | str,
        trees: Sequence[Sequence[RegressionTree]],
        base_score,
        config: BoosterConfig,
        n_features: int,
        fit_seconds: float = 0.0,
    ):
        self.variant = Variant(variant)
        self.trees = tuple(tuple(round_trees) for round_trees in trees)
        self.base_score = np.asarray(base_score, dtype=np.float64)
        self.base_score.flags.writeable = False
        self.config = config
        self.n_features = int(n_features)
        self.fit_seconds = float(fit_seconds)
        for round_trees in self.trees:
            if len(round_trees) != self.n_classes:
                raise ValueError(
                    f"every round needs {self.n_classes} trees, got {len(round_trees)}"
                )

    @property
    def n_classes(self) -> int:
        return len(self.base_score)

    @property
    def n_rounds(self) -> int:
        return len(self.trees)

    def iter_trees(self):
        for round_trees in self.trees:
            yield from round_trees

    @override
    def __repr__(self) -> str:
        return (
            f"TrainedForest(variant={self.variant.value}, rounds={self.n_rounds}, "
            f"classes={self.n_classes}, features={self.n_features})"
        )


def check_trainable(dataset: Dataset) -> None:
    """Raise unless the dataset is valid and holds at least two classes."""
    if dataset.labels is not None and len(dataset.labels) > 0:
        present = np.unique(dataset.labels)
        if len(present) < 2:
            raise DegenerateLabelsError(
                reason=f"only class id {int(present[0])} is present"
            )
    violations = validate_dataset(dataset)
    if violations:
        raise InvalidDatasetError(violations)


def _check_dimension(forest: TrainedForest, features: np.ndarray) -> None:
    if features.ndim != 2 or features.shape[1] != forest.n_features:
        actual = features.shape[1] if features.ndim == 2 else features.size
        raise FeatureDimensionError(expected=forest.n_features, actual=actual)


def _grow_tree(
    variant: Variant,
    config: BoosterConfig,
    features: np.ndarray,
    order: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    round_index: int,
    class_id: int,
) -> RegressionTree:
    if variant is Variant.DEPTHWISE:
        return grow_depthwise_tree(features, g, h, config, order)
    if variant is Variant.OBLIVIOUS:
        return grow_oblivious_tree(
            features,
            g,
            h,
            config.max_depth,
            config.l2_reg,
            config.learning_rate,
            order,
        )
    sample = goss_sample(
        np.abs(g),
        config.goss_top_fraction,
        config.goss_rand_fraction,
        seed=[config.seed, round_index, class_id],
    )
    weights = sample.weights
    return grow_leafwise_tree(
        features[sample.indices],
        g[sample.indices] * weights,
        h[sample.indices] * weights,
        config,
        subset_order(order, sample.indices, len(features)),
    )


def fit(
    config: BoosterConfig,
    variant: Variant | str,
    dataset: Dataset,
    *,
    clock: Callable[[], float] = time.perf_counter,
) -> TrainedForest:
    """
    Train one boosted forest.

    Every round computes softmax gradients ``g = p − y``, ``h = p(1 − p)``
    from the current scores, grows one tree per class on them and only then
    adds all class trees to the scores. Training is deterministic given
    ``config.seed`` and the data.

    Raises:
        InvalidDatasetError: the dataset violates its invariants
        DegenerateLabelsError: fewer than two classes are present
    """
    variant = Variant(variant)
    config = BoosterConfig.lazy_build(config)
    started = clock()
    check_trainable(dataset)
    features = dataset.features
    order = presort(features)
    labels = dataset.labels
    n_classes = dataset.n_classes
    base_score = np.zeros(n_classes)
    scores = np.tile(base_score, (dataset.n_samples, 1))

    trees: list[tuple[RegressionTree, ...]] = []
    for round_index in range(config.rounds):
        gradients = softmax_gradients(softmax(scores, axis=1), labels)
        round_trees = tuple(
            _grow_tree(
                variant,
                config,
                features,
                order,
                gradients.g[:, class_id],
                gradients.h[:, class_id],
                round_index,
                class_id,
            )
            for class_id in range(n_classes)
        )
        for class_id, tree in enumerate(round_trees):
            scores[:, class_id] += tree.predict(features)
        trees.append(round_trees)
        if LOGGER.isEnabledFor(logging.DEBUG):
            LOGGER.debug(
                "%s round %d loss %.9f",
                variant.value,
                round_index,
                _mean_log_loss(scores, labels),
            )

    fit_seconds = clock() - started
    LOGGER.info(
        "Fitted %s forest: %d rounds x %d classes on %d rows in %.3fs",
        variant.value,
        config.rounds,
        n_classes,
        dataset.n_samples,
        fit_seconds,
    )
    return TrainedForest(
        variant, trees, base_score, config, dataset.n_features, fit_seconds
    )


def raw_scores(forest: TrainedForest, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    _check_dimension(forest, features)
    scores = np.tile(forest.base_score, (len(features), 1))
    for round_trees in forest.trees:
        for class_id, tree in enumerate(round_trees):
            scores[:, class_id] += tree.predict(features)
    return scores


def predict_proba_matrix(forest: TrainedForest, features: np.ndarray) -> np.ndarray:
    """Class probabilities for every row of a feature matrix."""
    return softmax(raw_scores(forest, features), axis=1)


def predict_proba(forest: TrainedForest, row) -> Prediction:
    """
    Predict one feature row.

    Raises:
        FeatureDimensionError: the row length differs from the training width
    """
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise FeatureDimensionError(expected=forest.n_features, actual=row.size)
    return Prediction.from_probabilities(predict_proba_matrix(forest, row[None, :])[0])


def _mean_log_loss(scores: np.ndarray, labels: np.ndarray) -> float:
    log_probabilities = log_softmax(scores, axis=1)
    return float(-log_probabilities[np.arange(len(labels)), labels].mean())


def staged_log_loss(forest: TrainedForest, dataset: Dataset) -> list[float]:
    """Mean softmax cross-entropy before the first round and after each round."""
    features = dataset.features
    _check_dimension(forest, features)
    scores = np.tile(forest.base_score, (dataset.n_samples, 1))
    losses = [_mean_log_loss(scores, dataset.labels)]
    for round_trees in forest.trees:
        for class_id, tree in enumerate(round_trees):
            scores[:, class_id] += tree.predict(features)
        losses.append(_mean_log_loss(scores, dataset.labels))
    return losses
