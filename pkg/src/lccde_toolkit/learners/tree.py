"""
Regression trees over second-order gradient statistics and the exact
greedy split search shared by every growth variant.
"""

from typing import NamedTuple

import numpy as np
from typing_extensions import override

LEAF = -1


class GradientPairs(NamedTuple):
    """First- and second-order gradients of the softmax cross-entropy.

    Both arrays have shape (N, n_classes): ``g = p - y`` and ``h = p (1 - p)``.
    """

    g: np.ndarray
    h: np.ndarray


def softmax_gradients(probabilities: np.ndarray, labels: np.ndarray) -> GradientPairs:
    onehot = np.zeros_like(probabilities)
    onehot[np.arange(len(labels)), labels] = 1.0
    return GradientPairs(probabilities - onehot, probabilities * (1.0 - probabilities))


class Split(NamedTuple):
    threshold: float
    gain: float


class FeatureSplit(NamedTuple):
    feature: int
    threshold: float
    gain: float


def _score(grad_sum, hess_sum, l2_reg: float):
    """G²/(H+λ), zero wherever the denominator vanishes."""
    grad_sum = np.asarray(grad_sum, dtype=np.float64)
    denominator = np.asarray(hess_sum, dtype=np.float64) + l2_reg
    return np.divide(
        grad_sum * grad_sum,
        denominator,
        out=np.zeros(np.broadcast(grad_sum, denominator).shape),
        where=denominator > 0,
    )


def leaf_weight(
    grad_sum: float, hess_sum: float, l2_reg: float, learning_rate: float = 1.0
) -> float:
    """Newton step −G/(H+λ) for one leaf, scaled by the learning rate."""
    denominator = hess_sum + l2_reg
    if denominator <= 0:
        return 0.0
    return float(-learning_rate * grad_sum / denominator)


def midpoint_thresholds(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Midpoints between adjacent distinct values, kept inside [lower, upper)."""
    with np.errstate(over="ignore"):
        middle = (lower + upper) / 2.0
    inside = (lower <= middle) & (middle < upper)
    return np.where(inside, middle, lower)


def find_best_split(
    values: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    l2_reg: float,
    min_child_hessian: float,
) -> Split | None:
    """
    Exact greedy split search over one feature.

    ``values`` must be sorted ascending with ``g`` and ``h`` aligned to it.
    Candidate thresholds are the midpoints between distinct adjacent values;
    samples with ``value <= threshold`` go left. The gain is
    ½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] and both children must keep a
    hessian sum of at least ``min_child_hessian``.

    Returns:
        the highest-gain split (lowest threshold on ties), or None when no
        candidate has a strictly positive gain
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        return None
    grad_left = np.cumsum(g)[:-1]
    hess_left = np.cumsum(h)[:-1]
    grad_total = float(np.sum(g))
    hess_total = float(np.sum(h))
    grad_right = grad_total - grad_left
    hess_right = hess_total - hess_left

    valid = (
        (values[:-1] < values[1:])
        & (hess_left >= min_child_hessian)
        & (hess_right >= min_child_hessian)
    )
    if not valid.any():
        return None
    gain = 0.5 * (
        _score(grad_left, hess_left, l2_reg)
        + _score(grad_right, hess_right, l2_reg)
        - _score(grad_total, hess_total, l2_reg)
    )
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))
    if not gain[best] > 0:
        return None
    threshold = midpoint_thresholds(values[best : best + 1], values[best + 1 : best + 2])
    return Split(float(threshold[0]), float(gain[best]))


def presort(features: np.ndarray) -> np.ndarray:
    """Row indices sorted by every column, shape (N, F); equal values keep row order."""
    return np.argsort(features, axis=0, kind="stable")


def subset_order(order: np.ndarray, indices: np.ndarray, n_rows: int) -> np.ndarray:
    """
    The presort of ``features[indices]`` derived from the presort of ``features``.

    ``indices`` must be ascending and unique; rows are renumbered to their
    position in ``indices``.
    """
    position = np.full(n_rows, -1, dtype=np.int64)
    position[indices] = np.arange(len(indices))
    mapped = position[order]
    return mapped.T[mapped.T >= 0].reshape(order.shape[1], len(indices)).T


def partition_order(
    order: np.ndarray, goes_left: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Split a node's presorted rows between its children; columns stay sorted."""
    n_columns = order.shape[1]
    left = goes_left[order].T
    n_left = int(np.count_nonzero(left[0]))
    columns = order.T
    return (
        columns[left].reshape(n_columns, n_left).T,
        columns[~left].reshape(n_columns, len(order) - n_left).T,
    )


def best_feature_split(
    features: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    order: np.ndarray,
    l2_reg: float,
    min_child_hessian: float,
) -> FeatureSplit | None:
    """
    Best split of one node over every feature.

    ``order`` holds, per column, the node's row indices sorted by that
    column (see `presort` and `partition_order`), so nodes never re-sort.
    Ties go to the lowest feature index, then the lowest threshold.
    """
    best: FeatureSplit | None = None
    for feature in range(features.shape[1]):
        rows = order[:, feature]
        split = find_best_split(
            features[rows, feature], g[rows], h[rows], l2_reg, min_child_hessian
        )
        if split is not None and (best is None or split.gain > best.gain):
            best = FeatureSplit(feature, split.threshold, split.gain)
    return best


class RegressionTree:
    """
    Binary regression tree stored as flat node arrays.

    Node 0 is the root. Internal nodes carry ``feature``/``threshold`` and
    child indices; leaves have ``feature == -1`` and carry ``value``, the
    learning-rate-scaled leaf weight.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    sample_count: int

    def __init__(self, feature, threshold, left, right, value, sample_count: int = 0):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.sample_count = int(sample_count)
        for array in (self.feature, self.threshold, self.left, self.right, self.value):
            array.flags.writeable = False

    @classmethod
    def single_leaf(cls, value: float, sample_count: int = 0) -> "RegressionTree":
        return cls([LEAF], [0.0], [LEAF], [LEAF], [value], sample_count)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature == LEAF))

    def node_depths(self) -> np.ndarray:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        stack = [0]
        while stack:
            node = stack.pop()
            if self.feature[node] != LEAF:
                for child in (self.left[node], self.right[node]):
                    depths[child] = depths[node] + 1
                    stack.append(int(child))
        return depths

    def depth(self) -> int:
        return int(self.node_depths().max())

    def levels(self) -> list[set[tuple[int, float]]]:
        """The (feature, threshold) pairs used by internal nodes at each depth."""
        depths = self.node_depths()
        found: dict[int, set[tuple[int, float]]] = {}
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                found.setdefault(int(depths[node]), set()).add(
                    (int(self.feature[node]), float(self.threshold[node]))
                )
        return [found[level] for level in sorted(found)]

    def apply(self, features: np.ndarray) -> np.ndarray:
        """Index of the leaf reached by every row."""
        node = np.zeros(len(features), dtype=np.int64)
        rows = np.arange(len(features))
        while True:
            split_feature = self.feature[node]
            internal = split_feature != LEAF
            if not internal.any():
                return node
            active = rows[internal]
            current = node[active]
            goes_left = (
                features[active, split_feature[internal]] <= self.threshold[current]
            )
            node[active] = np.where(goes_left, self.left[current], self.right[current])

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.value[self.apply(features)]

    def same_structure(self, other: "RegressionTree") -> bool:
        return all(
            np.array_equal(mine, theirs)
            for mine, theirs in (
                (self.feature, other.feature),
                (self.threshold, other.threshold),
                (self.left, other.left),
                (self.right, other.right),
                (self.value, other.value),
            )
        )

    @override
    def __repr__(self) -> str:
        return f"RegressionTree(nodes={self.n_nodes}, leaves={self.n_leaves})"


class TreeBuilder:
    """Mutable node lists, frozen into a RegressionTree by `build`."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_leaf(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        return len(self.feature) - 1

    def split_leaf(self, node: int, feature: int, threshold: float) -> tuple[int, int]:
        """Turn leaf ``node`` into an internal node with two fresh leaves."""
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.value[node] = 0.0
        left = self.add_leaf(0.0)
        right = self.add_leaf(0.0)
        self.left[node] = left
        self.right[node] = right
        return left, right

    def set_value(self, node: int, value: float) -> None:
        self.value[node] = value

    def build(self, sample_count: int) -> RegressionTree:
        return RegressionTree(
            self.feature, self.threshold, self.left, self.right, self.value, sample_count
        )
