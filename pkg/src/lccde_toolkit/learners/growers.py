"""
The three tree-growth strategies.

* depthwise: level-by-level exact greedy growth bounded by ``max_depth``
* leafwise: best-first growth bounded by ``max_leaves`` (and ``max_depth``)
* oblivious: symmetric trees, one shared (feature, threshold) per level

Every grower accepts the presort of ``features`` (see `presort`) so a
boosting run sorts its feature matrix once instead of once per tree.
"""

import heapq

import numpy as np

from .config import BoosterConfig
from .tree import (
    RegressionTree,
    TreeBuilder,
    _score,
    best_feature_split,
    leaf_weight,
    midpoint_thresholds,
    partition_order,
    presort,
)


def _leaf_value(
    g: np.ndarray, h: np.ndarray, rows: np.ndarray, config: BoosterConfig
) -> float:
    return leaf_weight(
        g[rows].sum(), h[rows].sum(), config.l2_reg, config.learning_rate
    )


def grow_depthwise_tree(
    features: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    config: BoosterConfig,
    order: np.ndarray | None = None,
) -> RegressionTree:
    """Split every node greedily until ``max_depth`` or no positive gain."""
    if order is None:
        order = presort(features)
    builder = TreeBuilder()

    def grow(node: int, node_order: np.ndarray, depth: int) -> None:
        split = None
        if depth < config.max_depth and len(node_order) > 1:
            split = best_feature_split(
                features, g, h, node_order, config.l2_reg, config.min_child_hessian
            )
        if split is None:
            builder.set_value(node, _leaf_value(g, h, node_order[:, 0], config))
            return
        left, right = builder.split_leaf(node, split.feature, split.threshold)
        left_order, right_order = partition_order(
            node_order, features[:, split.feature] <= split.threshold
        )
        grow(left, left_order, depth + 1)
        grow(right, right_order, depth + 1)

    grow(builder.add_leaf(0.0), order, 0)
    return builder.build(len(features))


def grow_leafwise_tree(
    features: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    config: BoosterConfig,
    order: np.ndarray | None = None,
) -> RegressionTree:
    """
    Best-first growth: always split the leaf with the largest gain.

    Stops at ``max_leaves`` leaves or when no leaf has a positive-gain split.
    Equal gains go to the leaf created first.
    """
    if order is None:
        order = presort(features)
    builder = TreeBuilder()
    orders: dict[int, np.ndarray] = {}
    depths: dict[int, int] = {}
    candidates: list[tuple[float, int, int, float]] = []

    def consider(node: int) -> None:
        if depths[node] >= config.max_depth or len(orders[node]) < 2:
            return
        split = best_feature_split(
            features, g, h, orders[node], config.l2_reg, config.min_child_hessian
        )
        if split is not None:
            heapq.heappush(candidates, (-split.gain, node, split.feature, split.threshold))

    root = builder.add_leaf(0.0)
    orders[root] = order
    depths[root] = 0
    consider(root)
    n_leaves = 1
    while candidates and n_leaves < config.max_leaves:
        _, node, feature, threshold = heapq.heappop(candidates)
        left, right = builder.split_leaf(node, feature, threshold)
        orders[left], orders[right] = partition_order(
            orders.pop(node), features[:, feature] <= threshold
        )
        depths[left] = depths[right] = depths[node] + 1
        n_leaves += 1
        consider(left)
        consider(right)

    for node, node_order in orders.items():
        builder.set_value(node, _leaf_value(g, h, node_order[:, 0], config))
    return builder.build(len(features))


def _starts(counts: np.ndarray) -> np.ndarray:
    return np.cumsum(counts) - counts


def _running_within(values: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Inclusive running sums restarting at every ``start`` position."""
    running = np.cumsum(values)
    return running - (running - values)[start]


def _split_score(grad_left, hess_left, grad_total, hess_total, l2_reg: float):
    return _score(grad_left, hess_left, l2_reg) + _score(
        grad_total - grad_left, hess_total - hess_left, l2_reg
    )


def _regroup(
    grouped: np.ndarray, counts: np.ndarray, goes_right: np.ndarray
) -> np.ndarray:
    """
    Re-group presorted rows once every leaf ``l`` splits into ``2l, 2l + 1``.

    ``grouped`` holds, per column, the rows ordered by leaf and then by that
    column's value; leaf ``l`` owns the positions ``counts[:l].sum()`` up to
    ``counts[:l + 1].sum()`` in every column. The partition is stable.
    """
    n, n_columns = grouped.shape
    leaf_at = np.repeat(np.arange(len(counts)), counts)
    start = _starts(counts)[leaf_at]
    flag = goes_right[grouped]
    rights = np.cumsum(flag, axis=0) - flag
    rights_before = rights - rights[start]
    lefts_before = (np.arange(n) - start)[:, None] - rights_before
    child = 2 * leaf_at[:, None] + flag
    child_counts = np.bincount(child[:, 0], minlength=2 * len(counts))
    position = _starts(child_counts)[child] + np.where(flag, rights_before, lefts_before)
    regrouped = np.empty_like(grouped)
    regrouped[position, np.arange(n_columns)[None, :]] = grouped
    return regrouped


def _best_level_split(
    features: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    order: np.ndarray,
    grouped: np.ndarray,
    counts: np.ndarray,
    l2_reg: float,
) -> tuple[int, float, float] | None:
    """
    (feature, threshold, gain) maximizing the gain summed over all leaves.

    Walking a column in sorted order moves one row at a time from the right
    child to the left child of its own leaf, so the level gain at every
    threshold is the running sum of those per-row score changes. Each leaf's
    running sums come from ``grouped``, making a level O(N) per feature.
    """
    n = len(features)
    leaf_at = np.repeat(np.arange(len(counts)), counts)
    start = _starts(counts)[leaf_at]
    last = start + counts[leaf_at] - 1
    best: tuple[int, float, float] | None = None
    for feature in range(features.shape[1]):
        column = order[:, feature]
        values = features[column, feature]
        distinct = values[:-1] < values[1:]
        if not distinct.any():
            continue
        rows = grouped[:, feature]
        grad, hess = g[rows], h[rows]
        grad_left = _running_within(grad, start)
        hess_left = _running_within(hess, start)
        grad_total = grad_left[last]
        hess_total = hess_left[last]
        after = _split_score(grad_left, hess_left, grad_total, hess_total, l2_reg)
        before = _split_score(
            grad_left - grad, hess_left - hess, grad_total, hess_total, l2_reg
        )
        change = np.empty(n)
        change[rows] = after - before
        gain = 0.5 * np.cumsum(change[column])[:-1]
        gain = np.where(distinct, gain, -np.inf)
        position = int(np.argmax(gain))
        if gain[position] > 0 and (best is None or gain[position] > best[2]):
            threshold = midpoint_thresholds(
                values[position : position + 1], values[position + 1 : position + 2]
            )
            best = (feature, float(threshold[0]), float(gain[position]))
    return best


def grow_oblivious_tree(
    features: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    max_depth: int,
    l2_reg: float,
    learning_rate: float = 1.0,
    order: np.ndarray | None = None,
) -> RegressionTree:
    """
    Grow a symmetric tree.

    At each level one (feature, threshold) is chosen, the one with the
    lowest total loss over all current leaves, and applied to every leaf.
    Growth stops early once no level split lowers the loss. The result has
    at most ``2 ** max_depth`` leaves.
    """
    n = len(features)
    if order is None:
        order = presort(features)
    leaf_of = np.zeros(n, dtype=np.int64)
    counts = np.array([n])
    grouped = order
    levels: list[tuple[int, float]] = []
    for _ in range(max_depth):
        split = _best_level_split(features, g, h, order, grouped, counts, l2_reg)
        if split is None:
            break
        feature, threshold, _ = split
        levels.append((feature, threshold))
        goes_right = features[:, feature] > threshold
        grouped = _regroup(grouped, counts, goes_right)
        leaf_of = leaf_of * 2 + goes_right
        counts = np.bincount(leaf_of, minlength=2 * len(counts))

    n_leaves = 2 ** len(levels)
    grad_sums = np.bincount(leaf_of, weights=g, minlength=n_leaves)
    hess_sums = np.bincount(leaf_of, weights=h, minlength=n_leaves)
    builder = TreeBuilder()

    def grow(node: int, level: int, prefix: int) -> None:
        if level == len(levels):
            builder.set_value(
                node,
                leaf_weight(grad_sums[prefix], hess_sums[prefix], l2_reg, learning_rate),
            )
            return
        feature, threshold = levels[level]
        left, right = builder.split_leaf(node, feature, threshold)
        grow(left, level + 1, prefix * 2)
        grow(right, level + 1, prefix * 2 + 1)

    grow(builder.add_leaf(0.0), 0, 0)
    return builder.build(n)
