import numpy as np
import pytest

from lccde_toolkit.learners.config import BoosterConfig
from lccde_toolkit.learners.growers import (
    grow_depthwise_tree,
    grow_leafwise_tree,
    grow_oblivious_tree,
)
from lccde_toolkit.learners.tree import presort


def _problem(seed: int, n: int = 60, n_features: int = 3):
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, n_features))
    target = (features[:, 0] > 0).astype(float) + 0.5 * (features[:, 1] > 0.5)
    g = rng.normal(scale=0.1, size=n) - target
    h = np.full(n, 0.25)
    return features, g, h


CONFIG = BoosterConfig(max_depth=3, max_leaves=5, min_child_hessian=0.0, learning_rate=1.0)


@pytest.mark.parametrize("seed", range(5))
def test_depthwise_respects_depth(seed):
    features, g, h = _problem(seed)
    tree = grow_depthwise_tree(features, g, h, CONFIG)
    assert tree.depth() <= CONFIG.max_depth
    assert tree.n_leaves <= 2**CONFIG.max_depth
    assert tree.sample_count == len(features)


@pytest.mark.parametrize("seed", range(5))
def test_leafwise_respects_leaf_and_depth_bounds(seed):
    features, g, h = _problem(seed)
    tree = grow_leafwise_tree(features, g, h, CONFIG)
    assert tree.n_leaves <= CONFIG.max_leaves
    assert tree.depth() <= CONFIG.max_depth


def test_leafwise_single_leaf_limit():
    features, g, h = _problem(0)
    tree = grow_leafwise_tree(features, g, h, CONFIG.with_overrides(max_leaves=1))
    assert tree.n_leaves == 1
    assert tree.predict(features[:1])[0] == pytest.approx(-g.sum() / (h.sum() + 1.0))


@pytest.mark.parametrize("seed", range(5))
def test_oblivious_trees_share_one_split_per_level(seed):
    features, g, h = _problem(seed)
    tree = grow_oblivious_tree(features, g, h, max_depth=3, l2_reg=1.0)
    levels = tree.levels()
    assert len(levels) <= 3
    assert all(len(level) == 1 for level in levels)
    assert tree.n_leaves == 2 ** len(levels)


def test_growers_stop_on_constant_features():
    features = np.ones((10, 2))
    g = np.linspace(-1, 1, 10)
    h = np.ones(10)
    assert grow_depthwise_tree(features, g, h, CONFIG).n_leaves == 1
    assert grow_leafwise_tree(features, g, h, CONFIG).n_leaves == 1
    assert grow_oblivious_tree(features, g, h, 3, 1.0).n_leaves == 1


def test_growers_agree_on_a_stump():
    features = np.array([[1.0], [2.0], [3.0], [4.0]])
    g = np.array([-1.0, -1.0, 1.0, 1.0])
    h = np.ones(4)
    config = CONFIG.with_overrides(max_depth=1)
    trees = [
        grow_depthwise_tree(features, g, h, config),
        grow_leafwise_tree(features, g, h, config),
        grow_oblivious_tree(features, g, h, 1, config.l2_reg),
    ]
    for tree in trees:
        assert tree.levels() == [{(0, 2.5)}]
        # −G/(H+λ) = 2/3 on the left, −2/3 on the right
        assert tree.predict(features).tolist() == pytest.approx([2 / 3, 2 / 3, -2 / 3, -2 / 3])


def _level_gain(features, g, h, leaf_of, feature, threshold, l2_reg=1.0):
    """Summed gain of one shared split, computed leaf by leaf."""

    def score(grad, hess):
        return grad * grad / (hess + l2_reg)

    goes_left = features[:, feature] <= threshold
    total = 0.0
    for leaf in np.unique(leaf_of):
        inside = leaf_of == leaf
        left, right = inside & goes_left, inside & ~goes_left
        total += (
            score(g[left].sum(), h[left].sum())
            + score(g[right].sum(), h[right].sum())
            - score(g[inside].sum(), h[inside].sum())
        )
    return 0.5 * total


def _scan_best_gain(features, g, h, leaf_of):
    best = 0.0
    for feature in range(features.shape[1]):
        values = np.unique(features[:, feature])
        for threshold in (values[:-1] + values[1:]) / 2:
            best = max(best, _level_gain(features, g, h, leaf_of, feature, threshold))
    return best


@pytest.mark.parametrize("seed", range(6))
def test_oblivious_levels_match_exhaustive_scan(seed):
    rng = np.random.default_rng(seed)
    features = rng.integers(0, 6, size=(40, 3)).astype(float)
    g = rng.normal(size=40)
    h = rng.uniform(0.1, 1.0, size=40)
    tree = grow_oblivious_tree(features, g, h, max_depth=3, l2_reg=1.0)
    leaf_of = np.zeros(40, dtype=np.int64)
    for level in tree.levels():
        ((feature, threshold),) = level
        chosen = _level_gain(features, g, h, leaf_of, feature, threshold)
        assert chosen == pytest.approx(_scan_best_gain(features, g, h, leaf_of), abs=1e-9)
        leaf_of = leaf_of * 2 + (features[:, feature] > threshold)
    if len(tree.levels()) < 3:
        assert _scan_best_gain(features, g, h, leaf_of) <= 1e-9


def test_oblivious_splits_where_the_class_flips():
    features = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    # class-0 gradients at uniform scores: p − y = −0.5 below zero, +0.5 above
    g = np.array([-0.5, -0.5, 0.5, 0.5])
    h = np.full(4, 0.25)
    tree = grow_oblivious_tree(features, g, h, max_depth=1, l2_reg=1.0)
    ((feature, threshold),) = tree.levels()[0]
    candidates = [-1.5, 0.0, 1.5]
    gains = [_level_gain(features, g, h, np.zeros(4, dtype=int), 0, t) for t in candidates]
    assert threshold == candidates[int(np.argmax(gains))]
    assert -1.0 < threshold < 1.0


def test_oblivious_zero_gradient_gives_one_zero_leaf():
    rng = np.random.default_rng(0)
    features = rng.normal(size=(30, 2))
    tree = grow_oblivious_tree(features, np.zeros(30), np.full(30, 0.25), 4, 1.0)
    assert tree.n_leaves == 1
    assert tree.value.tolist() == [0.0]


@pytest.mark.parametrize("seed", range(3))
def test_growers_accept_a_shared_presort(seed):
    features, g, h = _problem(seed)
    order = presort(features)
    assert grow_depthwise_tree(features, g, h, CONFIG).same_structure(
        grow_depthwise_tree(features, g, h, CONFIG, order)
    )
    assert grow_leafwise_tree(features, g, h, CONFIG).same_structure(
        grow_leafwise_tree(features, g, h, CONFIG, order)
    )
    assert grow_oblivious_tree(features, g, h, 3, 1.0).same_structure(
        grow_oblivious_tree(features, g, h, 3, 1.0, order=order)
    )
