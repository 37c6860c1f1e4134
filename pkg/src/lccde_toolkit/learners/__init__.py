from .booster import (
    TrainedForest,
    fit,
    predict_proba,
    predict_proba_matrix,
    raw_scores,
    staged_log_loss,
)
from .config import VARIANT_ORDER, BoosterConfig, Variant, default_configs
from .growers import grow_depthwise_tree, grow_leafwise_tree, grow_oblivious_tree
from .sampling import GossSample, goss_sample
from .tree import (
    FeatureSplit,
    GradientPairs,
    RegressionTree,
    Split,
    find_best_split,
    leaf_weight,
    softmax_gradients,
)

__all__ = [
    "BoosterConfig",
    "FeatureSplit",
    "GossSample",
    "GradientPairs",
    "RegressionTree",
    "Split",
    "TrainedForest",
    "VARIANT_ORDER",
    "Variant",
    "default_configs",
    "find_best_split",
    "fit",
    "goss_sample",
    "grow_depthwise_tree",
    "grow_leafwise_tree",
    "grow_oblivious_tree",
    "leaf_weight",
    "predict_proba",
    "predict_proba_matrix",
    "raw_scores",
    "softmax_gradients",
    "staged_log_loss",
]
