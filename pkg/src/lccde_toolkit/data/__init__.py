from .splits import (
    FoldPlan,
    HoldoutSplit,
    holdout_split,
    stratified_kfold,
    stratified_subsample,
)
from .transformers import chunked, encode_first_appearance, remap_codes

__all__ = [
    "FoldPlan",
    "HoldoutSplit",
    "chunked",
    "encode_first_appearance",
    "holdout_split",
    "remap_codes",
    "stratified_kfold",
    "stratified_subsample",
]
