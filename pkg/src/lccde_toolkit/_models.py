from typing import TypedDict


class TreeJSON(TypedDict):
    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    leaf_weight: list[float]
    sample_count: int


class ForestJSON(TypedDict):
    variant: str
    config: dict[str, int | float]
    base_score: list[float]
    n_features: int
    fit_seconds: float
    trees: list[list[TreeJSON]]
    """trees[round][class]"""


class SelectionJSON(TypedDict):
    f1: list[list[float]]
    fit_seconds: list[float]
    folds: int
    seed: int
    warnings: list[str]


class ModelJSON(TypedDict):
    class_names: list[str]
    feature_names: list[str]
    leader_map: list[int]
    selection: SelectionJSON
    forests: list[ForestJSON]


class ModelFileJSON(TypedDict):
    format_version: int
    sha256: str
    model: ModelJSON
