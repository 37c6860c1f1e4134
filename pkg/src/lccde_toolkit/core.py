"""
Domain types shared across the toolkit: datasets, per-model predictions
and the class → leader-model map.
"""

from collections.abc import Iterator, Sequence
from typing import NamedTuple, NewType

import numpy as np
from typing_extensions import override

ClassId = NewType("ClassId", int)
ModelIndex = NewType("ModelIndex", int)

MODEL_COUNT = 3
"""Number of base learners in every ensemble."""

PROBABILITY_TOLERANCE = 1e-6

_MAX_REPORTED_CELLS = 20


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class Dataset:
    """
    Rectangular numeric feature matrix with dense integer class labels.

    Labels index into ``class_names``. An unlabeled dataset (``labels`` is
    None) is only usable for prediction.
    """

    features: np.ndarray
    labels: np.ndarray | None
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __init__(
        self,
        features,
        labels,
        feature_names: Sequence[str] | None = None,
        class_names: Sequence[str] = (),
    ):
        """
        Args:
            features: N×F matrix of reals
            labels: length-N integer class ids, or None for unlabeled data
            feature_names: F column names, defaults to f0..f{F-1}
            class_names: n class names; label ``c`` names ``class_names[c]``
        """
        features = np.array(features, dtype=np.float64, copy=True)
        if features.ndim == 1 and features.size == 0:
            features = features.reshape(0, len(feature_names or ()))
        self.features = _frozen(features)
        if labels is None:
            self.labels = None
        else:
            self.labels = _frozen(np.array(labels, dtype=np.int64, copy=True).reshape(-1))
        if feature_names is None:
            width = features.shape[1] if features.ndim == 2 else 0
            feature_names = [f"f{index}" for index in range(width)]
        self.feature_names = tuple(str(name) for name in feature_names)
        self.class_names = tuple(str(name) for name in class_names)

    @property
    def n_samples(self) -> int:
        return int(self.features.shape[0]) if self.features.ndim >= 1 else 0

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1]) if self.features.ndim == 2 else 0

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def subset(self, indices) -> "Dataset":
        """Rows at ``indices`` (in the given order), sharing names."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[indices],
            None if self.labels is None else self.labels[indices],
            self.feature_names,
            self.class_names,
        )

    def class_counts(self) -> np.ndarray:
        if self.labels is None:
            return np.zeros(self.n_classes, dtype=np.int64)
        return np.bincount(self.labels, minlength=self.n_classes)

    @override
    def __repr__(self) -> str:
        return (
            f"Dataset(n_samples={self.n_samples}, n_features={self.n_features}, "
            f"classes={list(self.class_names)})"
        )

    def __len__(self) -> int:
        return self.n_samples


def validate_dataset(dataset: Dataset) -> list[str]:
    """
    Describe every violated Dataset invariant.

    Returns an empty list for a well-formed dataset. Non-finite cells and
    out-of-range labels are reported with their row/column coordinates.
    """
    violations: list[str] = []
    features = dataset.features
    if features.ndim != 2:
        violations.append(
            f"features must be a 2-dimensional matrix, got {features.ndim} dimensions"
        )
        return violations

    n_rows, n_columns = features.shape
    if n_rows < 1:
        violations.append("dataset has no rows")
    if len(dataset.feature_names) != n_columns:
        violations.append(
            f"{len(dataset.feature_names)} feature names for {n_columns} columns"
        )

    bad_rows, bad_columns = np.nonzero(~np.isfinite(features))
    for row, column in list(zip(bad_rows, bad_columns))[:_MAX_REPORTED_CELLS]:
        violations.append(
            f"non-finite value {features[row, column]!r} at row {row}, column {column}"
        )
    if len(bad_rows) > _MAX_REPORTED_CELLS:
        violations.append(
            f"{len(bad_rows) - _MAX_REPORTED_CELLS} further non-finite cells not listed"
        )

    n_classes = dataset.n_classes
    if n_classes < 2:
        violations.append(f"at least 2 classes are required, got {n_classes}")
    if any(not name for name in dataset.class_names):
        violations.append("class names must be non-empty")
    if len(set(dataset.class_names)) != n_classes:
        duplicates = sorted(
            {name for name in dataset.class_names if dataset.class_names.count(name) > 1}
        )
        violations.append(f"duplicate class names: {duplicates}")

    labels = dataset.labels
    if labels is None:
        violations.append("dataset is unlabeled")
        return violations
    if len(labels) != n_rows:
        violations.append(f"{len(labels)} labels for {n_rows} rows")
        return violations
    out_of_range = np.nonzero((labels < 0) | (labels >= n_classes))[0]
    for row in out_of_range[:_MAX_REPORTED_CELLS]:
        violations.append(
            f"label {int(labels[row])} at row {row} is outside [0, {n_classes})"
        )
    if len(out_of_range) > _MAX_REPORTED_CELLS:
        violations.append(
            f"{len(out_of_range) - _MAX_REPORTED_CELLS} further out-of-range labels not listed"
        )
    return violations


class Prediction(NamedTuple):
    """Predicted class, its confidence and the full class-probability vector."""

    class_id: int
    confidence: float
    probabilities: tuple[float, ...]

    @classmethod
    def from_probabilities(cls, probabilities: Sequence[float]) -> "Prediction":
        """Build a prediction whose class is the argmax (lowest index on ties)."""
        values = tuple(float(value) for value in probabilities)
        class_id = int(np.argmax(values))
        return cls(class_id, values[class_id], values)


class LeaderMap:
    """Total mapping from class id to the index of its leader model."""

    leaders: tuple[int, ...]

    def __init__(self, leaders: Sequence[int]):
        leaders = tuple(int(leader) for leader in leaders)
        for class_id, leader in enumerate(leaders):
            if not 0 <= leader < MODEL_COUNT:
                raise ValueError(
                    f"leader {leader} for class {class_id} is not a model index "
                    f"in [0, {MODEL_COUNT})"
                )
        self.leaders = leaders

    def __getitem__(self, class_id: int) -> int:
        return self.leaders[class_id]

    def __len__(self) -> int:
        return len(self.leaders)

    def __iter__(self) -> Iterator[int]:
        return iter(self.leaders)

    @override
    def __eq__(self, other) -> bool:
        if isinstance(other, LeaderMap):
            return self.leaders == other.leaders
        if isinstance(other, (list, tuple)):
            return self.leaders == tuple(other)
        return False

    @override
    def __hash__(self) -> int:
        return hash(self.leaders)

    @override
    def __repr__(self) -> str:
        return f"LeaderMap({list(self.leaders)})"
