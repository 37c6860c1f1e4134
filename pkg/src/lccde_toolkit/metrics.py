"""
Confusion matrices and the precision / recall / F1 measures derived from them
"""

from typing import NamedTuple

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support
from typing_extensions import override

from .exceptions import EmptyConfusionError, LengthMismatchError


class ConfusionMatrix:
    """Counts indexed [true class, predicted class]."""

    counts: np.ndarray

    def __init__(self, counts):
        counts = np.array(counts, dtype=np.int64, copy=True)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion counts must be square, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        counts.flags.writeable = False
        self.counts = counts

    @property
    def n_classes(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @override
    def __eq__(self, other) -> bool:
        if isinstance(other, ConfusionMatrix):
            return np.array_equal(self.counts, other.counts)
        return np.array_equal(self.counts, np.asarray(other))

    @override
    def __hash__(self) -> int:
        return hash(self.counts.tobytes())

    @override
    def __repr__(self) -> str:
        return f"ConfusionMatrix({self.counts.tolist()})"


class ClassMetrics(NamedTuple):
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray


class AggregateMetrics(NamedTuple):
    accuracy: float
    precision: float
    recall: float
    f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float


def confusion(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64).reshape(-1)
    y_pred = np.asarray(y_pred, dtype=np.int64).reshape(-1)
    if len(y_true) != len(y_pred):
        raise LengthMismatchError(
            left_name="y_true", left=len(y_true), right_name="y_pred", right=len(y_pred)
        )
    for name, values in (("y_true", y_true), ("y_pred", y_pred)):
        if len(values) and (values.min() < 0 or values.max() >= n_classes):
            raise ValueError(f"{name} holds class ids outside [0, {n_classes})")
    if len(y_true) == 0:
        return ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64))
    return ConfusionMatrix(
        confusion_matrix(y_true, y_pred, labels=np.arange(n_classes))
    )


def per_class_metrics(matrix: ConfusionMatrix) -> ClassMetrics:
    """
    Precision, recall and F1 for every class.

    Undefined ratios (zero denominators) are reported as 0.
    """
    counts = matrix.counts
    n_classes = matrix.n_classes
    support = counts.sum(axis=1)
    if matrix.total == 0:
        zeros = np.zeros(n_classes)
        return ClassMetrics(zeros, zeros.copy(), zeros.copy(), support)
    # one weighted (true, predicted) pair per cell stands in for the samples
    true_ids, predicted_ids = np.indices(counts.shape)
    precision, recall, f1, _ = precision_recall_fscore_support(
        true_ids.ravel(),
        predicted_ids.ravel(),
        labels=np.arange(n_classes),
        sample_weight=counts.ravel(),
        average=None,
        zero_division=0,
    )
    return ClassMetrics(
        np.asarray(precision, dtype=np.float64),
        np.asarray(recall, dtype=np.float64),
        np.asarray(f1, dtype=np.float64),
        support,
    )


def aggregate_metrics(matrix: ConfusionMatrix) -> AggregateMetrics:
    """
    Accuracy, support-weighted precision/recall/F1 and macro averages.

    Raises:
        EmptyConfusionError: the matrix counts no samples
    """
    total = matrix.total
    if total == 0:
        raise EmptyConfusionError(n_classes=matrix.n_classes)
    metrics = per_class_metrics(matrix)
    weights = metrics.support / total
    return AggregateMetrics(
        accuracy=float(np.trace(matrix.counts) / total),
        precision=float(np.dot(weights, metrics.precision)),
        recall=float(np.dot(weights, metrics.recall)),
        f1=float(np.dot(weights, metrics.f1)),
        macro_precision=float(metrics.precision.mean()),
        macro_recall=float(metrics.recall.mean()),
        macro_f1=float(metrics.f1.mean()),
    )
