"""
Leader-class and confidence-decision ensemble.

Training cross-validates three boosted forests, picks a leader model per
class from the out-of-fold F1 scores and refits every forest on the full
training set. Prediction runs all three forests and arbitrates between
them using the leader map and the per-model confidences.
"""

import time
from collections import Counter
from collections.abc import Callable, Sequence
from enum import Enum
from typing import NamedTuple

import numpy as np
from typing_extensions import override

from .async_utils import run_blocking, run_concurrently
from .core import MODEL_COUNT, Dataset, LeaderMap, Prediction
from .data.splits import FoldPlan, stratified_kfold
from .data.transformers import chunked
from .exceptions import ConfigurationError, FeatureDimensionError
from .learners.booster import (
    TrainedForest,
    check_trainable,
    fit,
    predict_proba_matrix,
)
from .learners.config import VARIANT_ORDER, BoosterConfig
from .logger import getLogger
from .metrics import (
    AggregateMetrics,
    ClassMetrics,
    ConfusionMatrix,
    aggregate_metrics,
    confusion,
    per_class_metrics,
)

LOGGER = getLogger("ensemble")

F1_TIE_TOLERANCE = 1e-6
DEFAULT_CHUNK_SIZE = 4096

Clock = Callable[[], float]


class LeaderSelectionEvidence(NamedTuple):
    """
    Per-class cross-validated F1 of every model and its training time.

    ``f1[j][c]`` is the F1 of model j on class c; ``fit_seconds[j]`` is the
    total cross-validation training wall time of model j.
    Timings must not be negative; zero is accepted, as produced by an
    injected clock that never advances.
    """

    f1: tuple[tuple[float, ...], ...]
    fit_seconds: tuple[float, ...]

    @classmethod
    def build(cls, f1, fit_seconds) -> "LeaderSelectionEvidence":
        matrix = np.asarray(f1, dtype=np.float64)
        seconds = np.asarray(fit_seconds, dtype=np.float64).reshape(-1)
        if matrix.ndim != 2 or matrix.shape[0] != MODEL_COUNT:
            raise ConfigurationError(
                reason=f"F1 evidence must be {MODEL_COUNT}×n, got shape {matrix.shape}"
            )
        if len(seconds) != MODEL_COUNT:
            raise ConfigurationError(
                reason=f"need {MODEL_COUNT} timings, got {len(seconds)}"
            )
        if (seconds < 0).any():
            raise ConfigurationError(reason="fit_seconds must not be negative")
        if ((matrix < 0) | (matrix > 1)).any():
            raise ConfigurationError(reason="F1 scores must lie in [0, 1]")
        return cls(
            tuple(tuple(float(value) for value in row) for row in matrix),
            tuple(float(value) for value in seconds),
        )

    @property
    def n_classes(self) -> int:
        return len(self.f1[0])


class ArbitrationBranch(str, Enum):
    UNANIMOUS = "unanimous"
    ALL_DIFFERENT_SINGLE_MATCH = "all_different_single_match"
    ALL_DIFFERENT_CONFIDENCE = "all_different_confidence"
    TWO_AGREE = "two_agree"


class ArbitrationTrace(NamedTuple):
    """Which decision path produced a final class, for auditing."""

    branch: ArbitrationBranch
    model_classes: tuple[int, ...]
    matched_models: tuple[int, ...]
    chosen_model: int | None
    final_class: int


class LccdeModel:
    """
    Three trained forests plus the class → leader-model map and the
    evidence the map was selected from.
    """

    forests: tuple[TrainedForest, ...]
    leader_map: LeaderMap
    class_names: tuple[str, ...]
    feature_names: tuple[str, ...]
    evidence: LeaderSelectionEvidence
    folds: int
    seed: int
    warnings: tuple[str, ...]

    def __init__(
        self,
        forests: Sequence[TrainedForest],
        leader_map: LeaderMap,
        class_names: Sequence[str],
        evidence: LeaderSelectionEvidence,
        feature_names: Sequence[str] = (),
        folds: int = 0,
        seed: int = 0,
        warnings: Sequence[str] = (),
    ):
        forests = tuple(forests)
        if len(forests) != MODEL_COUNT:
            raise ValueError(f"an LCCDE model needs {MODEL_COUNT} forests, got {len(forests)}")
        widths = {forest.n_features for forest in forests}
        classes = {forest.n_classes for forest in forests}
        if len(widths) != 1 or len(classes) != 1:
            raise ValueError("all forests must share feature and class counts")
        if len(leader_map) != len(class_names) or classes != {len(class_names)}:
            raise ValueError("leader map, forests and class names disagree on class count")
        self.forests = forests
        self.leader_map = leader_map
        self.class_names = tuple(class_names)
        self.feature_names = tuple(feature_names)
        self.evidence = evidence
        self.folds = int(folds)
        self.seed = int(seed)
        self.warnings = tuple(warnings)

    @property
    def n_features(self) -> int:
        return self.forests[0].n_features

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def configs(self) -> tuple[BoosterConfig, ...]:
        return tuple(forest.config for forest in self.forests)

    @override
    def __repr__(self) -> str:
        return (
            f"LccdeModel(classes={list(self.class_names)}, "
            f"leaders={list(self.leader_map)}, features={self.n_features})"
        )


def select_leaders(
    evidence: LeaderSelectionEvidence, tolerance: float = F1_TIE_TOLERANCE
) -> LeaderMap:
    """
    Pick the leader model of every class.

    The leader is the model with the highest F1 for the class. Models within
    ``tolerance`` of the best count as tied; ties go to the fastest model,
    then to the lowest model index.
    """
    f1 = np.asarray(evidence.f1, dtype=np.float64)
    seconds = evidence.fit_seconds
    leaders = []
    for class_id in range(f1.shape[1]):
        column = f1[:, class_id]
        best = column.max()
        tied = [model for model in range(MODEL_COUNT) if best - column[model] <= tolerance]
        leaders.append(min(tied, key=lambda model: (seconds[model], model)))
    return LeaderMap(leaders)


def arbitrate(
    predictions: Sequence[Prediction], leader_map: LeaderMap
) -> tuple[Prediction, ArbitrationTrace]:
    """
    Combine the three base predictions of one sample.

    * all three agree: that class, reported with the agreed class's leader
    * all three differ: a model "matches" when it leads the class it
      predicted. A single match decides. Otherwise the highest confidence
      among the matches (or among all three when nothing matches) decides;
      on equal confidences the first model in index order holding that
      maximum wins.
    * exactly two agree: the leader model of the majority class decides
      with its own predicted class, which may differ from the majority.

    The returned Prediction is the deciding model's prediction.
    """
    if len(predictions) != MODEL_COUNT:
        raise ValueError(f"expected {MODEL_COUNT} predictions, got {len(predictions)}")
    classes = tuple(prediction.class_id for prediction in predictions)
    first, second, third = classes

    if first == second == third:
        leader = leader_map[first]
        trace = ArbitrationTrace(ArbitrationBranch.UNANIMOUS, classes, (), None, first)
        return predictions[leader], trace

    if len(set(classes)) == MODEL_COUNT:
        matched = tuple(
            model for model in range(MODEL_COUNT) if leader_map[classes[model]] == model
        )
        if len(matched) == 1:
            chosen = matched[0]
            branch = ArbitrationBranch.ALL_DIFFERENT_SINGLE_MATCH
        else:
            pool = matched or tuple(range(MODEL_COUNT))
            highest = max(predictions[model].confidence for model in pool)
            chosen = next(
                model
                for model in range(MODEL_COUNT)
                if predictions[model].confidence == highest
            )
            branch = ArbitrationBranch.ALL_DIFFERENT_CONFIDENCE
        trace = ArbitrationTrace(branch, classes, matched, chosen, classes[chosen])
        return predictions[chosen], trace

    majority = first if first in (second, third) else second
    leader = leader_map[majority]
    trace = ArbitrationTrace(
        ArbitrationBranch.TWO_AGREE, classes, (), leader, classes[leader]
    )
    return predictions[leader], trace


def _predict_rows(
    model: LccdeModel, features: np.ndarray
) -> list[tuple[Prediction, ArbitrationTrace]]:
    probabilities = [predict_proba_matrix(forest, features) for forest in model.forests]
    results = []
    for row in range(len(features)):
        predictions = [
            Prediction.from_probabilities(model_probabilities[row])
            for model_probabilities in probabilities
        ]
        results.append(arbitrate(predictions, model.leader_map))
    return results


def _check_width(model: LccdeModel, features: np.ndarray) -> None:
    if features.ndim != 2 or features.shape[1] != model.n_features:
        actual = features.shape[1] if features.ndim == 2 else features.size
        raise FeatureDimensionError(expected=model.n_features, actual=actual)


def predict_sample(model: LccdeModel, row) -> tuple[Prediction, ArbitrationTrace]:
    """
    Predict one feature row with all three forests and arbitrate.

    Raises:
        FeatureDimensionError: the row length differs from the training width
    """
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise FeatureDimensionError(expected=model.n_features, actual=row.size)
    features = row[None, :]
    _check_width(model, features)
    return _predict_rows(model, features)[0]


def _batch_jobs(model: LccdeModel, dataset: Dataset, chunk_size: int):
    features = dataset.features
    if dataset.n_samples == 0:
        return []
    _check_width(model, features)
    return [
        lambda rows=rows: _predict_rows(model, features[rows])
        for rows in chunked(range(dataset.n_samples), chunk_size)
    ]


def predict_batch_traced(
    model: LccdeModel,
    dataset: Dataset,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[tuple[Prediction, ArbitrationTrace]]:
    """Predictions and traces for every row, in row order."""
    chunks = run_blocking(workers, _batch_jobs(model, dataset, chunk_size))
    return [result for chunk in chunks for result in chunk]


def predict_batch(
    model: LccdeModel,
    dataset: Dataset,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[Prediction]:
    """
    Predict every row of a dataset.

    Element i equals ``predict_sample(model, row i)``. With ``workers > 1``
    row chunks are predicted in worker threads; the output is identical.
    """
    return [
        prediction
        for prediction, _ in predict_batch_traced(
            model, dataset, workers=workers, chunk_size=chunk_size
        )
    ]


async def predict_batch_async(
    model: LccdeModel,
    dataset: Dataset,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[Prediction]:
    jobs = _batch_jobs(model, dataset, chunk_size)
    chunks = await run_concurrently(max(workers, 1), jobs)
    return [prediction for chunk in chunks for prediction, _ in chunk]


class _VariantResult(NamedTuple):
    out_of_fold: np.ndarray
    cv_seconds: float
    forest: TrainedForest
    notes: tuple[str, ...] = ()


def _variant_job(
    model_index: int,
    config: BoosterConfig,
    dataset: Dataset,
    plan: FoldPlan,
    clock: Clock,
) -> Callable[[], _VariantResult]:
    variant = VARIANT_ORDER[model_index]

    def run() -> _VariantResult:
        out_of_fold = np.zeros(dataset.n_samples, dtype=np.int64)
        cv_seconds = 0.0
        notes = []
        for fold, (train_rows, test_rows) in enumerate(plan.splits()):
            LOGGER.info("Cross-validating %s: fold %d/%d", variant.value, fold + 1, plan.k)
            present = np.unique(dataset.labels[train_rows])
            if len(present) == 1:
                # nothing to boost, the fold votes for its only class
                only = int(present[0])
                out_of_fold[test_rows] = only
                notes.append(
                    f"fold {fold + 1} trains on class "
                    f"{dataset.class_names[only]!r} only, predicted it for held-out rows"
                )
                LOGGER.warning("%s: %s", variant.value, notes[-1])
                continue
            forest = fit(config, variant, dataset.subset(train_rows), clock=clock)
            cv_seconds += forest.fit_seconds
            if len(test_rows):
                out_of_fold[test_rows] = predict_proba_matrix(
                    forest, dataset.features[test_rows]
                ).argmax(axis=1)
        LOGGER.info("Refitting %s on all %d rows", variant.value, dataset.n_samples)
        return _VariantResult(
            out_of_fold,
            cv_seconds,
            fit(config, variant, dataset, clock=clock),
            tuple(notes),
        )

    return run


def _prepare(
    dataset: Dataset,
    configs: Sequence[BoosterConfig | dict | None] | None,
    folds: int,
    seed: int,
    clock: Clock,
):
    if folds < 2:
        raise ConfigurationError(reason=f"folds must be at least 2, got {folds}")
    if configs is None:
        configs = [None] * MODEL_COUNT
    if len(configs) != MODEL_COUNT:
        raise ConfigurationError(
            reason=f"need {MODEL_COUNT} booster configs, got {len(configs)}"
        )
    configs = [BoosterConfig.lazy_build(config) for config in configs]
    if dataset.labels is None:
        raise ConfigurationError(reason="training needs a labeled dataset")
    check_trainable(dataset)
    plan = stratified_kfold(dataset.labels, folds, seed)
    jobs = [
        _variant_job(model_index, config, dataset, plan, clock)
        for model_index, config in enumerate(configs)
    ]
    return plan, jobs


def _assemble(
    dataset: Dataset,
    plan: FoldPlan,
    results: Sequence[_VariantResult],
    folds: int,
    seed: int,
) -> LccdeModel:
    n_classes = dataset.n_classes
    f1 = [
        per_class_metrics(confusion(dataset.labels, result.out_of_fold, n_classes)).f1
        for result in results
    ]
    evidence = LeaderSelectionEvidence.build(
        f1, [result.cv_seconds for result in results]
    )
    leader_map = select_leaders(evidence)
    counts = dataset.class_counts()
    warnings = tuple(
        f"class {dataset.class_names[class_id]!r} has {counts[class_id]} samples, "
        f"fewer than {folds} folds"
        for class_id in plan.sparse_classes
    )
    # variants share the fold plan
    notes = (note for result in results for note in result.notes)
    warnings += tuple(dict.fromkeys(notes))
    for class_id, leader in enumerate(leader_map):
        LOGGER.info(
            "Leader of class %r: %s (F1 %s)",
            dataset.class_names[class_id],
            VARIANT_ORDER[leader].value,
            ", ".join(f"{row[class_id]:.6f}" for row in evidence.f1),
        )
    return LccdeModel(
        [result.forest for result in results],
        leader_map,
        dataset.class_names,
        evidence,
        feature_names=dataset.feature_names,
        folds=folds,
        seed=seed,
        warnings=warnings,
    )


def train_lccde(
    dataset: Dataset,
    configs: Sequence[BoosterConfig | dict | None] | None = None,
    folds: int = 5,
    seed: int = 0,
    *,
    concurrency: int = 1,
    clock: Clock = time.perf_counter,
) -> LccdeModel:
    """
    Train the three base forests and select a leader model per class.

    1. stratified ``folds``-fold cross-validation of every variant, pooling
       the out-of-fold predictions of each model
    2. per-class F1 of the pooled predictions plus total CV training time
       form the selection evidence
    3. ``select_leaders`` picks the leader of every class
    4. every variant is refit on the full dataset

    Args:
        dataset: labeled training data
        configs: one BoosterConfig (or mapping, or None for defaults) per
            model index
        folds: number of cross-validation folds, at least 2
        seed: seed of the fold plan
        concurrency: how many variants train at the same time
        clock: wall-clock source used for the timing evidence

    Raises:
        ConfigurationError: bad fold count or configs
        InvalidDatasetError, DegenerateLabelsError: untrainable data
    """
    plan, jobs = _prepare(dataset, configs, folds, seed, clock)
    results = run_blocking(concurrency, jobs)
    return _assemble(dataset, plan, results, folds, seed)


async def train_lccde_async(
    dataset: Dataset,
    configs: Sequence[BoosterConfig | dict | None] | None = None,
    folds: int = 5,
    seed: int = 0,
    *,
    concurrency: int = MODEL_COUNT,
    clock: Clock = time.perf_counter,
) -> LccdeModel:
    plan, jobs = _prepare(dataset, configs, folds, seed, clock)
    results = await run_concurrently(max(concurrency, 1), jobs)
    return _assemble(dataset, plan, results, folds, seed)


class EvaluationReport(NamedTuple):
    """Side-by-side evaluation of every base model and the ensemble."""

    model_names: tuple[str, ...]
    confusions: tuple[ConfusionMatrix, ...]
    class_metrics: tuple[ClassMetrics, ...]
    aggregates: tuple[AggregateMetrics, ...]
    predict_seconds: float
    branch_counts: dict[str, int]

    @property
    def ensemble_index(self) -> int:
        return len(self.model_names) - 1


def evaluate_model(
    model: LccdeModel, dataset: Dataset, *, workers: int = 1
) -> EvaluationReport:
    """
    Evaluate the ensemble and each of its base models on labeled data.

    ``dataset`` must already use the model's class encoding (see
    ``relabel_to_reference``).
    """
    if dataset.labels is None:
        raise ConfigurationError(reason="evaluation needs a labeled dataset")
    started = time.perf_counter()
    traced = predict_batch_traced(model, dataset, workers=workers)
    predict_seconds = time.perf_counter() - started

    n_classes = model.n_classes
    predicted = [
        [trace.model_classes[index] for _, trace in traced] for index in range(MODEL_COUNT)
    ]
    predicted.append([prediction.class_id for prediction, _ in traced])
    confusions = tuple(
        confusion(dataset.labels, classes, n_classes) for classes in predicted
    )
    branch_counts = Counter(trace.branch.value for _, trace in traced)
    return EvaluationReport(
        model_names=tuple(variant.value for variant in VARIANT_ORDER) + ("lccde",),
        confusions=confusions,
        class_metrics=tuple(per_class_metrics(matrix) for matrix in confusions),
        aggregates=tuple(aggregate_metrics(matrix) for matrix in confusions),
        predict_seconds=predict_seconds,
        branch_counts={
            branch.value: branch_counts.get(branch.value, 0) for branch in ArbitrationBranch
        },
    )
