"""Plain-text report tables for the command line"""

from collections.abc import Mapping, Sequence

from .ensemble import EvaluationReport, LccdeModel
from .learners.config import VARIANT_ORDER
from .metrics import AggregateMetrics, ClassMetrics, ConfusionMatrix

SCORE_FORMAT = "{:.6f}"


def format_score(value: float) -> str:
    return SCORE_FORMAT.format(value)


def format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Left-aligned first column, right-aligned remaining columns."""
    cells = [[str(header) for header in headers]] + [
        [str(cell) for cell in row] for row in rows
    ]
    widths = [max(len(row[column]) for row in cells) for column in range(len(headers))]

    def line(row: list[str]) -> str:
        first, *rest = row
        parts = [first.ljust(widths[0])]
        parts += [cell.rjust(width) for cell, width in zip(rest, widths[1:])]
        return "  ".join(parts).rstrip()

    rule = "  ".join("-" * width for width in widths)
    return "\n".join([line(cells[0]), rule] + [line(row) for row in cells[1:]])


def format_leader_table(model: LccdeModel) -> str:
    variants = [variant.value for variant in VARIANT_ORDER]
    rows = [
        [name, variants[model.leader_map[class_id]]]
        + [format_score(row[class_id]) for row in model.evidence.f1]
        for class_id, name in enumerate(model.class_names)
    ]
    table = format_table(
        ["class", "leader"] + [f"f1 {variant}" for variant in variants], rows
    )
    timings = ", ".join(
        f"{variant} {seconds:.3f}s"
        for variant, seconds in zip(variants, model.evidence.fit_seconds)
    )
    return f"{table}\n\ncross-validation training time: {timings}"


def format_class_metrics(class_names: Sequence[str], metrics: ClassMetrics) -> str:
    rows = [
        [
            name,
            format_score(metrics.precision[class_id]),
            format_score(metrics.recall[class_id]),
            format_score(metrics.f1[class_id]),
            int(metrics.support[class_id]),
        ]
        for class_id, name in enumerate(class_names)
    ]
    return format_table(["class", "precision", "recall", "f1", "support"], rows)


def format_confusion(class_names: Sequence[str], matrix: ConfusionMatrix) -> str:
    """Rows are true classes, columns predicted classes."""
    rows = [
        [name] + [int(count) for count in matrix.counts[class_id]]
        for class_id, name in enumerate(class_names)
    ]
    return format_table(["true \\ predicted"] + list(class_names), rows)


def format_aggregates(aggregates: AggregateMetrics) -> str:
    return "\n".join(
        f"{label}: {format_score(value)}"
        for label, value in (
            ("accuracy", aggregates.accuracy),
            ("weighted precision", aggregates.precision),
            ("weighted recall", aggregates.recall),
            ("weighted f1", aggregates.f1),
            ("macro precision", aggregates.macro_precision),
            ("macro recall", aggregates.macro_recall),
            ("macro f1", aggregates.macro_f1),
        )
    )


def format_comparison(report: EvaluationReport, class_names: Sequence[str]) -> str:
    """Base learners side by side with the ensemble."""
    overall = format_table(
        ["model", "accuracy", "precision", "recall", "f1", "macro f1"],
        [
            [
                name,
                format_score(aggregate.accuracy),
                format_score(aggregate.precision),
                format_score(aggregate.recall),
                format_score(aggregate.f1),
                format_score(aggregate.macro_f1),
            ]
            for name, aggregate in zip(report.model_names, report.aggregates)
        ],
    )
    per_class = format_table(
        ["class"] + [f"f1 {name}" for name in report.model_names],
        [
            [name]
            + [format_score(metrics.f1[class_id]) for metrics in report.class_metrics]
            for class_id, name in enumerate(class_names)
        ],
    )
    return f"{overall}\n\n{per_class}"


def format_branch_histogram(counts: Mapping[str, int]) -> str:
    return format_table(["branch", "samples"], list(counts.items()))


def format_evaluation(report: EvaluationReport, class_names: Sequence[str]) -> str:
    ensemble = report.ensemble_index
    sections = [
        format_class_metrics(class_names, report.class_metrics[ensemble]),
        format_confusion(class_names, report.confusions[ensemble]),
        format_aggregates(report.aggregates[ensemble]),
        f"prediction time: {report.predict_seconds:.3f}s",
        format_comparison(report, class_names),
        format_branch_histogram(report.branch_counts),
    ]
    return "\n\n".join(sections)
