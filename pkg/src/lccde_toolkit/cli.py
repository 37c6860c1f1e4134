"""
``lccde`` command line: train, evaluate, predict and split.

Exit codes: 0 success, 2 bad flags, 3 input errors (ingest, model file,
unknown class, feature count), 4 training errors.
"""

import argparse
import sys
from collections.abc import Sequence

import pandas as pd

from .core import Dataset
from .data.splits import holdout_split
from .ensemble import evaluate_model, predict_batch_traced, train_lccde
from .exceptions import (
    EXIT_USAGE,
    ConfigurationError,
    LccdeError,
    MissingLabelColumnError,
    exit_code_for,
)
from .formatting import format_evaluation, format_leader_table
from .io.file import (
    CICIDS2017_CLASS_GROUPS,
    load_can_hex_csv,
    load_numeric_csv,
    map_class_names,
    relabel_to_reference,
    to_numeric_csv,
)
from .io.model_file import load_model, save_model
from .learners.config import VARIANT_ORDER, BoosterConfig
from .logger import configure_cli_logging, getLogger

LOGGER = getLogger("cli")

FORMATS = ("can-hex", "numeric-csv")
LABEL_GROUPS = {"cicids2017": CICIDS2017_CLASS_GROUPS}
_ALL_VARIANTS = "all"


def _int_at_least(minimum: int):
    def parse(raw: str) -> int:
        try:
            value = int(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {value}")
        return value

    return parse


def _fraction(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {value}")
    return value


def _param(raw: str) -> tuple[str, str, object]:
    """``VARIANT.KEY=VALUE`` → (variant, key, typed value)."""
    target, separator, value = raw.partition("=")
    variant, dot, key = target.partition(".")
    if not separator or not dot:
        raise argparse.ArgumentTypeError(f"expected VARIANT.KEY=VALUE, got {raw!r}")
    variants = [variant.value for variant in VARIANT_ORDER] + [_ALL_VARIANTS]
    if variant not in variants:
        raise argparse.ArgumentTypeError(
            f"unknown variant {variant!r}; choose from {', '.join(variants)}"
        )
    try:
        return variant, key, BoosterConfig.coerce(key, value)
    except ConfigurationError as error:
        raise argparse.ArgumentTypeError(error.reason) from None


def build_configs(
    params: Sequence[tuple[str, str, object]], seed: int
) -> list[BoosterConfig]:
    """Per-model configs seeded with ``seed`` and overridden by ``--param``."""
    overrides: list[dict[str, object]] = [{"seed": seed} for _ in VARIANT_ORDER]
    for variant, key, value in params:
        for index, candidate in enumerate(VARIANT_ORDER):
            if variant in (_ALL_VARIANTS, candidate.value):
                overrides[index][key] = value
    return [BoosterConfig.lazy_build(changes) for changes in overrides]


def _data_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--data", required=True, help="input CSV file")
    parent.add_argument(
        "--format",
        choices=FORMATS,
        default="numeric-csv",
        help="headerless CAN hex capture or headered numeric table",
    )
    parent.add_argument(
        "--label-col",
        default="label",
        help="label column of a numeric table",
    )
    parent.add_argument(
        "--label-groups",
        choices=sorted(LABEL_GROUPS),
        help="collapse raw labels into coarser classes after loading",
    )
    parent.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for per-round detail",
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lccde",
        description="Leader-class and confidence-decision ensemble for intrusion detection",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser(
        "train", parents=[_data_options()], help="train and save a model"
    )
    train.add_argument("--folds", type=_int_at_least(2), default=5)
    train.add_argument("--seed", type=_int_at_least(0), default=0)
    train.add_argument("--out", required=True, help="model file to write")
    train.add_argument(
        "--param",
        dest="params",
        type=_param,
        action="append",
        default=[],
        metavar="VARIANT.KEY=VALUE",
        help="hyperparameter override; VARIANT is a variant name or 'all'",
    )
    train.add_argument("--workers", type=_int_at_least(1), default=1)
    train.set_defaults(handler=cmd_train)

    evaluate = commands.add_parser(
        "evaluate", parents=[_data_options()], help="score a saved model on labeled data"
    )
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--workers", type=_int_at_least(1), default=1)
    evaluate.set_defaults(handler=cmd_evaluate)

    predict = commands.add_parser(
        "predict", parents=[_data_options()], help="write predictions as CSV to stdout"
    )
    predict.add_argument("--model", required=True)
    predict.add_argument(
        "--trace", action="store_true", help="add arbitration branch and base predictions"
    )
    predict.add_argument("--workers", type=_int_at_least(1), default=1)
    predict.set_defaults(handler=cmd_predict)

    split = commands.add_parser(
        "split", parents=[_data_options()], help="stratified train/test hold-out split"
    )
    split.add_argument("--test-fraction", type=_fraction, default=0.2)
    split.add_argument("--seed", type=_int_at_least(0), default=0)
    split.add_argument("--train-out", required=True)
    split.add_argument("--test-out", required=True)
    split.set_defaults(handler=cmd_split)
    return parser


def load_dataset(
    args: argparse.Namespace, *, allow_empty: bool = False, labels_optional: bool = False
) -> Dataset:
    """Load ``--data``; with ``labels_optional`` a missing label column is fine."""
    if args.format == "can-hex":
        dataset, _ = load_can_hex_csv(args.data, allow_empty=allow_empty)
    else:
        try:
            dataset, _ = load_numeric_csv(
                args.data, args.label_col, allow_empty=allow_empty
            )
        except MissingLabelColumnError:
            if not labels_optional:
                raise
            dataset, _ = load_numeric_csv(args.data, None, allow_empty=allow_empty)
    if args.label_groups:
        dataset = map_class_names(dataset, LABEL_GROUPS[args.label_groups])
    return dataset


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args)
    model = train_lccde(
        dataset,
        args.configs,
        folds=args.folds,
        seed=args.seed,
        concurrency=args.workers,
    )
    save_model(model, args.out)
    print(format_leader_table(model))
    for warning in model.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = relabel_to_reference(load_dataset(args), model.class_names)
    report = evaluate_model(model, dataset, workers=args.workers)
    print(format_evaluation(report, model.class_names))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = load_dataset(args, allow_empty=True, labels_optional=True)
    results = predict_batch_traced(model, dataset, workers=args.workers)
    columns = ["row", "class", "confidence"]
    if args.trace:
        columns += ["branch"] + [variant.value for variant in VARIANT_ORDER]
    rows = []
    for index, (prediction, trace) in enumerate(results):
        row = [index, model.class_names[prediction.class_id], repr(prediction.confidence)]
        if args.trace:
            row.append(trace.branch.value)
            row += [model.class_names[class_id] for class_id in trace.model_classes]
        rows.append(row)
    pd.DataFrame(rows, columns=columns).to_csv(sys.stdout, index=False, lineterminator="\n")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    dataset = load_dataset(args)
    split = holdout_split(dataset, args.test_fraction, args.seed)
    to_numeric_csv(split.train, args.train_out, args.label_col)
    to_numeric_csv(split.test, args.test_out, args.label_col)
    print(f"train: {split.train.n_samples} rows -> {args.train_out}")
    print(f"test: {split.test.n_samples} rows -> {args.test_out}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            try:
                args.configs = build_configs(args.params, args.seed)
            except ConfigurationError as error:
                parser.error(str(error))
    except SystemExit as exit_request:
        code = exit_request.code
        return code if isinstance(code, int) else EXIT_USAGE

    configure_cli_logging(args.verbose)
    try:
        return args.handler(args)
    except (LccdeError, OSError) as error:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {error}", file=sys.stderr)
        return exit_code_for(error)


if __name__ == "__main__":
    sys.exit(main())
