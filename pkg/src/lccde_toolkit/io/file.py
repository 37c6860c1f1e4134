"""
Dataset ingestion: headerless CAN-bus hex captures and headered numeric
flow-feature tables, plus the label utilities that go with them.
"""

from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import IO, NamedTuple

import numpy as np
import pandas as pd

from ..core import Dataset
from ..data.transformers import encode_first_appearance, remap_codes
from ..exceptions import (
    EmptyIngestError,
    IngestError,
    MissingLabelColumnError,
    UnknownClassError,
)
from ..logger import getLogger

LOGGER = getLogger("io")

Source = str | Path | IO[bytes] | IO[str]

CAN_FEATURE_NAMES = ("can_id",) + tuple(f"data{index}" for index in range(8))
_CAN_FIELDS = 12  # timestamp, id, dlc, 8 data bytes, flag
_HEX_ID = r"[0-9A-Fa-f]{1,8}"
_HEX_BYTE = r"[0-9A-Fa-f]{1,2}"

CICIDS2017_CLASS_GROUPS: dict[str, str] = {
    "BENIGN": "Normal",
    "DoS Hulk": "DoS",
    "DoS GoldenEye": "DoS",
    "DoS slowloris": "DoS",
    "DoS Slowhttptest": "DoS",
    "DDoS": "DoS",
    "PortScan": "Sniffing",
    "FTP-Patator": "Brute-Force",
    "SSH-Patator": "Brute-Force",
    "Web Attack \ufffd Brute Force": "Web-Attack",
    "Web Attack \ufffd XSS": "Web-Attack",
    "Web Attack \ufffd Sql Injection": "Web-Attack",
    "Web Attack – Brute Force": "Web-Attack",
    "Web Attack – XSS": "Web-Attack",
    "Web Attack – Sql Injection": "Web-Attack",
    "Web Attack - Brute Force": "Web-Attack",
    "Web Attack - XSS": "Web-Attack",
    "Web Attack - Sql Injection": "Web-Attack",
    "Bot": "Botnets",
    "Infiltration": "Infiltration",
    "Heartbleed": "DoS",
}
"""Raw CICIDS2017 labels grouped into the seven evaluated traffic classes."""


class CanRecord(NamedTuple):
    timestamp: float
    can_id: int
    dlc: int
    data: tuple[int, ...]
    label: str

    def features(self) -> list[float]:
        return [float(self.can_id), *map(float, self.data)]


class IngestReport(NamedTuple):
    rows_read: int
    rows_kept: int
    rows_dropped_nonfinite: int
    rows_dropped_malformed: int
    class_histogram: dict[str, int]

    def __add__(self, other: "IngestReport") -> "IngestReport":  # type: ignore[override]
        histogram = dict(self.class_histogram)
        for name, count in other.class_histogram.items():
            histogram[name] = histogram.get(name, 0) + count
        return IngestReport(
            self.rows_read + other.rows_read,
            self.rows_kept + other.rows_kept,
            self.rows_dropped_nonfinite + other.rows_dropped_nonfinite,
            self.rows_dropped_malformed + other.rows_dropped_malformed,
            histogram,
        )


def _source_name(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return str(source)
    return str(getattr(source, "name", "<stream>"))


def _open(source: Source):
    if isinstance(source, str):
        return Path(source).resolve()
    return source


def _histogram(labels: np.ndarray, class_names: Sequence[str]) -> dict[str, int]:
    counts = np.bincount(labels, minlength=len(class_names))
    return {name: int(count) for name, count in zip(class_names, counts)}


def _finish(
    source: Source,
    features: np.ndarray,
    raw_labels: Sequence[str] | None,
    feature_names: Sequence[str],
    rows_read: int,
    dropped_nonfinite: int,
    dropped_malformed: int,
    allow_empty: bool,
) -> tuple[Dataset, IngestReport]:
    if len(features) == 0 and not allow_empty:
        raise EmptyIngestError(source=_source_name(source), rows_read=rows_read)
    if raw_labels is None:
        labels, class_names = None, []
        histogram: dict[str, int] = {}
    else:
        labels, class_names = encode_first_appearance(raw_labels)
        histogram = _histogram(labels, class_names)
    features = features.reshape(len(features), len(feature_names))
    report = IngestReport(
        rows_read, len(features), dropped_nonfinite, dropped_malformed, histogram
    )
    LOGGER.info(
        "Loaded %s: %d rows read, %d kept, %d non-finite, %d malformed",
        _source_name(source),
        rows_read,
        report.rows_kept,
        dropped_nonfinite,
        dropped_malformed,
    )
    return Dataset(features, labels, feature_names, class_names), report


def _present(column: pd.Series) -> pd.Series:
    return column.map(lambda cell: isinstance(cell, str) and cell != "")


def parse_can_frame(frame: pd.DataFrame) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Decode raw CAN capture fields.

    ``frame`` holds up to twelve string columns per row: timestamp, hex CAN
    ID, DLC, DLC hex data bytes and the flag. Short frames carry their flag
    right after the last data byte.

    Returns:
        the (rows × 9) feature matrix of the well-formed rows, their flags,
        and the boolean mask of well-formed rows
    """
    frame = frame.reindex(columns=range(_CAN_FIELDS)).astype(object)
    for column in frame.columns:
        frame[column] = frame[column].map(
            lambda cell: cell.strip() if isinstance(cell, str) else cell
        )
    n = len(frame)
    features = np.zeros((n, len(CAN_FEATURE_NAMES)))
    flags = np.empty(n, dtype=object)
    valid = np.zeros(n, dtype=bool)

    timestamps = pd.to_numeric(frame[0].where(_present(frame[0])), errors="coerce")
    ids = frame[1].where(_present(frame[1]), "")
    dlc_text = frame[2].where(_present(frame[2]), "")
    well_formed = (
        np.isfinite(timestamps.to_numpy(dtype=np.float64, na_value=np.nan))
        & ids.str.fullmatch(_HEX_ID).to_numpy(dtype=bool)
        & dlc_text.str.fullmatch(r"[0-8]").to_numpy(dtype=bool)
    )
    dlc = np.where(well_formed, pd.to_numeric(dlc_text, errors="coerce").fillna(-1), -1)

    for length in range(9):
        rows = np.flatnonzero(well_formed & (dlc == length))
        if not len(rows):
            continue
        group = frame.iloc[rows]
        ok = np.ones(len(rows), dtype=bool)
        for offset in range(length):
            cells = group[3 + offset].where(_present(group[3 + offset]), "")
            ok &= cells.str.fullmatch(_HEX_BYTE).to_numpy(dtype=bool)
        flag_column = 3 + length
        ok &= _present(group[flag_column]).to_numpy(dtype=bool)
        for trailing in range(flag_column + 1, _CAN_FIELDS):
            ok &= ~_present(group[trailing]).to_numpy(dtype=bool)
        kept = rows[ok]
        if not len(kept):
            continue
        features[kept, 0] = [int(value, 16) for value in ids.iloc[kept]]
        for offset in range(length):
            features[kept, 1 + offset] = [
                int(value, 16) for value in frame[3 + offset].iloc[kept]
            ]
        flags[kept] = frame[flag_column].iloc[kept].to_numpy()
        valid[kept] = True
    return features[valid], flags[valid], valid


def _read_raw_can(source: Source) -> tuple[pd.DataFrame, int]:
    overflow: list[list[str]] = []

    def keep_overflow(fields: list[str]) -> None:
        overflow.append(fields)
        return None

    try:
        frame = pd.read_csv(
            _open(source),
            header=None,
            names=range(_CAN_FIELDS),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            engine="python",
            on_bad_lines=keep_overflow,
        )
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(columns=range(_CAN_FIELDS), dtype=object)
    except (pd.errors.ParserError, UnicodeDecodeError) as error:
        raise IngestError(source=_source_name(source), reason=str(error)) from error
    return frame, len(overflow)


def load_can_hex_csv(
    source: Source, *, allow_empty: bool = False
) -> tuple[Dataset, IngestReport]:
    """
    Load a headerless CAN capture.

    Every row is ``timestamp, CAN ID (hex), DLC, DLC data bytes (hex), flag``.
    Features are the decoded CAN ID followed by the eight data bytes; frames
    with DLC < 8 are zero-padded. The timestamp is dropped and the flag
    becomes the class label (encoded by first appearance). Rows that do not
    parse are dropped and counted.

    Raises:
        OSError: the source cannot be read
        EmptyIngestError: no row survived (unless ``allow_empty``)
    """
    frame, overflow = _read_raw_can(source)
    features, flags, _ = parse_can_frame(frame)
    rows_read = len(frame) + overflow
    return _finish(
        source,
        features,
        [str(flag) for flag in flags],
        CAN_FEATURE_NAMES,
        rows_read,
        0,
        rows_read - len(features),
        allow_empty,
    )


def iter_can_records(source: Source):
    """Yield a CanRecord for every well-formed row of a CAN capture."""
    frame, _ = _read_raw_can(source)
    _, _, valid = parse_can_frame(frame)
    for row in np.flatnonzero(valid):
        fields = [
            cell.strip()
            for cell in frame.iloc[row]
            if isinstance(cell, str) and cell.strip()
        ]
        dlc = int(fields[2])
        data = tuple(int(value, 16) for value in fields[3 : 3 + dlc])
        yield CanRecord(
            float(fields[0]),
            int(fields[1], 16),
            dlc,
            data + (0,) * (8 - dlc),
            fields[3 + dlc],
        )


def _to_float(cell) -> float | None:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return None


def _parse_features(cells: pd.DataFrame) -> tuple[np.ndarray, np.ndarray]:
    """Float matrix plus a per-row mask of cells that are not numbers at all."""
    try:
        values = cells.to_numpy(dtype=object).astype(np.float64)
        return values, np.zeros(len(cells), dtype=bool)
    except (TypeError, ValueError):
        parsed = np.frompyfunc(_to_float, 1, 1)(cells.to_numpy(dtype=object))
        malformed = np.frompyfunc(lambda value: value is None, 1, 1)(parsed).astype(bool)
        parsed[malformed] = np.nan
        return parsed.astype(np.float64), malformed.any(axis=1)


def load_numeric_csv(
    source: Source,
    label_column: str | None = "label",
    *,
    allow_empty: bool = False,
) -> tuple[Dataset, IngestReport]:
    """
    Load a headered numeric table.

    Every column other than ``label_column`` is a feature. Header names are
    whitespace-stripped and kept as feature names. Rows with a non-numeric
    cell or an empty label are dropped as malformed; rows with NaN or
    ±infinity are dropped as non-finite. ``label_column=None`` loads an
    unlabeled table.

    Raises:
        OSError: the source cannot be read
        IngestError: the table has no header row (unless ``allow_empty``, which
            loads a zero-byte file as an empty unlabeled table)
        MissingLabelColumnError: ``label_column`` is not in the header
        EmptyIngestError: no row survived (unless ``allow_empty``)
    """
    name = _source_name(source)
    try:
        frame = pd.read_csv(
            _open(source),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding_errors="replace",
        )
    except pd.errors.EmptyDataError:
        if not allow_empty:
            raise IngestError(source=name, reason="no header row") from None
        LOGGER.warning("%s has no header row, loading it as an empty table", name)
        return _finish(source, np.zeros((0, 0)), None, [], 0, 0, 0, allow_empty)
    except (pd.errors.ParserError, UnicodeDecodeError) as error:
        raise IngestError(source=name, reason=str(error)) from error
    frame.columns = [str(column).strip() for column in frame.columns]

    if label_column is not None and label_column not in frame.columns:
        raise MissingLabelColumnError(
            column=label_column, source=name, available=list(frame.columns)
        )
    feature_names = [column for column in frame.columns if column != label_column]
    values, malformed = _parse_features(frame[feature_names])
    raw_labels = None
    if label_column is not None:
        raw_labels = frame[label_column].str.strip().to_numpy(dtype=object)
        malformed |= raw_labels == ""
    nonfinite = ~malformed & ~np.isfinite(values).all(axis=1)
    keep = ~malformed & ~nonfinite
    return _finish(
        source,
        values[keep],
        None if raw_labels is None else list(raw_labels[keep]),
        feature_names,
        len(frame),
        int(nonfinite.sum()),
        int(malformed.sum()),
        allow_empty,
    )


def relabel_to_reference(dataset: Dataset, reference: Sequence[str]) -> Dataset:
    """
    Re-index labels to the order of ``reference`` (typically a model's
    class names).

    Raises:
        UnknownClassError: a class of ``dataset`` is missing from ``reference``
    """
    reference = [str(name) for name in reference]
    for name in dataset.class_names:
        if name not in reference:
            raise UnknownClassError(name=name, known=reference)
    labels = None
    if dataset.labels is not None:
        labels = remap_codes(dataset.labels, dataset.class_names, reference)
    return Dataset(dataset.features, labels, dataset.feature_names, reference)


def map_class_names(dataset: Dataset, mapping: Mapping[str, str]) -> Dataset:
    """
    Rename classes through ``mapping`` and merge classes that share a new
    name. Names missing from the mapping are kept as they are. New class ids
    follow first appearance in the data.
    """
    if dataset.labels is None:
        return dataset
    renamed = [mapping.get(name, name) for name in dataset.class_names]
    labels, class_names = encode_first_appearance(
        [renamed[label] for label in dataset.labels]
    )
    return Dataset(dataset.features, labels, dataset.feature_names, class_names)


def concat_datasets(datasets: Sequence[Dataset]) -> Dataset:
    """
    Stack datasets with identical feature columns; class names are merged
    and re-encoded by first appearance.
    """
    if not datasets:
        raise ValueError("concat_datasets() needs at least one dataset")
    widths = {dataset.n_features for dataset in datasets}
    if len(widths) != 1:
        raise ValueError(f"datasets disagree on feature count: {sorted(widths)}")
    names = [
        dataset.class_names[label]
        for dataset in datasets
        for label in (dataset.labels if dataset.labels is not None else ())
    ]
    labels, class_names = encode_first_appearance(names)
    if any(dataset.labels is None for dataset in datasets):
        labels, class_names = None, []
    return Dataset(
        np.vstack([dataset.features for dataset in datasets]),
        labels,
        datasets[0].feature_names,
        class_names,
    )


def load_car_hacking(
    files: Mapping[str, Source], *, normal_name: str = "Normal"
) -> tuple[Dataset, IngestReport]:
    """
    Load the public Car-Hacking captures.

    ``files`` maps an attack name (e.g. ``DoS``) to its capture. Frames
    flagged ``R`` become ``normal_name`` and frames flagged ``T`` become the
    capture's attack name. The ingest reports are summed.
    """
    parts: list[Dataset] = []
    report: IngestReport | None = None
    for attack, source in files.items():
        dataset, part_report = load_can_hex_csv(source)
        parts.append(map_class_names(dataset, {"R": normal_name, "T": attack}))
        report = part_report if report is None else report + part_report
    if report is None:
        raise ValueError("load_car_hacking() needs at least one capture")
    combined = concat_datasets(parts)
    histogram = _histogram(combined.labels, combined.class_names)
    return combined, report._replace(class_histogram=histogram)


def to_numeric_csv(
    dataset: Dataset, sink: Source, label_column: str | None = "label"
) -> None:
    """
    Write a dataset as a headered numeric table readable by
    ``load_numeric_csv``. Floats use the shortest exact representation.
    """
    frame = pd.DataFrame(
        {
            name: [repr(float(value)) for value in dataset.features[:, column]]
            for column, name in enumerate(dataset.feature_names)
        },
        columns=list(dataset.feature_names),
    )
    if label_column is not None and dataset.labels is not None:
        frame[label_column] = [dataset.class_names[label] for label in dataset.labels]
    frame.to_csv(_open(sink), index=False, lineterminator="\n", encoding="utf-8")
