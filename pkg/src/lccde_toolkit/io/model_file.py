"""
Model persistence.

A model file is a single JSON document::

    {"format_version": 1, "sha256": "<hex>", "model": {...}}

Floats are written with Python's shortest round-trip representation, so
thresholds and leaf weights reload bit-identically. The checksum covers the
canonical (sorted-key, compact) encoding of ``model`` and catches edits that
still parse.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import IO

from .._models import ForestJSON, ModelFileJSON, ModelJSON, TreeJSON
from ..core import LeaderMap
from ..ensemble import LccdeModel, LeaderSelectionEvidence
from ..exceptions import (
    ModelChecksumError,
    ModelFileError,
    ModelFileParseError,
    UnsupportedModelVersionError,
)
from ..learners.booster import TrainedForest
from ..learners.config import BoosterConfig
from ..learners.tree import RegressionTree
from ..logger import getLogger

LOGGER = getLogger("io")

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (FORMAT_VERSION,)


def _tree_to_json(tree: RegressionTree) -> TreeJSON:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "leaf_weight": tree.value.tolist(),
        "sample_count": tree.sample_count,
    }


def _forest_to_json(forest: TrainedForest) -> ForestJSON:
    return {
        "variant": forest.variant.value,
        "config": forest.config.to_dict(),
        "base_score": forest.base_score.tolist(),
        "n_features": forest.n_features,
        "fit_seconds": forest.fit_seconds,
        "trees": [
            [_tree_to_json(tree) for tree in round_trees] for round_trees in forest.trees
        ],
    }


def model_to_json(model: LccdeModel) -> ModelJSON:
    return {
        "class_names": list(model.class_names),
        "feature_names": list(model.feature_names),
        "leader_map": list(model.leader_map),
        "selection": {
            "f1": [list(row) for row in model.evidence.f1],
            "fit_seconds": list(model.evidence.fit_seconds),
            "folds": model.folds,
            "seed": model.seed,
            "warnings": list(model.warnings),
        },
        "forests": [_forest_to_json(forest) for forest in model.forests],
    }


def model_from_json(body: ModelJSON) -> LccdeModel:
    forests = [
        TrainedForest(
            forest["variant"],
            [
                [
                    RegressionTree(
                        tree["feature"],
                        tree["threshold"],
                        tree["left"],
                        tree["right"],
                        tree["leaf_weight"],
                        tree["sample_count"],
                    )
                    for tree in round_trees
                ]
                for round_trees in forest["trees"]
            ],
            forest["base_score"],
            BoosterConfig.lazy_build(forest["config"]),
            forest["n_features"],
            forest["fit_seconds"],
        )
        for forest in body["forests"]
    ]
    selection = body["selection"]
    return LccdeModel(
        forests,
        LeaderMap(body["leader_map"]),
        body["class_names"],
        LeaderSelectionEvidence.build(selection["f1"], selection["fit_seconds"]),
        feature_names=body["feature_names"],
        folds=selection["folds"],
        seed=selection["seed"],
        warnings=selection["warnings"],
    )


def checksum(body: ModelJSON) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def dumps_model(model: LccdeModel) -> str:
    body = model_to_json(model)
    document: ModelFileJSON = {
        "format_version": FORMAT_VERSION,
        "sha256": checksum(body),
        "model": body,
    }
    return json.dumps(document, indent=1) + "\n"


def save_model(model: LccdeModel, sink: str | Path | IO[str]) -> None:
    """
    Write ``model`` to a path or text stream.

    Paths are written through a temporary file in the same directory and
    renamed into place, so a failed save never leaves a partial file.
    """
    text = dumps_model(model)
    if not isinstance(sink, (str, Path)):
        sink.write(text)
        return
    target = Path(sink).resolve()
    handle = tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        dir=target.parent,
        prefix=f".{target.name}.",
        suffix=".tmp",
        delete=False,
    )
    try:
        with handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(handle.name, target)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    LOGGER.info("Saved model to %s", target)


def loads_model(raw: bytes | str, source: str = "<string>") -> LccdeModel:
    """
    Parse a model document.

    Raises:
        ModelFileParseError: the bytes are not valid UTF-8 JSON; carries the
            byte offset of the failure
        UnsupportedModelVersionError: ``format_version`` is not supported
        ModelChecksumError: the body does not match its checksum
        ModelFileError: the document is missing required content
    """
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as error:
            raise ModelFileParseError(
                source=source, offset=error.start, reason=error.reason
            ) from None
    else:
        text = raw
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        offset = len(text[: error.pos].encode("utf-8"))
        raise ModelFileParseError(source=source, offset=offset, reason=error.msg) from None

    if not isinstance(document, dict) or "format_version" not in document:
        raise ModelFileError(source=source, reason="not a model document")
    version = document["format_version"]
    if version not in SUPPORTED_VERSIONS:
        raise UnsupportedModelVersionError(
            found=version, source=source, supported=list(SUPPORTED_VERSIONS)
        )
    body = document.get("model")
    if not isinstance(body, dict):
        raise ModelFileError(source=source, reason="missing model body")
    expected = checksum(body)
    if document.get("sha256") != expected:
        raise ModelChecksumError(
            source=source, found=document.get("sha256"), expected=expected
        )
    try:
        return model_from_json(body)
    except (KeyError, TypeError, ValueError, IndexError) as error:
        raise ModelFileError(source=source, reason=f"malformed content: {error}") from error


def load_model(source: str | Path | IO[bytes]) -> LccdeModel:
    """Load a model written by `save_model` from a path or binary stream."""
    if isinstance(source, (str, Path)):
        path = Path(source).resolve()
        model = loads_model(path.read_bytes(), str(source))
        LOGGER.info("Loaded model from %s", path)
        return model
    return loads_model(source.read(), str(getattr(source, "name", "<stream>")))
