from .core import Dataset, LeaderMap, Prediction, validate_dataset
from .ensemble import (
    ArbitrationBranch,
    ArbitrationTrace,
    EvaluationReport,
    LccdeModel,
    LeaderSelectionEvidence,
    arbitrate,
    evaluate_model,
    predict_batch,
    predict_batch_async,
    predict_batch_traced,
    predict_sample,
    select_leaders,
    train_lccde,
    train_lccde_async,
)
from .io.file import load_can_hex_csv, load_numeric_csv, relabel_to_reference
from .io.model_file import load_model, save_model
from .learners.config import BoosterConfig, Variant

__all__ = [
    "ArbitrationBranch",
    "ArbitrationTrace",
    "BoosterConfig",
    "Dataset",
    "EvaluationReport",
    "LccdeModel",
    "LeaderMap",
    "LeaderSelectionEvidence",
    "Prediction",
    "Variant",
    "arbitrate",
    "evaluate_model",
    "load_can_hex_csv",
    "load_model",
    "load_numeric_csv",
    "predict_batch",
    "predict_batch_async",
    "predict_batch_traced",
    "predict_sample",
    "relabel_to_reference",
    "save_model",
    "select_leaders",
    "train_lccde",
    "train_lccde_async",
    "validate_dataset",
]
