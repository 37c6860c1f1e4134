from .file import (
    CAN_FEATURE_NAMES,
    CICIDS2017_CLASS_GROUPS,
    CanRecord,
    IngestReport,
    concat_datasets,
    iter_can_records,
    load_can_hex_csv,
    load_car_hacking,
    load_numeric_csv,
    map_class_names,
    relabel_to_reference,
    to_numeric_csv,
)
from .model_file import (
    FORMAT_VERSION,
    dumps_model,
    load_model,
    loads_model,
    save_model,
)

__all__ = [
    "CAN_FEATURE_NAMES",
    "CICIDS2017_CLASS_GROUPS",
    "CanRecord",
    "IngestReport",
    "concat_datasets",
    "iter_can_records",
    "load_can_hex_csv",
    "load_car_hacking",
    "load_numeric_csv",
    "map_class_names",
    "relabel_to_reference",
    "to_numeric_csv",
    "FORMAT_VERSION",
    "dumps_model",
    "load_model",
    "loads_model",
    "save_model",
]
