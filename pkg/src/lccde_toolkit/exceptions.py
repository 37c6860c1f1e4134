"""All exceptions for the LCCDE toolkit"""


class LccdeError(Exception):
    """Base LCCDE toolkit exception"""

    message = "Unknown error occurred: {detail}"

    def __init__(self, **context):
        """Initialize the LccdeError exception

        LccdeError is the base class of exceptions in lccde_toolkit. Every
        keyword passed in is kept as an attribute and is available to the
        class-level ``message`` template.

        Args:
            **context: named values referenced by ``message``
        """
        self.context = context
        for key, value in context.items():
            setattr(self, key, value)
        super().__init__(str(self))

    def __str__(self):
        try:
            return self.message.format(**self.context)
        except (KeyError, IndexError):
            return f"{self.message} {self.context!r}"

    def __repr__(self):
        return f"{type(self).__name__}: {str(self)}"


class ConfigurationError(LccdeError, ValueError):
    """
    A hyperparameter or operation argument is outside its allowed range.
    """

    message = "Invalid configuration: {reason}"


class InvalidDatasetError(LccdeError, ValueError):
    """
    The dataset violates one or more structural invariants.
    ``violations`` holds every description produced by ``validate_dataset``.
    """

    message = "invalid dataset: {summary}"

    def __init__(self, violations: list[str]):
        summary = "; ".join(violations[:5])
        if len(violations) > 5:
            summary += f" (+{len(violations) - 5} more)"
        super().__init__(violations=violations, summary=summary)


class DegenerateLabelsError(LccdeError, ValueError):
    """
    Training needs at least two distinct classes present in the labels.
    """

    message = "degenerate labels: {reason}"


class FeatureDimensionError(LccdeError, ValueError):
    """
    The number of features offered for prediction differs from training.
    """

    message = "Feature dimension mismatch: expected {expected} features, got {actual}"


class LengthMismatchError(LccdeError, ValueError):
    message = "Length mismatch: {left_name} has {left} entries, {right_name} has {right}"


class EmptyConfusionError(LccdeError, ValueError):
    message = "Cannot aggregate metrics over an empty confusion matrix ({n_classes} classes, 0 samples)"


class IngestError(LccdeError):
    """Base error for dataset loading"""

    message = "Could not ingest {source}: {reason}"


class EmptyIngestError(IngestError):
    """
    Every row of the input was dropped or the input held no rows at all.
    """

    message = "No usable rows in {source} ({rows_read} read, all dropped)"


class MissingLabelColumnError(IngestError):
    message = "Label column {column!r} not found in {source}. Available columns: {available}"


class UnknownClassError(IngestError):
    """
    A class name in the data is not part of the reference class list,
    usually the class list of a trained model.
    """

    message = "Unknown class {name!r}; known classes: {known}"


class ModelFileError(LccdeError):
    """Base error for model persistence"""

    message = "Model file error for {source}: {reason}"


class ModelFileParseError(ModelFileError):
    message = "Could not parse model file {source} at byte {offset}: {reason}"


class UnsupportedModelVersionError(ModelFileError):
    message = "Unsupported model format version {found} in {source}; supported versions: {supported}"


class ModelChecksumError(ModelFileError):
    message = "Model file {source} is corrupt: checksum {found} does not match content {expected}"


EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_TRAINING = 4
EXIT_UNKNOWN = 1

_error_exit_code_map: dict[type[Exception], int] = {
    IngestError: EXIT_INPUT,
    ModelFileError: EXIT_INPUT,
    FeatureDimensionError: EXIT_INPUT,
    OSError: EXIT_INPUT,
    InvalidDatasetError: EXIT_TRAINING,
    DegenerateLabelsError: EXIT_TRAINING,
    ConfigurationError: EXIT_TRAINING,
}


def exit_code_for(error: BaseException) -> int:
    """Resolve the command-line exit code for an error raised by a command."""
    for error_type in type(error).__mro__:
        if error_type in _error_exit_code_map:
            return _error_exit_code_map[error_type]
    return EXIT_UNKNOWN
