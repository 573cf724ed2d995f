"""Exception hierarchy shared across the toolkit."""


class CropMetaError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CropMetaError, ValueError):
    """Invalid input data or violated invariant (bad file, bad parameter)."""


class DataFormatError(ValidationError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = str(path)
            if line is not None:
                loc += f":{line}"
            loc += ": "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class TrainingError(CropMetaError, RuntimeError):
    """Training aborted (e.g. non-finite loss)."""


class ModelFileError(CropMetaError, ValueError):
    """Model file is corrupt, truncated, or of an unsupported version."""


class ExperimentError(CropMetaError, RuntimeError):
    """Experiment precondition failed (insufficient samples, data leakage)."""
