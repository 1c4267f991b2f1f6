"""Exception hierarchy shared across the package."""


class QehumorError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(QehumorError):
    """A required column or field is missing from an input file."""


class ParseError(QehumorError):
    """A value in an input file could not be interpreted."""


class FormatError(QehumorError):
    """An input file violates its declared line format."""


class ValidationError(QehumorError):
    """A parsed value violates a domain constraint."""


class DimensionError(QehumorError):
    """Operands have incompatible shapes or orders."""


class ContractViolationError(QehumorError):
    """An input breaks a precondition the caller promised to uphold."""


class ConvergenceError(QehumorError):
    """An iterative numeric routine hit its iteration cap."""


class NumericError(QehumorError):
    """A numeric result is outside its provable range, indicating kernel failure."""


class NotPositiveSemidefiniteError(QehumorError):
    """A matrix required to be PSD has a significantly negative eigenvalue."""


class StratificationError(QehumorError):
    """A class is too small to be spread over the requested folds."""


class TrainingError(QehumorError):
    """Classifier training received degenerate input or failed to converge."""


class MissingRecordError(QehumorError):
    """A per-sample auxiliary record was requested but not found."""


class ConfigurationError(QehumorError):
    """A run configuration is internally inconsistent."""
