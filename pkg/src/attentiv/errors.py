"""Error taxonomy shared by every module.

Each class carries a process exit code so the command-line layer can map
failures to documented codes without string matching.
"""


class AttentivError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ParameterError(AttentivError):
    """An argument value is outside its documented range or shape."""

    exit_code = 2


class SchemaError(AttentivError):
    """Column names, order, or counts do not match the expected schema."""

    exit_code = 3


class DataError(AttentivError):
    """Input data is malformed (non-numeric, non-finite, empty, truncated)."""

    exit_code = 4


class StreamOrderError(DataError):
    """Sample timestamps are not strictly increasing."""

    exit_code = 5


class TrainingError(AttentivError):
    """A model could not be trained on the given data."""

    exit_code = 6


class StratificationError(TrainingError):
    """A class has too few members to form the requested folds."""

    exit_code = 7


class NotFoundError(AttentivError):
    """A referenced session or model id does not exist."""

    exit_code = 8


class StateError(AttentivError):
    """An operation was attempted in a session phase that forbids it."""

    exit_code = 9


class ValidationError(AttentivError):
    """User-supplied metadata or ratings failed validation."""

    exit_code = 10


class ModelFileError(AttentivError):
    """A model file could not be read or written."""

    exit_code = 11


class VersionError(ModelFileError):
    """The model file declares an unsupported format version."""

    exit_code = 12


class ChecksumError(ModelFileError):
    """The model file checksum does not match its contents."""

    exit_code = 13


class TruncatedFileError(ModelFileError):
    """The model file ends before its checksum line."""

    exit_code = 14


class NetworkError(AttentivError):
    """A connection to the session service failed."""

    exit_code = 16
