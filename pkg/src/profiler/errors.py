"""Exception hierarchy shared by every profiler module.

Each error carries a machine-readable ``code`` that the HTTP API and the
CLI surface verbatim, so callers can branch on failures without parsing
messages.
"""


class ProfilerError(Exception):
    """Base class for all errors raised by this package."""

    code = "INTERNAL"


class MalformedCsv(ProfilerError):
    """A CSV row is ragged or contains broken quoting."""

    code = "MALFORMED_CSV"

    def __init__(self, row_index: int, reason: str):
        super().__init__(f"row {row_index}: {reason}")
        self.row_index = row_index
        self.reason = reason


class EmptyInput(ProfilerError):
    code = "EMPTY_INPUT"


class IndexOutOfRange(ProfilerError, IndexError):
    code = "INDEX_OUT_OF_RANGE"


class SourceMismatch(ProfilerError):
    """Partitions over tables of different row counts cannot be intersected."""

    code = "SOURCE_MISMATCH"


class TypeMismatch(ProfilerError):
    """A metric was requested over columns of an incompatible type."""

    code = "TYPE_MISMATCH"


class UnknownTable(ProfilerError):
    code = "UNKNOWN_TABLE"


class UnknownColumn(ProfilerError):
    code = "UNKNOWN_COLUMN"


class EmptyTransactions(ProfilerError):
    code = "EMPTY_TRANSACTIONS"


class NotDownwardClosed(ProfilerError):
    """Rule derivation needs the support of every antecedent subset."""

    code = "NOT_DOWNWARD_CLOSED"


class ResourceLimitExceeded(ProfilerError):
    """A task hit its time or memory budget; partial results are discarded."""

    code = "RESOURCE_LIMIT"


class TaskCancelled(ProfilerError):
    code = "CANCELLED"


class ValidationError(ProfilerError):
    """A request or parameter set failed structural validation."""

    code = "VALIDATION_ERROR"


class UnknownDataset(ProfilerError):
    code = "UNKNOWN_DATASET"


class UnknownTask(ProfilerError):
    code = "UNKNOWN_TASK"


class NotFinished(ProfilerError):
    code = "NOT_FINISHED"


class BadRegex(ProfilerError):
    code = "BAD_REGEX"


class AlreadyFinished(ProfilerError):
    code = "ALREADY_FINISHED"


class StaleDecision(ProfilerError):
    """A fix refers to a row already modified by a newer dataset revision."""

    code = "STALE_DECISION"


class StorageFull(ProfilerError):
    code = "STORAGE_FULL"
