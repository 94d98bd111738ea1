"""Exception hierarchy shared across the pipeline.

Every error carries a stable ``code`` so the CLI can report it as structured
JSON on stderr.
"""

from __future__ import annotations


class RefereeError(Exception):
    code = "E_INTERNAL"


class InputError(RefereeError):
    code = "E_INPUT"


class RepoNotFound(InputError):
    code = "E_REPO"


class UnknownFile(InputError):
    code = "E_UNKNOWN_FILE"


class NotAnImport(InputError):
    code = "E_NOT_IMPORT"


class EmptySummary(InputError):
    code = "E_EMPTY_SUMMARY"


class EmptyMatrix(InputError):
    code = "E_EMPTY_MATRIX"


class LengthMismatch(InputError):
    code = "E_LENGTH"


class ShapeMismatch(InputError):
    code = "E_SHAPE"


class OutOfRangeLabel(InputError):
    code = "E_LABEL"


class InvalidLabel(InputError):
    code = "E_LABEL"


class EmptyDataset(InputError):
    code = "E_DATASET"


class StatisticsError(RefereeError):
    code = "E_STATS"


class ZeroVariance(StatisticsError):
    code = "E_ZERO_VARIANCE"


class AllTied(StatisticsError):
    code = "E_ALL_TIED"


class InsufficientData(StatisticsError):
    code = "E_INSUFFICIENT_DATA"


class BackendError(RefereeError):
    code = "E_BACKEND"


class BackendUnavailable(BackendError):
    code = "E_BACKEND"


class UnparseableVerdict(BackendError):
    code = "E_UNPARSEABLE"

    def __init__(self, message: str, attempts: int, last_response: str = ""):
        super().__init__(message)
        self.attempts = attempts
        self.last_response = last_response


class FileNotFound(InputError):
    code = "E_INPUT"
