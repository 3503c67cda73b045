"""Exception and warning types shared across the package.

Exit-code mapping used by the CLI lives in cli.py: validation-type errors
(bad manifests, malformed input files) exit 1, runtime failures exit 2.
"""

from __future__ import annotations


class ScribeDistError(Exception):
    """Base class for all package-specific errors."""


class TranscriptionFormatError(ScribeDistError):
    """A transcription file violates the expected layout.

    Carries the offending path and a 1-based line number when known.
    """

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f" ({path}" + (f", line {line_no})" if line_no is not None else ")")
        super().__init__(message + where)


class DanglingWordBreakError(TranscriptionFormatError):
    """A hyphenation marker ends a line with no following word to fuse."""


class MemoryBudgetError(ScribeDistError):
    """The full dynamic-programming table would exceed the cell budget."""


class MatrixFormatError(ScribeDistError):
    """A frequency-matrix CSV (or related tabular file) cannot be parsed."""


class ManifestError(ScribeDistError):
    """A run manifest is missing, unreadable, or fails validation."""


class PipelineError(ScribeDistError):
    """A pipeline stage failed; names the stage and chains the cause."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.__cause__ = cause


class ScribeDistWarning(UserWarning):
    """Non-fatal conditions (short vocabularies, empty samples, truncations)."""


# Error families that indicate bad *input* rather than a failed computation.
VALIDATION_ERRORS = (ManifestError, TranscriptionFormatError, MatrixFormatError)
