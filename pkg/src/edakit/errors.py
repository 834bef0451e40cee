"""Exception types shared across the engine."""


class EdakitError(Exception):
    """Base class for all engine errors."""


class DataError(EdakitError):
    """Dataset construction, ingestion or materialization failure."""


class FilterError(EdakitError):
    """Filter DSL parse or validation failure.

    ``offset`` is the 0-based byte offset of the failure in the source
    text, or -1 when the error is not positional (e.g. unknown column).
    """

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


class CommandError(EdakitError):
    """Command language parse failure, with byte offset and suggestions."""

    def __init__(self, message: str, offset: int = -1, suggestions: list[str] | None = None):
        super().__init__(message)
        self.offset = offset
        self.suggestions = suggestions or []


class AnalysisError(EdakitError):
    """Invalid input to a statistics / clustering / projection operation."""


class UnsupportedOperation(AnalysisError):
    """Operation not available for the given algorithm (e.g. cmds inverse)."""


class CancelledError(EdakitError):
    """Raised inside a long computation when the caller cancelled it."""


class SessionError(EdakitError):
    """Invalid session event or state transition."""


class RevisionConflict(SessionError):
    """Optimistic-concurrency failure: expected_revision did not match."""

    def __init__(self, solution_id: int, expected: int, actual: int):
        super().__init__(
            f"revision conflict on solution {solution_id}: "
            f"expected {expected}, actual {actual}"
        )
        self.solution_id = solution_id
        self.expected = expected
        self.actual = actual


class SnapshotError(SessionError):
    """Snapshot restore failure (hash or schema mismatch)."""
