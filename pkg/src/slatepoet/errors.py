"""Exception types shared across the package."""


class SlatePoetError(Exception):
    """Base class for all package-specific errors."""


class InvalidMarkerError(SlatePoetError, ValueError):
    """A detected marker violates its geometric invariants (degenerate edge, NaN, ...)."""


class DuplicateWordIdError(SlatePoetError, ValueError):
    """Two markers in the same snapshot carry the same word_id."""


class UnknownWordError(SlatePoetError, KeyError):
    """A word_id could not be resolved against the vocabulary."""


class EmptyPoemError(SlatePoetError, ValueError):
    """The slate holds no word tiles, so there is nothing to submit."""


class TemplateError(SlatePoetError, ValueError):
    """A prompt template placeholder has no binding."""


class ChainError(SlatePoetError, RuntimeError):
    """A prompt chain failed; `stage` records which completion call broke (1 or 2)."""

    def __init__(self, message: str, stage: int):
        super().__init__(message)
        self.stage = stage


class BackendError(SlatePoetError, RuntimeError):
    """A completion backend failed after exhausting its retries."""


class LogFormatError(SlatePoetError, ValueError):
    """A session log record declares a schema version this build does not support."""


class LayoutFormatError(SlatePoetError, ValueError):
    """A layout/pose file is malformed or has an unsupported format_version."""
