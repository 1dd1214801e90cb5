"""Domain exceptions shared across the toolkit.

Everything that represents an expected, recoverable failure derives from
ScreeningError so the CLI can map it to exit code 1; programming errors and
bad arguments stay ValueError/TypeError and map to usage failures.
"""

from __future__ import annotations


class ScreeningError(Exception):
    """Base class for expected domain failures."""


class CorpusFormatError(ScreeningError):
    """A corpus or export file could not be parsed."""


class DuplicateIdError(ScreeningError):
    """A record id appears more than once in a corpus."""


class NotFoundError(ScreeningError):
    """A referenced entity does not exist."""


class ConflictError(ScreeningError):
    """The requested state transition is not allowed (e.g. re-deciding triage)."""


class EmptyDocumentError(ScreeningError):
    """A document had no text left after cleaning and is excluded from analysis."""


class FetchError(ScreeningError):
    """A network fetch failed after the configured retries."""


class FeedParseError(ScreeningError):
    """A news feed or social export payload is malformed."""


class TrainingError(ScreeningError):
    """The labeled data cannot support training (e.g. a class is absent)."""


class ProtocolError(ScreeningError):
    """A remote classifier returned a response outside the agreed contract."""

    def __init__(self, message: str, raw_response: str | None = None):
        super().__init__(message)
        self.raw_response = raw_response


class RemoteUnavailableError(ScreeningError):
    """The remote classifier endpoint stayed unreachable through all retries."""


class StorageError(ScreeningError):
    """Persistent state could not be written; in-memory state was not changed."""
