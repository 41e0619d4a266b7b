"""Exception types shared across the package."""


class VenueLensError(Exception):
    """Base class for all venue-lens errors."""


class ConfigurationError(VenueLensError, ValueError):
    """Invalid configuration: unknown venue code, inverted year range, bad paths."""


class IngestError(VenueLensError):
    """A harvest request failed after exhausting the retry policy.

    Carries enough context (venue, page/batch) to resume a partial run.
    """

    def __init__(self, message, venue=None, context=None):
        super().__init__(message)
        self.venue = venue
        self.context = context


class CorpusFormatError(VenueLensError):
    """A persisted corpus file violates the JSONL schema."""

    def __init__(self, message, line_no=None, field=None):
        super().__init__(message)
        self.line_no = line_no
        self.field = field


class InsufficientSamplesError(VenueLensError, ValueError):
    """Too few samples to fit a model, a distribution, or a trend."""


class ModelMismatchError(VenueLensError):
    """Two distributions were fit against different reduction models."""


class DocumentNotFoundError(VenueLensError, KeyError):
    """A doc_id is not present in the loaded corpus."""
