"""Exception types shared across the toolkit."""


class HanzisimError(Exception):
    """Base class for all toolkit errors."""


class TableLoadError(HanzisimError):
    """A character table file is missing or malformed."""


class IngestError(HanzisimError):
    """A candidate-distribution record violates the interchange contract."""


class CorpusError(HanzisimError):
    """A parallel corpus or hypothesis file is inconsistent."""
