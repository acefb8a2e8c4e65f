"""Exception types raised across the toolkit."""


class SoneticaError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SoneticaError):
    """Input file is not syntactically valid."""


class SchemaError(SoneticaError):
    """Input parses but violates the documented schema or value ranges."""


class DuplicateIdError(SoneticaError):
    """Two corpus entries share the same id."""


class RangeError(SoneticaError):
    """A lexicon value lies outside its dimension's allowed range."""


class LengthMismatchError(SoneticaError):
    """Two paired sequences differ in length."""


class EmptyLexiconError(SoneticaError):
    """An operation requires a non-empty lexicon."""


class EmptyTokenListError(SoneticaError):
    """An operation requires at least one token."""


class MissingEmbeddingError(SoneticaError):
    """Requested sonnet ids are absent from an embedding store."""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        super().__init__(f"no embedding for ids: {', '.join(self.missing_ids)}")


class ShapeError(SoneticaError):
    """Array dimensions are inconsistent with what the operation expects."""


class DegenerateDataError(SoneticaError):
    """Training data contains fewer than two classes."""


class DegenerateProblemError(SoneticaError):
    """A semi-supervised problem has no usable labeled structure."""


class KernelError(SoneticaError):
    """Kernel parameters are invalid for the given data."""


class TooFewSamplesError(SoneticaError):
    """Not enough samples to run the operation."""


class SingleClassError(SoneticaError):
    """A metric needs at least two observed classes."""


class TooFewPairsError(SoneticaError):
    """No usable pairs remain for a paired statistical test."""


class DomainError(SoneticaError):
    """A numeric argument lies outside its valid domain."""


class ConfigError(SoneticaError):
    """A run configuration is missing fields or references absent files."""
