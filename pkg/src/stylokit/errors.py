"""Exception and warning types shared across the toolkit.

Errors signal contract violations and raise; warnings cover the
degraded-but-usable paths (keep-going contracts).
"""


class StylokitError(Exception):
    """Base class for all toolkit errors."""


# corpus
class EmptyDocument(StylokitError):
    pass


class AnnotationMismatch(StylokitError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InsufficientBooks(StylokitError):
    def __init__(self, author_id, message=None):
        super().__init__(message or f"author {author_id!r} has too few books for the requested splits")
        self.author_id = author_id


class InvalidFraction(StylokitError):
    pass


class InsufficientSentences(StylokitError):
    def __init__(self, author_id, message=None):
        super().__init__(message or f"author {author_id!r} has no eligible sentences")
        self.author_id = author_id


# annotate
class UnknownTag(StylokitError):
    pass


# metrics
class DimensionMismatch(StylokitError):
    pass


class InvalidDistribution(StylokitError):
    pass


class ZeroVector(StylokitError):
    pass


class EmptyInput(StylokitError):
    pass


class InvalidInput(StylokitError):
    pass


class LengthMismatch(StylokitError):
    pass


class UnknownAuthor(StylokitError):
    pass


# adapters / tensor files
class Truncated(StylokitError):
    pass


class CorruptHeader(StylokitError):
    pass


class UnsupportedDtype(StylokitError):
    pass


class UnpairedTensor(StylokitError):
    def __init__(self, target, message=None):
        super().__init__(message or f"target {target!r} has an unpaired tensor")
        self.target = target


class ShapeMismatch(StylokitError):
    pass


class UnknownTarget(StylokitError):
    pass


class SpanOutOfRange(StylokitError):
    pass


class IncompatibleAdapters(StylokitError):
    pass


class InvalidSpec(StylokitError):
    pass


# warnings (keep-going contracts)
class StylokitWarning(UserWarning):
    pass


class MalformedBoilerplate(StylokitWarning):
    """Only one of the START/END boilerplate markers was found; full text kept."""


class MissingBoilerplate(StylokitWarning):
    """Stripping requested but no markers found; text returned unchanged."""


class InsufficientMatches(StylokitWarning):
    """Fewer pattern matches than requested; partial result returned."""
