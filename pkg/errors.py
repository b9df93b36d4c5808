"""
Exception hierarchy for the PRDL toolkit.
"""


class PRDLError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidArgumentError(PRDLError, ValueError):
    """An argument violates a documented precondition."""


class EmptySetError(PRDLError):
    """An operation that needs at least one point received an empty set."""


class FormatError(PRDLError):
    """An input file does not follow its documented format."""


class ProjectionError(PRDLError):
    """A vertex cannot be projected (nonpositive depth)."""


class AnnotationError(PRDLError):
    """Part annotation could not be derived from the given targets."""


class NothingToFitError(PRDLError):
    """Every target part is empty and no landmarks were supplied."""


class ConfigError(PRDLError):
    """A run configuration file is malformed or fails validation."""
