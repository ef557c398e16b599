"""Common exception base for the package.

Every error raised by cohortsplit derives from CohortSplitError so the CLI
can map any domain failure to exit code 1 without enumerating subclasses.
"""


class CohortSplitError(Exception):
    """Base class for all cohortsplit errors."""


class EmptyInput(CohortSplitError):
    """Raised when an operation requiring input records receives none."""
