"""Error taxonomy for the experiment harness."""


class HarnessError(Exception):
    """Base class for all harness errors."""


class FormatError(HarnessError):
    """A manifest, assignment, or feature file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class UnknownModel(HarnessError):
    def __init__(self, name: str):
        super().__init__(f"unknown model {name!r}")
        self.name = name


class MissingImage(HarnessError):
    def __init__(self, scan_id: str, path):
        super().__init__(f"no volume for scan {scan_id!r} at {path}")
        self.scan_id = scan_id
        self.path = path


class IncompatibleAssignment(HarnessError):
    """The assignment does not cover the manifest, or leaves nothing to test."""
