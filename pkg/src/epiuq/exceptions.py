"""Exception types shared across the package.

Input problems are ValueError subclasses, numerical breakdowns and
enumeration caps get their own classes so the CLI can map them to
distinct exit codes.
"""


class DataFormatError(ValueError):
    """A data file is malformed. Carries a 1-based line number when known."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        if prefix:
            message = f"{prefix}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class InfeasibleIntervalsError(ValueError):
    """Class-wise probability intervals describe an empty feasible set."""


class NumericalError(RuntimeError):
    """A numerical routine produced values outside its guaranteed range."""


class EnumerationCapError(RuntimeError):
    """An exact enumeration would exceed the configured size cap."""
