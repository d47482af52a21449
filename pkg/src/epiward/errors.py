"""Exception types shared across the package."""


class EpiwardError(Exception):
    """Base class for all package errors."""


class InvalidRatesError(EpiwardError, ValueError):
    """A transition or transmission rate violates its bounds."""


class InvalidStateError(EpiwardError, ValueError):
    """A compartment state has negative counts or an impossible total."""


class ZeroDenominatorError(EpiwardError, ZeroDivisionError):
    """The reproduction-number denominator i_r + i_h + i_u is zero."""


class ScheduleError(EpiwardError, ValueError):
    """A parameter schedule override is out of range or merges invalid."""


class SimulationDayError(EpiwardError):
    """A step failed mid-simulation; carries the failing day index."""

    def __init__(self, day: int, cause: Exception):
        super().__init__(f"simulation failed at day {day}: {cause}")
        self.day = day
        self.cause = cause


class ScenarioError(EpiwardError, ValueError):
    """A scenario window is out of horizon or its effect value is invalid."""


class EnsembleError(EpiwardError, ValueError):
    """Empty ensemble, or members/trajectories of mismatched shape."""


class CsvFormatError(EpiwardError, ValueError):
    """A CSV input failed validation; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(EpiwardError, ValueError):
    """A structured document failed schema validation; carries the field path."""

    def __init__(self, message: str, field_path: str = ""):
        super().__init__(message)
        self.field_path = field_path


class UnknownArtifactError(EpiwardError, ValueError):
    """A referenced artifact does not exist in the artifact store."""
