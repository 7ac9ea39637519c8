"""Exception hierarchy and CLI exit codes."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


class RoadsightError(Exception):
    """Base class for all roadsight errors."""

    exit_code = EXIT_INTERNAL


class ParameterError(RoadsightError):
    """Invalid parameter or configuration value."""

    exit_code = EXIT_USAGE


class IngestionError(RoadsightError):
    """Input data violates a structural invariant (too few stations, bad grade...)."""

    exit_code = EXIT_USAGE


class FormatError(RoadsightError):
    """Malformed input file. Carries the offending location."""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, offset: int | None = None):
        self.path = path
        self.line = line
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class OutOfRangeError(RoadsightError):
    """A curvilinear abscissa falls outside the trajectory range."""

    exit_code = EXIT_USAGE


class InfeasibleBrakingError(RoadsightError):
    """Braking term is non-positive: friction + grade below the feasibility floor."""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, s: float | None = None):
        self.s = s
        super().__init__(message)
