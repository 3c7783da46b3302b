"""Exception hierarchy shared by the library and the command line."""


class NetPerturbError(Exception):
    """Base class for all errors raised by netperturb."""

    exit_code = 1


class ConfigError(NetPerturbError, ValueError):
    """Invalid configuration. Carries every violation found, not just the first."""

    exit_code = 2

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class NetPerturbIOError(NetPerturbError, OSError):
    """Reading or writing a file failed."""

    exit_code = 4


class DegeneracyError(NetPerturbError):
    """A computation hit a degenerate case that cannot be recovered from."""

    exit_code = 3


class StageError(NetPerturbError):
    """A pipeline stage failed; wraps the original error with its coordinates."""

    def __init__(self, stage, coordinate, cause):
        self.stage = stage
        self.coordinate = coordinate
        self.cause = cause
        where = "/".join(str(c) for c in coordinate if c is not None)
        super().__init__(f"stage '{stage}' failed at {where or '-'}: {cause}")
        self.exit_code = getattr(cause, "exit_code", 1)

    def __reduce__(self):
        # keeps the exception picklable across worker processes
        return (StageError, (self.stage, self.coordinate, self.cause))
