"""Exception hierarchy shared by the solver library and the command-line harness."""


class VemsolverError(Exception):
    """Base class. ``status`` is the CLI exit code, ``category`` its machine-readable name."""

    status = 1
    category = "error"


class ConfigError(VemsolverError):
    status = 2
    category = "parse"


class DomainError(VemsolverError, ValueError):
    status = 2
    category = "domain"


class InputError(VemsolverError, ValueError):
    status = 2
    category = "input"


class TruncationError(InputError):
    """A target function is not representable by the retained eigenfunctions."""


class AccuracyError(VemsolverError):
    status = 3
    category = "numerical"

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


class ConvergenceError(VemsolverError):
    status = 3
    category = "numerical"

    def __init__(self, message: str, residual: float, mode: int | None = None):
        where = f" in mode {mode}" if mode is not None else ""
        super().__init__(f"{message}{where} (last residual {residual:.3e})")
        self.residual = residual
        self.mode = mode


class ResolutionError(VemsolverError):
    status = 3
    category = "numerical"


class InvariantViolation(VemsolverError):
    status = 4
    category = "invariant"


class OutputError(VemsolverError):
    status = 5
    category = "io"
