"""Exception types shared across the package."""


class ZdlabError(Exception):
    """Base class for zdlab failures."""


class ConfigError(ZdlabError):
    """Invalid experiment configuration (CLI exit code 2)."""


class InfeasibleError(ZdlabError):
    """Requested target cannot be enforced (CLI exit code 3)."""


class ConvergenceError(ZdlabError):
    """Stationary solver failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateChainError(ZdlabError):
    """Determinant normalization is numerically degenerate."""


class StrategyTableError(ZdlabError):
    """A strategy table is missing an index or holds an invalid probability."""


class TraceParseError(ZdlabError):
    """Malformed contact-trace input."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number
