"""Exception types; the command line maps them to exit codes."""


class ConfigError(ValueError):
    """Malformed or out-of-range configuration (exit code 2)."""


class InfeasibleError(ValueError):
    """The requested object does not exist mathematically (exit code 3)."""


class NumericalError(RuntimeError):
    """An iteration failed to converge or a scheme broke down (exit code 4)."""
