"""Exception types raised across the package."""


class ParityError(ValueError):
    """Quantum numbers (N, m) with N + m odd."""


class CutoffError(ValueError):
    """A Fock state lies outside the truncated basis."""


class DomainError(ValueError):
    """Parameters outside the region where the tilting solution exists.

    ``argument`` names the quantity that left its domain.
    """

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class UnstableError(DomainError):
    """Classical normal-mode frequency squared is not positive."""


class NotAntiHermitian(ValueError):
    pass


class KindMismatch(ValueError):
    pass


class LeakageError(RuntimeError):
    """Norm escaped the truncated space beyond the allowed bound."""


class NoConvergence(RuntimeError):
    pass


class ConfigError(ValueError):
    """Invalid command-line or config-file input; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
