"""Exception hierarchy shared by every module."""


class ProptimeError(Exception):
    """Base class for all errors raised by this package."""


class SizeError(ProptimeError, ValueError):
    pass


class ShapeError(ProptimeError, ValueError):
    pass


class ContractError(ProptimeError, ValueError):
    pass


class StiffnessError(ProptimeError, ArithmeticError):
    pass


class DomainError(ProptimeError, ValueError):
    pass


class SubspaceError(ProptimeError, ValueError):
    pass


class DegenerateClockError(ProptimeError, ValueError):
    pass


class ConfigError(ProptimeError, ValueError):
    """Configuration problem; ``violations`` lists every failed guard."""

    def __init__(self, message, violations=None):
        self.violations = list(violations or [message])
        super().__init__(message if violations is None else "; ".join(self.violations))
