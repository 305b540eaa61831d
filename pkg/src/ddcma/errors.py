"""Exception hierarchy shared by all ddcma modules."""


class DDCMAError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(DDCMAError, ValueError):
    """Invalid strategy parameter, problem name or CLI option."""


class ProtocolError(DDCMAError, RuntimeError):
    """ask/tell called out of order or with mismatched arguments."""


class EvaluationError(DDCMAError, ValueError):
    """An objective value is not finite.

    ``index`` is the position of the offending candidate in the list
    returned by ``ask``.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalError(DDCMAError, ArithmeticError):
    """Floating point blow-up (NaN/inf, overflow of sigma or D)."""


class DegeneracyError(NumericalError):
    """A matrix that must be positive definite is not."""
