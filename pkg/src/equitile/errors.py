"""Exception hierarchy shared across the package."""


class EquitileError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EquitileError, ValueError):
    """Malformed or dimensionally inconsistent input."""


class AdmissibilityError(EquitileError, ValueError):
    """A weighted indicator has a cell whose weight block has zero norm."""


class RankDeficiencyError(EquitileError, ValueError):
    """A side-matrix block does not have full column rank."""


class NumericalError(EquitileError, RuntimeError):
    """A dense eigen/singular value solver failed to converge."""
