"""Exception types raised by the estimators and the CLI."""


class RectmError(Exception):
    """Base class for estimation failures."""


class EmptyNeighborhoodError(RectmError):
    """No observation carries positive kernel weight at the target point."""


class DegeneratePointError(RectmError):
    """The survival-ratio denominator vanishes (all local responses tie)."""


class NonPositiveExpectileError(RectmError):
    """A log of a non-positive expectile estimate was requested."""


class MomentExistenceError(RectmError):
    """k * gamma >= 1: the requested tail moment does not exist."""


class ConvergenceError(RectmError):
    """Root search exhausted its iteration budget."""


class SelectionError(RectmError):
    """Every candidate in a cross-validation grid failed to score."""


class OracleError(RectmError):
    """Quadrature or root search inside a ground-truth oracle failed."""


class ConfigurationError(Exception):
    """Invalid run configuration (CLI exit status 2)."""


class DataError(Exception):
    """Unusable input data (CLI exit status 3)."""
