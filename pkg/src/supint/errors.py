"""Exception hierarchy shared by the library and the command line."""


class SupintError(Exception):
    """Base class for all library errors."""


class ValidationError(SupintError, ValueError):
    """Parameters or states violate a documented invariant."""


class SingularStateError(ValidationError):
    """A coordinate with a positive centrifugal coefficient is (numerically) zero."""


class UnsupportedRegimeError(SupintError):
    """The requested computation is only defined for another parameter regime."""


class NumericalFailure(SupintError, ArithmeticError):
    """An iterative solve failed to converge or left its domain."""
