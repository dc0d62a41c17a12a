"""Exception hierarchy shared by the numerical and channel layers."""


class NumericalError(ArithmeticError):
    """Base class for failures of a numerical precondition or algorithm."""


class NotHermitian(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class NotCP(NotPSD):
    """The map's Choi matrix is not positive semidefinite."""


class NoConvergence(NumericalError):
    pass


class DimensionMismatch(ValueError):
    pass
