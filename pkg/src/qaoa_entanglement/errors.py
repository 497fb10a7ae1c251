"""Exception types raised across the package."""


class InvalidSizeError(ValueError):
    """Graph or register size outside the allowed range."""


class ConnectivityError(ValueError):
    """Operation requires a connected graph."""


class ShapeError(ValueError):
    """Array dimensions do not match."""


class ParameterError(ValueError):
    """Invalid numerical parameter (angle count, time step, Renyi index, ...)."""


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class InsufficientDataError(ValueError):
    """Not enough data points for the requested statistic or fit."""


class RankError(ValueError):
    """Degenerate design matrix in a least-squares fit."""


class SymmetryError(RuntimeError):
    """State violates the global spin-flip symmetry."""
