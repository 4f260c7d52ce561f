"""Exception hierarchy shared by the library and the command line front end."""


class CVKeyError(Exception):
    """Base class for all errors raised by :mod:`cvkey`."""


class DomainError(CVKeyError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConfigError(CVKeyError, ValueError):
    """Invalid run configuration (bad field value, conflicting options)."""


class NumericalConsistencyError(CVKeyError, ArithmeticError):
    """A computed intermediate violates a consistency check beyond tolerance."""


class TruncationError(NumericalConsistencyError):
    """Fock-space cutoff too small for the requested state."""


class DegenerateProjectionError(NumericalConsistencyError):
    """A photon-number projection has (numerically) vanishing probability."""


class SolverError(NumericalConsistencyError):
    """A boundary solver could not bracket or trust its root."""


class NoKeyError(CVKeyError):
    """No positive key rate exists where the solver needs one."""
