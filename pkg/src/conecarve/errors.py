"""Exception hierarchy shared by every conecarve module."""


class ConecarveError(Exception):
    """Base class for all library errors."""


class PreconditionError(ConecarveError, ValueError):
    """An input violates a documented domain restriction."""


class PrecisionExhausted(ConecarveError, ArithmeticError):
    """Interval arithmetic stayed indecisive at the largest allowed precision."""


class Indecisive(ConecarveError):
    """Internal signal: the current precision cannot decide a comparison."""


class WindowInfeasible(ConecarveError):
    """No lattice point (m, n) lies in the requested cone slice."""


class CertificationError(ConecarveError):
    """An exact certificate check failed."""


class SizeGuardError(ConecarveError):
    """A problem is too large for the in-process exact solver."""
