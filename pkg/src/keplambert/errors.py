"""Exception types.

All inherit from ``ValueError`` (bad or unsupported input) or
``ArithmeticError`` (a numerical procedure failed) so callers can catch
broadly.
"""


class KeplerError(Exception):
    """Base class for library errors."""


class CollisionError(KeplerError, ArithmeticError):
    """Trajectory reached the collision guard; use the rectilinear extension."""


class RectilinearFamilyError(KeplerError, ValueError):
    """Endpoints on the same ray: only rectilinear arcs join them."""


class InfeasibleError(KeplerError, ValueError):
    """No arc satisfies the request (e.g. multi-revolution time too short)."""


class ParabolicError(KeplerError, ValueError):
    """Quantity undefined for a parabola (semimajor axis, second focus)."""


class NonperiodicError(KeplerError, ValueError):
    """Period requested for an orbit with H >= 0."""


class DegenerateError(KeplerError, ValueError):
    """Geometric degeneracy (antipodal directions, parallel tangents, ...)."""


class NonConvergenceError(KeplerError, ArithmeticError):
    """An iterative procedure hit its iteration cap."""


class VerificationError(KeplerError, AssertionError):
    """A cross-check between two independent computations disagreed."""
