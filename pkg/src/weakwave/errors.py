"""Exception hierarchy.

Two families: ``ValueError`` subclasses for malformed input, and
``PhysicsDomainError`` for well-formed requests that land outside the
domain where a quantity is defined (dark ports, profile nodes, ...).
The CLI maps the first family to exit code 2 and the second to 3.
"""


class WeakWaveError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(WeakWaveError, ValueError):
    pass


class ZeroVector(WeakWaveError, ValueError):
    pass


class NonCenteredProfile(WeakWaveError, ValueError):
    pass


class ConfigError(WeakWaveError, ValueError):
    pass


class PhysicsDomainError(WeakWaveError):
    """A quantity is undefined (or numerically meaningless) at the requested point."""


class OrthogonalPostselection(PhysicsDomainError):
    """Pre- and postselection are (numerically) orthogonal, so P -> 0."""


class NodePoint(PhysicsDomainError):
    """The pointer amplitude vanishes, so its logarithmic derivative diverges."""


class ZeroPostselectedIntensity(PhysicsDomainError):
    pass


class ZeroDensity(PhysicsDomainError):
    pass


class DegenerateAmplifier(PhysicsDomainError):
    """The weak-value part that would divide the centroid is zero."""


class SmallOverlap(PhysicsDomainError):
    pass
