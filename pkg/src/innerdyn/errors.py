"""Exception types shared across the solver and evaluation modules."""


class NumericsError(Exception):
    """Base class for numeric failures; message carries partial results."""


class PoleProximity(NumericsError):
    """Evaluation point is too close to a pole for double precision."""


class PoleHit(NumericsError):
    """An orbit iterate landed within tolerance of a pole."""


class NoConvergence(NumericsError):
    """Iterative solve exhausted its budget without meeting tolerance."""


class DerivativeVanishes(NumericsError):
    """Newton step undefined: derivative below tolerance at an iterate."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the operation."""


class AtomProximity(NumericsError):
    """Evaluation too close to a point mass on the unit circle."""


class AccuracyUnreachable(NumericsError):
    """Requested truncation accuracy would exceed the term cap."""


class NotInBasin(NumericsError):
    """Orbit of the probe point does not converge to the fixed point."""


class Inconclusive(NumericsError):
    """Sampled orbits disagree; no common limit detected."""


class OutsideRegion(NumericsError):
    """Solver returned parameters violating the attracting region; a bug, not data."""


class BasinEscape(NumericsError):
    """A probe critical point's orbit failed to converge to the target."""


class WindowBoundaryZero(NumericsError):
    """A zero lies within tolerance of the counting-window boundary."""


class ResolutionWarning(UserWarning):
    """A raster component is suspiciously small; grid may be undersampled."""
