"""Exception hierarchy shared by all modules."""


class ResonanceError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameter(ResonanceError, ValueError):
    """Input outside the admissible domain (non-finite, out of range)."""


class NotApplicable(ResonanceError):
    """Operation undefined for the given (usually degenerate) parameters."""


class DegenerateGerm(NotApplicable):
    """Germ undefined because A = +-C."""


class UseDegenerateBranch(NotApplicable):
    """Generic formula breaks down; a dedicated degenerate routine exists."""


class DegenerateContact(NotApplicable):
    """Tangency with a whole arc instead of an isolated point."""


class NonRegularValue(ResonanceError):
    """(E, h) is not a regular value with a usable torus."""


class DegenerateRoots(NonRegularValue):
    """Turning points too close together for quadrature."""


class PoleOnPath(ResonanceError):
    """A turning point sits on a vertex Z = +-E."""


class StepFailure(ResonanceError):
    """Integrator failed or drifted beyond tolerance."""


class DriftError(StepFailure):
    """Conserved quantity drifted beyond tolerance."""


class InvalidSeed(InvalidParameter):
    """Section seed not on the requested energy level."""


class InvalidC2(InvalidParameter):
    """Lagrange expansion coefficient gives a negative radicand."""
