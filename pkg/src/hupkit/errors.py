"""Exception and warning types shared across the package."""


class HupkitError(Exception):
    """Base class for all hupkit errors."""


class DomainError(HupkitError, ValueError):
    """A point or interval lies outside the domain of a map."""


class DomainMismatch(HupkitError, ValueError):
    """Two maps cannot be composed because their domains do not line up."""


class InvalidInterval(HupkitError, ValueError):
    pass


class InvalidGapSet(HupkitError, ValueError):
    pass


class DegenerateInterval(HupkitError, ValueError):
    """Interval too short to carry a bump function."""


class FixedPointInsideInterval(HupkitError, ValueError):
    pass


class ShrinkFailed(HupkitError, RuntimeError):
    """No sub-interval separated from its first two images was found."""


class OrbitOverlap(HupkitError, RuntimeError):
    """Orbit-chain pieces that must be disjoint overlap."""


class DegenerateDirections(HupkitError, ValueError):
    pass


class DegenerateConic(HupkitError, ValueError):
    pass


class LightlikeNormal(HupkitError, ValueError):
    """A hyperplane normal u has Q(u) = 0; use the single-hyperplane rule."""


class CriterionMismatch(HupkitError, AssertionError):
    """Two formulas that must agree produced different answers."""


class InstanceError(HupkitError, ValueError):
    """Malformed or unsupported problem instance."""


class CertificateMismatch(HupkitError, ValueError):
    """A certificate does not belong to the instance it is checked against."""


class TruncationWarning(UserWarning):
    """A geometric gap family was cut at its truncation depth."""
