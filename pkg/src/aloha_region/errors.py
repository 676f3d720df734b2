"""Exception types shared across the package."""


class AlohaError(Exception):
    """Base class for all package errors."""


class NonConvergence(AlohaError):
    """An iterative solver ran out of its step budget."""


class NotOnFacet(AlohaError):
    """A contention vector was expected to sum to one and does not."""


class InvalidCenter(AlohaError):
    """A sphere or ellipsoid center lies below the family minimum."""


class OutOfExtent(AlohaError):
    """A cross-section height lies outside the ellipsoid."""


class DimensionTooLarge(AlohaError):
    """An exact computation was requested above the configured dimension cap."""


class DegenerateEstimate(AlohaError):
    """A Monte-Carlo estimate of zero leaves the relative CI undefined."""


class SamplingExhausted(AlohaError):
    """Rejection sampling failed to produce enough members within budget."""
