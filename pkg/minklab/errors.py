"""
Exception hierarchy for minklab
"""


class MinklabError(Exception):
    """Base class for every error raised by minklab"""


class SpecError(MinklabError):
    """A norm, surface or run configuration could not be accepted"""


class ParseError(SpecError):
    """Malformed spec document"""


class InvalidSpec(SpecError):
    """Spec parsed but violates one of its invariants"""

    def __init__(self, invariant: str):
        super().__init__(invariant)
        self.invariant = invariant


class ConfigError(SpecError):
    """Unknown configuration key or bad tolerance override"""


class GeometryError(MinklabError):
    """A pointwise computation is not defined at the requested input"""


class DegeneratePoint(GeometryError):
    """Point too close to the origin (or to a surface centre)"""


class NotPositiveDefinite(GeometryError):
    """The fundamental tensor failed its Cholesky factorization"""


class DegeneratePlane(GeometryError):
    """Two vectors do not span a 2-plane"""


class FrameDegenerate(GeometryError):
    """Gram-Schmidt pivot fell below threshold"""


class ProjectionFailed(GeometryError):
    """Root-solve onto a surface did not converge"""


class DimensionTooSmall(GeometryError):
    """Operation needs a larger dimension"""


class NotProper(GeometryError):
    """Sampled mean curvature vanishes"""


class ZeroVector(GeometryError):
    """A non-zero vector was required"""


class UnsupportedOrder(GeometryError):
    """Requested jet order outside the supported range"""
