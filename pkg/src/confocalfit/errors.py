"""Exception hierarchy for confocalfit.

Every error carries a stable machine-readable ``code`` so the CLI can map
library failures onto JSON error reports without string matching.
"""


class ConfocalFitError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"


class RankDeficient(ConfocalFitError):
    """Point set does not span the ambient space (centered operator singular)."""

    code = "rank-deficient"


class DegenerateSpectrum(ConfocalFitError):
    """Two principal moments coincide; the pencil poles would collide."""

    code = "degenerate-spectrum"


class NotSymmetric(ConfocalFitError):
    code = "not-symmetric"


class DirectionParallel(ConfocalFitError):
    """Measurement direction is parallel to the hyperplane."""

    code = "direction-parallel"


class DirectionDegenerate(ConfocalFitError):
    code = "direction-degenerate"


class PointNotOnQuadric(ConfocalFitError):
    code = "point-not-on-quadric"


class InvalidSemiaxes(ConfocalFitError):
    code = "invalid-semiaxes"


class NonUnitMasses(ConfocalFitError):
    """Statistic requested for a point set whose masses are not all one."""

    code = "non-unit-masses"


class BadCovariance(ConfocalFitError):
    code = "bad-covariance"


class BadDegrees(ConfocalFitError):
    code = "bad-degrees"


class ZeroVector(ConfocalFitError):
    code = "zero-vector"


class NoEnvelope(ConfocalFitError):
    """No hyperplane attains the requested moment level."""

    code = "no-envelope"


class NoIntersection(ConfocalFitError):
    code = "no-intersection"


class NotEllipsoidType(ConfocalFitError):
    code = "not-ellipsoid-type"


class DegenerateFlat(ConfocalFitError):
    """Tangency parameters of the flat are not simple roots."""

    code = "degenerate-flat"


class ParseError(ConfocalFitError):
    code = "parse-error"


class EmptyDataset(ConfocalFitError):
    code = "empty-dataset"


class NotPlanar(ConfocalFitError):
    """Figure rendering is only available for two-dimensional data."""

    code = "not-planar"
