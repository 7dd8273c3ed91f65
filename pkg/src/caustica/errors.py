"""Exception hierarchy shared by every caustica module."""


class GeometryError(ValueError):
    """Base class for all geometric precondition failures."""


# projective primitives
class NotInPencil(GeometryError):
    pass


class NotConcurrent(NotInPencil):
    pass


class DegenerateQuadruple(GeometryError):
    pass


class DegeneratePencil(GeometryError):
    pass


class DegenerateConic(GeometryError):
    pass


class SingularMap(GeometryError):
    pass


class ZeroVector(GeometryError):
    pass


# reflections
class CoincidentEigenlines(GeometryError):
    pass


class DegenerateRestriction(GeometryError):
    pass


class TangentLine(GeometryError):
    pass


class LineInConic(GeometryError):
    pass


class NotThroughQ(GeometryError):
    pass


# tables and dynamics
class SingularPoint(GeometryError):
    pass


class OffBoundary(GeometryError):
    pass


class NoIntersection(GeometryError):
    """The oriented line does not meet the table again (escape)."""


class SingularReflection(GeometryError):
    pass


class OutsideDomain(GeometryError):
    pass


# integrals
class ZeroVelocity(GeometryError):
    pass


class InvalidCase(GeometryError):
    pass


class OnPolarLocus(GeometryError):
    pass


class ProportionalConics(GeometryError):
    pass


class NotHomogeneous(GeometryError):
    pass


# pencils and caustics
class SingularParameter(GeometryError):
    pass


class SingularCurvePoint(GeometryError):
    pass


class SelfOrthogonalTangent(GeometryError):
    pass


class AlphaEqualsC(GeometryError):
    pass


class UnsupportedSignature(GeometryError):
    pass


class LiftDomainEmpty(GeometryError):
    pass


class RankMismatch(GeometryError):
    pass


class NoConvergence(GeometryError):
    pass


# experiment runner
class ConfigParse(ValueError):
    pass
