"""Exception hierarchy.

Everything raised on bad input or an unusable numerical regime derives from
``RBMError`` so the CLI can map it to exit code 2.
"""


class RBMError(ValueError):
    pass


class NonElliptic(RBMError):
    pass


class NotSymmetric(RBMError):
    pass


class SymmetryRequired(NotSymmetric):
    pass


class ComplexRoots(RBMError):
    pass


class OnCut(RBMError):
    pass


class NotOnCut(RBMError):
    pass


class RegionAmbiguous(RBMError):
    pass


class StuckAtCorner(RBMError):
    pass


class NotRecurrent(RBMError):
    pass


class DomainViolation(RBMError):
    pass


class InsufficientBoundaryVisits(RBMError):
    pass


class MissingEstimate(RBMError):
    pass


class CutoffTooTight(RBMError):
    pass


class DeltaZero(RBMError):
    pass


class CoefficientZero(RBMError):
    pass


class OutsideDomain(RBMError):
    pass


class SingularSystem(RBMError):
    pass


class PoleSuspected(RBMError):
    pass


class OutsideWedge(RBMError):
    pass


class NotInFamily(RBMError):
    pass


class PoleNearby(RBMError):
    pass
