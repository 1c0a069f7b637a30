"""Exception hierarchy.

Every failure raised by the library derives from ``AdsPolyError``.  The three
intermediate classes decide the CLI exit code: domain violations exit with 2,
refusals (size bounds) with 3 and numerical failures with 4.
"""


class AdsPolyError(Exception):
    """Base class for all library errors."""


class DomainError(AdsPolyError, ValueError):
    """Input is outside the mathematical domain of the operation."""


class RefusalError(AdsPolyError):
    """The operation refuses to run because a size bound was exceeded."""


class NumericalError(AdsPolyError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


# hs_kernel
class CoincidentPoints(DomainError):
    pass


class DegenerateConfiguration(DomainError):
    pass


class PointOnQuadric(DomainError):
    pass


class NotOnQuadric(DomainError):
    pass


class NotDiagonal(DomainError):
    pass


class NotDistinct(DomainError):
    pass


class WrongCyclicOrder(DomainError):
    """Three boundary points whose cyclic order no orientation-preserving map can fix."""


class NotInIdentityComponent(DomainError):
    pass


# graphs
class InvalidGraph(DomainError):
    pass


class NotATriangulation(DomainError):
    pass


class EquatorEdge(DomainError):
    pass


class NonFlippable(DomainError):
    pass


class TooLarge(RefusalError):
    pass


# polyhedron
class InvalidPolyhedron(DomainError):
    pass


class NotConvex(InvalidPolyhedron):
    pass


class VertexInsideAdS(InvalidPolyhedron):
    pass


class EdgeMissesAdS(InvalidPolyhedron):
    def __init__(self, message: str, edge: tuple[int, int] | None = None):
        super().__init__(message)
        self.edge = edge


class NonSpacelikeFace(InvalidPolyhedron):
    pass


class NoHamiltonianEquator(InvalidPolyhedron):
    pass


class DegenerateHull(InvalidPolyhedron):
    pass


class OutOfChart(InvalidPolyhedron):
    pass


class InvalidEdge(DomainError):
    pass


class SamplingFailed(NumericalError):
    pass


# duality
class DegenerateDual(DomainError):
    pass


class NotHyperideal(DomainError):
    pass


class NotIdeal(DomainError):
    pass


class SingularRay(DomainError):
    pass


class SingularVertex(DomainError):
    pass


# rigidity
class OnLightCone(DomainError):
    pass


class OnQuadric(DomainError):
    pass


class DegenerateSamples(DomainError):
    pass


class InvalidTriangulation(DomainError):
    pass


# realization
class NotAdmissible(DomainError):
    pass


class CombinatoricsChanged(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass
