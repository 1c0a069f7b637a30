"""Linear algebra over R^{2,2}: the AdS quadric, Hilbert distance, polarity and isometries.

Conventions used throughout the package:

* The form is <x, y> = x1 y1 + x2 y2 - x3 y3 - x4 y4.  AdS is {<x,x> < 0},
  its boundary quadric is {<x,x> = 0} and the dual region AdS* is {<x,x> > 0}.
* The working affine chart is x4 = 1.  In it AdS is x1^2 + x2^2 - x3^2 < 1.
* R^{2,2} is identified with 2x2 real matrices through ``to_matrix``; the form
  becomes -det.  A pair (A, B) of unimodular matrices acts by X -> A X B^-1, and a
  rank-one matrix a (J b)^T is the boundary point with left/right parameters
  a0/a1 and b0/b1.  With this choice (A, B) moves the parameters by the Moebius
  maps of A and B respectively.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .errors import (
    CoincidentPoints,
    DegenerateConfiguration,
    DomainError,
    NotDiagonal,
    NotDistinct,
    NotInIdentityComponent,
    NotOnQuadric,
    PointOnQuadric,
    WrongCyclicOrder,
)

FORM = np.diag([1.0, 1.0, -1.0, -1.0])
DEFAULT_TOL = 1e-9
_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def inner(x, y):
    """Signature-(2,2) bilinear form; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]


def canonical(v) -> np.ndarray:
    """Unit Euclidean norm, first clearly nonzero coordinate positive."""
    v = np.asarray(v, dtype=float).reshape(4)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise DomainError("homogeneous coordinates must be finite and nonzero")
    v = v / n
    for c in v:
        if abs(c) > 1e-12:
            if c < 0:
                v = -v
            break
    return v


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class PointLocation(Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


class LineType(Enum):
    SPACELIKE_A = "SpacelikeA"
    TIMELIKE_B = "TimelikeB"
    DUAL_SPACELIKE_C = "DualSpacelikeC"
    LIGHTLIKE_D = "LightlikeD"


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of RP^3 stored by its canonical representative."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(canonical(self.coords)))

    @classmethod
    def from_chart(cls, x) -> "ProjectivePoint":
        x = np.asarray(x, dtype=float).reshape(3)
        return cls(np.append(x, 1.0))

    def chart_lift(self) -> np.ndarray:
        """Representative with x4 > 0 when the point lies in the working chart."""
        c = np.array(self.coords)
        if abs(c[3]) > 1e-14 and c[3] < 0:
            c = -c
        return c

    def chart(self) -> np.ndarray:
        c = self.coords
        if abs(c[3]) < 1e-14:
            raise DomainError("point lies at infinity of the chart x4 = 1")
        return c[:3] / c[3]

    def self_inner(self) -> float:
        return float(inner(self.coords, self.coords))

    def isclose(self, other: "ProjectivePoint", tol: float = 1e-10) -> bool:
        return _projective_gap(self.coords, other.coords) <= tol

    def __repr__(self):
        return f"ProjectivePoint({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class ProjectivePlane:
    """The plane {y : <y, covector> = 0}."""

    covector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "covector", _frozen(canonical(self.covector)))

    def is_spacelike(self, tol: float = DEFAULT_TOL) -> bool:
        return float(inner(self.covector, self.covector)) < -tol

    def contains(self, p: ProjectivePoint, tol: float = 1e-9) -> bool:
        return abs(float(inner(self.covector, p.coords))) <= tol

    def __repr__(self):
        return f"ProjectivePlane({np.array2string(self.covector, precision=6)})"


@dataclass(frozen=True)
class ComplexDistance:
    re: float
    im: float

    def __post_init__(self):
        if not (-math.pi < self.im <= math.pi):
            raise ValueError("imaginary part must lie in (-pi, pi]")

    def __complex__(self):
        return complex(self.re, self.im)


def as_point(p) -> ProjectivePoint:
    return p if isinstance(p, ProjectivePoint) else ProjectivePoint(p)


def _projective_gap(u, v) -> float:
    u = canonical(u)
    v = canonical(v)
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def classify_point(p, tol: float = DEFAULT_TOL) -> PointLocation:
    q = as_point(p).self_inner()
    if q < -tol:
        return PointLocation.INTERIOR
    if q > tol:
        return PointLocation.EXTERIOR
    return PointLocation.BOUNDARY


def _line_coefficients(p: ProjectivePoint, q: ProjectivePoint):
    x = p.chart_lift()
    y = q.chart_lift()
    return x, y, float(inner(x, x)), float(inner(x, y)), float(inner(y, y))


def classify_line(p, q, tol: float = DEFAULT_TOL) -> LineType:
    """Type of the projective line through p and q.

    The sign of the discriminant of t -> <p + t q, p + t q> decides between two
    real intersections with the quadric, a tangent line and a line missing the
    quadric; in the last case the sign of <p, p> tells AdS from AdS*.
    """
    p, q = as_point(p), as_point(q)
    if _projective_gap(p.coords, q.coords) < 1e-12:
        raise CoincidentPoints("points are projectively equal")
    _, _, a, b, c = _line_coefficients(p, q)
    disc = b * b - a * c
    if disc > tol:
        return LineType.SPACELIKE_A
    if disc >= -tol:
        return LineType.LIGHTLIKE_D
    return LineType.TIMELIKE_B if a < 0 else LineType.DUAL_SPACELIKE_C


def _is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def cross_ratio(x, y, a, b) -> complex:
    """(x, y; a, b) = (x - a)(y - b) / ((y - a)(x - b)); one argument may be infinite."""
    vals = [complex(v) for v in (x, y, a, b)]
    infs = [_is_inf(v) for v in vals]
    if sum(infs) > 1:
        raise DegenerateConfiguration("at most one point may be at infinity")
    x, y, a, b = vals
    num = [x - a, y - b]
    den = [y - a, x - b]
    # drop the two factors that contain the point at infinity
    if infs[0]:
        num[0], den[1] = 1, 1
    elif infs[1]:
        num[1], den[0] = 1, 1
    elif infs[2]:
        num[0], den[0] = 1, 1
    elif infs[3]:
        num[1], den[1] = 1, 1
    d = den[0] * den[1]
    if d == 0:
        raise DegenerateConfiguration("a denominator of the cross-ratio vanishes")
    return num[0] * num[1] / d


def _ordered_intersections(a_self: float, b: float, c: float) -> tuple[complex, complex]:
    """Intersections of the line with the quadric, in the order (a, b) used by d_H.

    Points of the line are x + t y with x at t = 0 and y at t = infinity, lifts
    taken in the working chart so that t > 0 sweeps the chart segment from x to
    y.  The order is fixed so that the distance table holds: for x in AdS the
    root of smaller modulus comes first (real case) or the root in the upper
    half-plane (complex case); for x in AdS* both choices flip.
    """
    disc = b * b - a_self * c
    from_ads = a_self < 0
    if disc >= 0:
        s = math.sqrt(disc)
        r1, r2 = (-b + s) / c, (-b - s) / c
        small, large = (r1, r2) if abs(r1) <= abs(r2) else (r2, r1)
        return (complex(small), complex(large)) if from_ads else (complex(large), complex(small))
    s = math.sqrt(-disc)
    r1, r2 = complex(-b, s) / c, complex(-b, -s) / c
    upper, lower = (r1, r2) if r1.imag > 0 else (r2, r1)
    return (upper, lower) if from_ads else (lower, upper)


def hilbert_distance(x, y, tol: float = DEFAULT_TOL) -> ComplexDistance:
    """Complex Hilbert distance -1/2 Log (x, y; a, b) with the principal branch.

    Values follow the usual table: a pair in AdS on a line crossing the quadric
    gets a positive real distance, a pair in one component of AdS* a negative
    one, timelike lines give imaginary values.  Imaginary parts of the
    principal branch lie in [-pi/2, pi/2), so entries of the table written as
    i*pi/2 + r or i*pi + r are met modulo i*pi.
    """
    p, q = as_point(x), as_point(y)
    if abs(p.self_inner()) <= tol or abs(q.self_inner()) <= tol:
        raise PointOnQuadric("Hilbert distance is undefined on the quadric")
    if _projective_gap(p.coords, q.coords) < 1e-12:
        return ComplexDistance(0.0, 0.0)
    if classify_line(p, q, tol) is LineType.LIGHTLIKE_D:
        return ComplexDistance(0.0, 0.0)
    _, _, a_self, b, c = _line_coefficients(p, q)
    ra, rb = _ordered_intersections(a_self, b, c)
    cr = cross_ratio(0.0, math.inf, ra, rb)
    d = -0.5 * cmath.log(cr)
    im = d.imag
    if im <= -math.pi:
        im += 2 * math.pi
    return ComplexDistance(float(d.real) + 0.0, float(im) + 0.0)


def dual(obj):
    """Polarity of the form: point <-> plane, involutive."""
    if isinstance(obj, ProjectivePlane):
        return ProjectivePoint(obj.covector)
    return ProjectivePlane(as_point(obj).coords)


# --- matrix model and boundary parameters -------------------------------------------


def to_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([[x[2] + x[0], x[1] + x[3]], [x[1] - x[3], x[2] - x[0]]])


def from_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return np.array(
        [(m[0, 0] - m[1, 1]) / 2, (m[0, 1] + m[1, 0]) / 2, (m[0, 0] + m[1, 1]) / 2, (m[0, 1] - m[1, 0]) / 2]
    )


def _rp1_vector(z) -> np.ndarray:
    if _is_inf(z):
        return np.array([1.0, 0.0])
    return np.array([float(z), 1.0])


def _rp1_value(v) -> float:
    if abs(v[1]) <= 1e-15 * max(1.0, abs(v[0])):
        return math.inf
    return float(v[0] / v[1])


def _rp1_gap(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return abs(u[0] * v[1] - u[1] * v[0]) / (np.linalg.norm(u) * np.linalg.norm(v))


def _boundary_vectors(p: ProjectivePoint, tol: float) -> tuple[np.ndarray, np.ndarray]:
    if classify_point(p, tol) is not PointLocation.BOUNDARY:
        raise NotOnQuadric("boundary parameters need a point on the quadric")
    m = to_matrix(p.coords)
    col = m[:, 0] if np.linalg.norm(m[:, 0]) >= np.linalg.norm(m[:, 1]) else m[:, 1]
    row = m[0, :] if np.linalg.norm(m[0, :]) >= np.linalg.norm(m[1, :]) else m[1, :]
    return col, np.array([row[1], -row[0]])


def boundary_param(p, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Left and right ruling parameters of a quadric point (math.inf for infinity)."""
    a, b = _boundary_vectors(as_point(p), tol)
    return _rp1_value(a), _rp1_value(b)


def boundary_point(xi_left, xi_right) -> ProjectivePoint:
    a = _rp1_vector(xi_left)
    b = _rp1_vector(xi_right)
    return ProjectivePoint(from_matrix(np.outer(a, _ROT @ b)))


# --- isometries ---------------------------------------------------------------------


def is_form_preserving(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.linalg.norm(m)) ** 2)
    return bool(np.max(np.abs(m.T @ FORM @ m - FORM)) <= tol * scale)


def in_identity_component(m: np.ndarray) -> bool:
    m = np.asarray(m, dtype=float)
    return bool(np.linalg.det(m) > 0 and np.linalg.det(m[:2, :2]) > 0)


def matrix_from_pair(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    binv = np.linalg.inv(np.asarray(b, dtype=float))
    cols = [from_matrix(a @ to_matrix(e) @ binv) for e in np.eye(4)]
    return np.column_stack(cols)


def _solve_moebius(sources, targets) -> np.ndarray:
    """2x2 matrix M with M s_i proportional to t_i for three RP^1 vectors."""
    rows = []
    for s, t in zip(sources, targets):
        # (M s) x t = 0 is linear in the entries of M
        rows.append([s[0] * t[1], s[1] * t[1], -s[0] * t[0], -s[1] * t[0]])
    _, _, vt = np.linalg.svd(np.array(rows))
    return vt[-1].reshape(2, 2)


def pair_from_matrix(m, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Recover (A, B) from the boundary action of an isometry matrix."""
    m = np.asarray(m, dtype=float)
    params = [0.0, 1.0, math.inf]
    left_src, left_dst, right_src, right_dst = [], [], [], []
    for z in params:
        img = ProjectivePoint(m @ boundary_point(z, 0.0).coords)
        a, _ = _boundary_vectors(img, 1e-7)
        left_src.append(_rp1_vector(z))
        left_dst.append(a)
        img = ProjectivePoint(m @ boundary_point(0.0, z).coords)
        _, b = _boundary_vectors(img, 1e-7)
        right_src.append(_rp1_vector(z))
        right_dst.append(b)
    mats = []
    for src, dst in ((left_src, left_dst), (right_src, right_dst)):
        g = _solve_moebius(src, dst)
        det = np.linalg.det(g)
        if det <= 0:
            raise NotInIdentityComponent("boundary action reverses the orientation of a ruling")
        mats.append(g / math.sqrt(det))
    a, b = mats
    rebuilt = matrix_from_pair(a, b)
    # the pair is defined up to a common sign of the projective matrix
    k = float(np.sum(rebuilt * m) / np.sum(rebuilt * rebuilt))
    if k < 0:
        a = -a
        rebuilt = -rebuilt
        k = -k
    if np.max(np.abs(rebuilt * k - m)) > tol * max(1.0, float(np.abs(m).max())):
        raise DomainError("matrix is not induced by a pair of unimodular matrices")
    return a, b


@dataclass(frozen=True, eq=False)
class Isometry:
    """An element of the identity component of O(2,2), optionally with its pair form."""

    matrix: np.ndarray
    pair: tuple[np.ndarray, np.ndarray] | None = field(default=None)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (4, 4):
            raise DomainError("isometry matrix must be 4x4")
        if not is_form_preserving(m):
            raise DomainError("matrix does not preserve the (2,2) form")
        if not in_identity_component(m):
            raise NotInIdentityComponent("matrix is outside the identity component")
        object.__setattr__(self, "matrix", m)
        if self.pair is not None:
            a, b = (_frozen(g) for g in self.pair)
            object.__setattr__(self, "pair", (a, b))

    @classmethod
    def from_pair(cls, a, b) -> "Isometry":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        for g in (a, b):
            if abs(np.linalg.det(g) - 1.0) > 1e-9:
                raise DomainError("pair factors must be unimodular")
        return cls(matrix_from_pair(a, b), (a, b))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(4), (np.eye(2), np.eye(2)))

    def with_pair(self) -> "Isometry":
        if self.pair is not None:
            return self
        return Isometry(self.matrix, pair_from_matrix(self.matrix))

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        pair = None
        if self.pair is not None and other.pair is not None:
            pair = (self.pair[0] @ other.pair[0], self.pair[1] @ other.pair[1])
        return Isometry(self.matrix @ other.matrix, pair)

    def inverse(self) -> "Isometry":
        inv = FORM @ self.matrix.T @ FORM
        pair = None
        if self.pair is not None:
            pair = (np.linalg.inv(self.pair[0]), np.linalg.inv(self.pair[1]))
        return Isometry(inv, pair)

    def apply_lifted(self, vectors) -> np.ndarray:
        """Linear action on raw 4-vectors (rows), keeping representatives."""
        return np.asarray(vectors, dtype=float) @ self.matrix.T

    def __call__(self, p):
        return apply_isometry(self, p)


def apply_isometry(g: Isometry, p):
    if isinstance(p, ProjectivePlane):
        # the covector is taken with respect to the form, so it moves like a point
        return ProjectivePlane(g.matrix @ p.covector)
    return ProjectivePoint(g.matrix @ as_point(p).coords)


def moebius(m: np.ndarray, z) -> float:
    return _rp1_value(np.asarray(m, dtype=float) @ _rp1_vector(z))


def pure_translation(lam: float) -> Isometry:
    """Translation by lam along the axis with boundary ends (0,0) and (inf,inf)."""
    d = np.diag([math.exp(lam / 2), math.exp(-lam / 2)])
    return Isometry.from_pair(d, d)


def _triple_moebius(vecs) -> np.ndarray:
    """Unimodular M sending three RP^1 vectors to 0, 1 and infinity."""
    alpha, beta, gamma = (v / np.linalg.norm(v) for v in vecs)
    for u, v in ((alpha, beta), (beta, gamma), (alpha, gamma)):
        if _rp1_gap(u, v) <= 1e-9:
            raise NotDistinct("the three boundary points must be distinct")
    # columns of the inverse map: infinity -> gamma, 0 -> alpha, 1 -> beta
    s, t = np.linalg.solve(np.column_stack([gamma, alpha]), beta)
    inv = np.column_stack([s * gamma, t * alpha])
    det = np.linalg.det(inv)
    if det <= 0:
        raise WrongCyclicOrder("triple is negatively ordered on the circle; swap two points")
    return np.linalg.inv(inv / math.sqrt(det))


def normalize_boundary_triple(p, q, r, tol: float = 1e-9) -> Isometry:
    """Isometry sending three quadric points to the points with parameters (0,0), (1,1), (inf,inf).

    Both rulings must see the triple in positive cyclic order, which holds for
    three points on the boundary circle of a spacelike plane taken in the same
    order as the diagonal.
    """
    lefts, rights = [], []
    for pt in (p, q, r):
        a, b = _boundary_vectors(as_point(pt), tol)
        lefts.append(a)
        rights.append(b)
    return Isometry.from_pair(_triple_moebius(lefts), _triple_moebius(rights))


def normalize_ideal_triple(p, q, r, tol: float = 1e-9) -> Isometry:
    """Isometry sending boundary points (A,A), (B,B), (C,C) to (0,0), (1,1), (inf,inf)."""
    vecs = []
    for pt in (p, q, r):
        a, b = _boundary_vectors(as_point(pt), tol)
        if _rp1_gap(a, b) > 1e-7:
            raise NotDiagonal("point does not have equal left and right parameters")
        vecs.append(a)
    m = _triple_moebius(vecs)
    return Isometry.from_pair(m, m)


# --- Lie algebra and random elements ------------------------------------------------


def lie_algebra_basis() -> list[np.ndarray]:
    """Six matrices A with A^T J + J A = 0, namely J (E_ij - E_ji)."""
    basis = []
    for i in range(4):
        for j in range(i + 1, 4):
            s = np.zeros((4, 4))
            s[i, j], s[j, i] = 1.0, -1.0
            basis.append(FORM @ s)
    return basis


_SL2_BASIS = [np.array([[1.0, 0.0], [0.0, -1.0]]), np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])]


def random_isometry(rng: np.random.Generator, scale: float = 0.5) -> Isometry:
    """exp of a random element of sl2 x sl2, returned with its pair form."""
    mats = []
    for _ in range(2):
        c = rng.normal(scale=scale, size=3)
        mats.append(expm(sum(ci * bi for ci, bi in zip(c, _SL2_BASIS))))
    return Isometry.from_pair(*mats)


def lift_chart(points: Sequence) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return np.hstack([pts, np.ones((len(pts), 1))])


def dehomogenize(vectors) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    if np.any(np.abs(v[..., 3]) < 1e-14):
        raise DomainError("point at infinity of the working chart")
    return v[..., :3] / v[..., 3:4]
