"""Hyperideal AdS polyhedra: construction from chart points, dihedral angles, induced metric, sampling.

A polyhedron keeps a consistent set of vertex lifts in R^{2,2} (all on one side
of every face plane), the outward face covectors n_F with <n_F, x> <= 0 on the
polyhedron, and its marked skeleton.  Isometries act on the lifts directly, so
everything measured from the lifts is invariant by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .admissibility import AngleAssignment
from .errors import (
    CombinatoricsChanged,
    DegenerateHull,
    DomainError,
    EdgeMissesAdS,
    InvalidEdge,
    InvalidPolyhedron,
    NoConvergence,
    NoHamiltonianEquator,
    NonSpacelikeFace,
    NotConvex,
    OutOfChart,
    SamplingFailed,
    VertexInsideAdS,
)
from .graphs import MarkedGraph, Side, require_valid, triangulation_admissible, _split_regions
from .hs_kernel import FORM, Isometry, PointLocation, ProjectivePlane, ProjectivePoint, classify_point, inner

MERGE_TOL = 1e-8
CLASSIFY_TOL = 1e-9
CUSP_TOL = 1e-8

FUTURE = "future"
PAST = "past"


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def time_field(x: np.ndarray) -> np.ndarray:
    """A timelike Killing field on AdS: the rotation of the (x3, x4) plane."""
    return np.array([0.0, 0.0, x[3], -x[2]])


def ads_point_on_edge(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """A point of AdS on the segment u + t w (t > 0) between its two quadric crossings."""
    u, w = _unit(u), _unit(w)
    a, b, c = inner(u, u), inner(u, w), inner(w, w)
    disc = b * b - a * c
    if disc <= 0 or b >= 0:
        raise EdgeMissesAdS("segment does not cross AdS")
    s = math.sqrt(disc)
    if abs(c) <= 1e-13:
        # w on the quadric: the crossings are at t = -a / (2b) and infinity
        t = 1.0 if abs(a) <= 1e-13 else -a / b
    else:
        t1, t2 = (-b - s) / c, (-b + s) / c
        t = math.sqrt(t1 * t2) if t1 > 1e-12 * t2 else t2 / 2
    return u + t * w


def cut_point(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Intersection of the segment from v to w with the polar plane of v."""
    return w * inner(v, v) - v * inner(v, w)


def _edge_normal_space(u: np.ndarray, w: np.ndarray):
    """Projector onto the form-complement of span(u, w), and a basis of that complement."""
    g = np.array([[inner(u, u), inner(u, w)], [inner(w, u), inner(w, w)]])
    ginv = np.linalg.inv(g)
    span = np.vstack([u, w])

    def proj(z):
        coeff = ginv @ np.array([inner(u, z), inner(w, z)])
        return z - coeff @ span

    basis = np.linalg.svd(span @ FORM)[2][2:]
    return proj, basis


def boost_angle(u, w, z1, z2, inside=None) -> float:
    """Signed exterior dihedral angle at the edge uw between half-planes towards z1 and z2.

    The directions d_i are the projections of z_i to the signature-(1,1) plane
    orthogonal to the edge.  Same spacelike quadrant (positive product) gives a
    non-positive angle, opposite quadrants a non-negative one.  The magnitude is
    an asinh of the Minkowski cross product, which stays accurate near zero.

    Given a point `inside` the solid, a nearly flat edge that bends away from it
    gets a negative angle, so the value passes smoothly through zero.
    """
    u, w, z1, z2 = (np.asarray(a, dtype=float) for a in (u, w, z1, z2))
    proj, basis = _edge_normal_space(u, w)
    d1, d2 = proj(z1), proj(z2)
    q1, q2, p = inner(d1, d1), inner(d2, d2), inner(d1, d2)
    e1 = d1 / math.sqrt(q1)
    # timelike unit vector completing e1 to an orthonormal basis of the plane
    cands = [b - inner(b, e1) * e1 for b in basis]
    t = max(cands, key=lambda c: -inner(c, c))
    t = t / math.sqrt(-inner(t, t))
    if p < 0 and inside is not None:
        side = inner(proj(np.asarray(inside, dtype=float)), t)
        return math.asinh(math.copysign(1.0, side) * inner(d2, t) / math.sqrt(q2))
    mag = math.asinh(abs(inner(d2, t)) / math.sqrt(q2))
    return -mag if p > 0 else mag


@dataclass(frozen=True, eq=False)
class HyperidealPolyhedron:
    lifts: np.ndarray
    faces: tuple[tuple[int, ...], ...]
    covectors: np.ndarray
    face_sides: tuple[str, ...]
    vertex_signs: tuple[str, ...]
    skeleton: MarkedGraph
    edge_faces: dict = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.lifts)

    @property
    def vertices(self) -> tuple[ProjectivePoint, ...]:
        return tuple(ProjectivePoint(x) for x in self.lifts)

    @property
    def face_planes(self) -> tuple[ProjectivePlane, ...]:
        return tuple(ProjectivePlane(c) for c in self.covectors)

    @property
    def interior(self) -> np.ndarray:
        return self.lifts.mean(axis=0)

    def chart_vertices(self) -> np.ndarray:
        x4 = self.lifts[:, 3]
        if np.any(x4 <= 1e-12) and np.any(x4 >= -1e-12):
            if not (np.all(x4 > 1e-12) or np.all(x4 < -1e-12)):
                raise OutOfChart("polyhedron meets the plane at infinity of the chart")
        return self.lifts[:, :3] / x4[:, None]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.edge_faces)

    def faces_at(self, v: int) -> list[int]:
        """Faces around v in cyclic order."""
        around = [f for f, face in enumerate(self.faces) if v in face]
        order = [around[0]]
        while len(order) < len(around):
            f = order[-1]
            face = self.faces[f]
            k = face.index(v)
            nxt = face[(k + 1) % len(face)]
            pair = (min(v, nxt), max(v, nxt))
            a, b = self.edge_faces[pair]
            order.append(b if a == f else a)
        return order

    def edges_at(self, v: int) -> list[tuple[int, int]]:
        """Edges at v in the same cyclic order as faces_at: edge i separates faces i and i+1."""
        fs = self.faces_at(v)
        out = []
        for i, f in enumerate(fs):
            g = fs[(i + 1) % len(fs)]
            shared = set(self.faces[f]) & set(self.faces[g]) - {v}
            w = next(iter(shared))
            out.append((min(v, w), max(v, w)))
        return out

    def transformed(self, g: Isometry) -> "HyperidealPolyhedron":
        return HyperidealPolyhedron(
            lifts=g.apply_lifted(self.lifts),
            faces=self.faces,
            covectors=g.apply_lifted(self.covectors),
            face_sides=self.face_sides,
            vertex_signs=self.vertex_signs,
            skeleton=self.skeleton,
            edge_faces=self.edge_faces,
        )

    def to_json(self) -> dict:
        return {
            "vertices": self.chart_vertices().tolist(),
            "signs": list(self.vertex_signs),
            "faces": [list(f) for f in self.faces],
            "faceSides": list(self.face_sides),
            "faceCovectors": self.covectors.tolist(),
            "skeleton": self.skeleton.to_json(),
        }


def _merge_facets(hull: ConvexHull) -> list[list[int]]:
    parent = list(range(len(hull.simplices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    eq = hull.equations
    for i, nbrs in enumerate(hull.neighbors):
        for j in nbrs:
            if np.max(np.abs(eq[i] - eq[j])) <= MERGE_TOL:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(hull.simplices)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _ordered_face(points: np.ndarray, ids: list[int], normal: np.ndarray) -> tuple[int, ...]:
    pts = points[ids]
    c = pts.mean(axis=0)
    e1 = _unit(pts[0] - c)
    e2 = np.cross(normal, e1)
    ang = [math.atan2(np.dot(p - c, e2), np.dot(p - c, e1)) for p in pts]
    order = [ids[k] for k in np.argsort(ang)]
    k = order.index(min(order))
    return tuple(order[k:] + order[:k])


def _face_covector(lifts: np.ndarray, face: Sequence[int], inside: np.ndarray) -> np.ndarray:
    m = lifts[list(face)] @ FORM
    _, s, vt = np.linalg.svd(m)
    n = vt[-1]
    if inner(n, inside) > 0:
        n = -n
    return n / np.linalg.norm(n)


def _edge_crosses_ads(u: np.ndarray, w: np.ndarray, tol: float = CLASSIFY_TOL) -> bool:
    u, w = _unit(u), _unit(w)
    a, b, c = inner(u, u), inner(u, w), inner(w, w)
    return b < -tol and b * b - a * c > tol


def build_polyhedron(vertex_coords) -> HyperidealPolyhedron:
    pts = np.asarray(vertex_coords, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 4:
        raise DomainError("need at least four chart points in R^3")
    if not np.all(np.isfinite(pts)):
        raise DomainError("coordinates must be finite")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHull(f"hull is degenerate: {str(exc).splitlines()[0]}") from exc
    scale = max(1.0, float(np.abs(pts).max()))
    if hull.volume < 1e-12 * scale**3:
        raise DegenerateHull("hull has no volume")
    if len(hull.vertices) != len(pts):
        missing = sorted(set(range(len(pts))) - set(hull.vertices))
        raise NotConvex(f"points {missing} are not extreme points of the hull")

    lifts = np.hstack([pts, np.ones((len(pts), 1))])
    inside = lifts.mean(axis=0)
    faces, covectors = [], []
    for group in _merge_facets(hull):
        ids = sorted({int(i) for s in group for i in hull.simplices[s]})
        faces.append(_ordered_face(pts, ids, hull.equations[group[0]][:3]))
    faces.sort(key=lambda f: sorted(f))
    for face in faces:
        n = _face_covector(lifts, face, inside)
        dev = np.abs(inner(lifts[list(face)], n)) / np.linalg.norm(lifts[list(face)], axis=1)
        if dev.max() > 1e-7:
            raise NotConvex("merged face is not planar")
        covectors.append(n)
        # a face vertex lying on the segment between its neighbours is not a corner
        k = len(face)
        for j in range(k):
            a, b, c = pts[face[j - 1]], pts[face[j]], pts[face[(j + 1) % k]]
            if np.linalg.norm(np.cross(b - a, c - b)) <= 1e-10 * scale**2:
                raise NotConvex(f"vertex {face[j]} is not a corner of its face")
    covectors = np.array(covectors)
    return _finish(lifts, tuple(faces), covectors)


def _finish(lifts: np.ndarray, faces: tuple, covectors: np.ndarray) -> HyperidealPolyhedron:
    n = len(lifts)
    signs = []
    for i, x in enumerate(lifts):
        loc = classify_point(ProjectivePoint(x), CLASSIFY_TOL)
        if loc is PointLocation.INTERIOR:
            raise VertexInsideAdS(f"vertex {i} lies inside AdS")
        signs.append("0" if loc is PointLocation.BOUNDARY else "+")

    edge_faces: dict[tuple[int, int], list[int]] = {}
    for f, face in enumerate(faces):
        for a, b in zip(face, face[1:] + face[:1]):
            edge_faces.setdefault((min(a, b), max(a, b)), []).append(f)
    for e, fs in edge_faces.items():
        if len(fs) != 2:
            raise DegenerateHull(f"edge {e} borders {len(fs)} faces")
    for e in edge_faces:
        if not _edge_crosses_ads(lifts[e[0]], lifts[e[1]]):
            raise EdgeMissesAdS(f"edge {e[0]}-{e[1]} does not pass through AdS", edge=e)

    sides = []
    for f, face in enumerate(faces):
        nf = _unit(covectors[f])
        if inner(nf, nf) >= -CLASSIFY_TOL:
            raise NonSpacelikeFace(f"face {face} is not spacelike")
        p = ads_point_on_edge(lifts[face[0]], lifts[face[1]])
        sides.append(FUTURE if inner(nf, time_field(p)) > 0 else PAST)

    equator = {e for e, (f1, f2) in edge_faces.items() if sides[f1] != sides[f2]}
    expected = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    if equator != expected:
        raise NoHamiltonianEquator(
            "edges between future and past faces do not form the cycle 0-1-...-(N-1) "
            f"(found {sorted(equator)})"
        )
    top = [e for e, (f1, f2) in edge_faces.items() if e not in equator and sides[f1] == FUTURE]
    bottom = [e for e, (f1, f2) in edge_faces.items() if e not in equator and sides[f1] == PAST]
    skeleton = MarkedGraph.from_diagonals(n, sorted(top), sorted(bottom))
    try:
        require_valid(skeleton)
    except DomainError as exc:
        raise InvalidPolyhedron(f"skeleton is not a valid marked graph: {exc}") from exc
    return HyperidealPolyhedron(
        lifts=lifts,
        faces=faces,
        covectors=covectors,
        face_sides=tuple(sides),
        vertex_signs=tuple(signs),
        skeleton=skeleton,
        edge_faces={e: tuple(fs) for e, fs in edge_faces.items()},
    )


def polyhedron_from_json(data: dict) -> HyperidealPolyhedron:
    try:
        verts = data["vertices"]
    except (KeyError, TypeError) as exc:
        raise DomainError("polyhedron JSON needs a 'vertices' list") from exc
    p = build_polyhedron(verts)
    signs = data.get("signs")
    if signs is not None and [str(s) for s in signs] != list(p.vertex_signs):
        raise InvalidPolyhedron(f"stated signs {signs} disagree with classification {list(p.vertex_signs)}")
    return p


# --- angles -------------------------------------------------------------------------


def _normalize_edge(P: HyperidealPolyhedron, e) -> tuple[int, int]:
    if isinstance(e, str):
        try:
            a, b = (int(t) for t in e.split("-"))
        except ValueError as exc:
            raise InvalidEdge(f"bad edge key {e!r}") from exc
    else:
        a, b = e
    pair = (min(a, b), max(a, b))
    if pair not in P.edge_faces:
        raise InvalidEdge(f"{pair[0]}-{pair[1]} is not an edge")
    return pair


def _off_edge_vertex(P: HyperidealPolyhedron, f: int, pair: tuple[int, int]) -> int:
    face = P.faces[f]
    k = face.index(pair[0])
    # the neighbour of pair[0] on this face that is not pair[1]
    for w in (face[(k + 1) % len(face)], face[k - 1]):
        if w != pair[1]:
            return w
    raise InvalidEdge("face has no vertex off the edge")


def dihedral_angle(P: HyperidealPolyhedron, e) -> float:
    pair = _normalize_edge(P, e)
    f1, f2 = P.edge_faces[pair]
    u, w = P.lifts[pair[0]], P.lifts[pair[1]]
    z1 = P.lifts[_off_edge_vertex(P, f1, pair)]
    z2 = P.lifts[_off_edge_vertex(P, f2, pair)]
    return boost_angle(u, w, z1, z2)


def angle_map(P: HyperidealPolyhedron) -> AngleAssignment:
    vals = tuple(dihedral_angle(P, e.pair) for e in P.skeleton.edges)
    return AngleAssignment(P.skeleton, vals)


def vertex_angle_sum(P: HyperidealPolyhedron, v: int) -> float:
    return float(sum(dihedral_angle(P, e) for e in P.edge_faces if v in e))


# --- induced metric -----------------------------------------------------------------


@dataclass(frozen=True)
class FacePolygon:
    face: int
    corners: tuple[tuple, ...]  # ("ideal", v) or ("cut", v, w): cut on edge v-w near v
    lengths: tuple[float, ...]  # lengths[i] joins corners i and i+1
    truncation: tuple[bool, ...]
    angles: tuple[float, ...]


@dataclass(frozen=True)
class PunctureData:
    sign: str
    trace: float
    waist: float


@dataclass(frozen=True)
class MetricComplex:
    faces: tuple[FacePolygon, ...]
    gluings: tuple[tuple[str, int, int, float, float], ...]
    punctures: tuple[PunctureData, ...]

    def to_json(self) -> dict:
        return {
            "faces": [
                {
                    "face": fp.face,
                    "corners": [list(c) for c in fp.corners],
                    "lengths": list(fp.lengths),
                    "truncation": list(fp.truncation),
                    "angles": list(fp.angles),
                }
                for fp in self.faces
            ],
            "gluings": [
                {"edge": k, "faces": [a, b], "lengths": [la, lb]} for k, a, b, la, lb in self.gluings
            ],
            "punctures": [{"sign": p.sign, "trace": p.trace, "waist": p.waist} for p in self.punctures],
        }


def _tangent(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Direction at x towards y, orthogonal to x."""
    return y - (inner(x, y) / inner(x, x)) * x


def _interior_angle(x, y, z) -> float:
    t1, t2 = _tangent(x, y), _tangent(x, z)
    c = inner(t1, t2) / math.sqrt(inner(t1, t1) * inner(t2, t2))
    return math.acos(max(-1.0, min(1.0, c)))


def _corner_point(P: HyperidealPolyhedron, corner) -> np.ndarray:
    if corner[0] == "ideal":
        return P.lifts[corner[1]]
    return cut_point(P.lifts[corner[1]], P.lifts[corner[2]])


def _segment_length(x: np.ndarray, y: np.ndarray) -> float:
    r = abs(inner(x, y)) / math.sqrt(inner(x, x) * inner(y, y))
    return math.acosh(max(r, 1.0))


def _face_polygon(P: HyperidealPolyhedron, f: int) -> FacePolygon:
    face = P.faces[f]
    k = len(face)
    corners: list[tuple] = []
    for j, v in enumerate(face):
        prev, nxt = face[j - 1], face[(j + 1) % k]
        if P.vertex_signs[v] == "0":
            corners.append(("ideal", v))
        else:
            corners.append(("cut", v, prev))
            corners.append(("cut", v, nxt))
    m = len(corners)
    pts = [_corner_point(P, c) for c in corners]
    lengths, trunc, angles = [], [], []
    for i in range(m):
        c1, c2 = corners[i], corners[(i + 1) % m]
        is_trunc = c1[0] == "cut" and c2[0] == "cut" and c1[1] == c2[1]
        trunc.append(is_trunc)
        if c1[0] == "ideal" or c2[0] == "ideal":
            lengths.append(math.inf)
        else:
            lengths.append(_segment_length(pts[i], pts[(i + 1) % m]))
    for i in range(m):
        if corners[i][0] == "ideal":
            angles.append(0.0)
        else:
            angles.append(_interior_angle(pts[i], pts[i - 1], pts[(i + 1) % m]))
    return FacePolygon(f, tuple(corners), tuple(lengths), tuple(trunc), tuple(angles))


def _horosphere_point(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """The point p = alpha x + beta y with <p, x> = -1 and <p, p> = -1, for null x."""
    beta = -1.0 / inner(x, y)
    alpha = (-1.0 - beta * beta * inner(y, y)) / (2.0 * beta * inner(x, y))
    p = alpha * x + beta * y
    return p / math.sqrt(-inner(p, p))


def _ideal_lift(P: HyperidealPolyhedron, v: int) -> np.ndarray:
    """Lift of an ideal vertex whose horosphere meets the link in total horocyclic length 1.

    Scaling the lift by s divides every horocyclic length by s, so the choice is
    intrinsic and keeps developed frames near the cusp well conditioned.
    """
    x = P.lifts[v] / np.linalg.norm(P.lifts[v])
    ring = [e[1] if e[0] == v else e[0] for e in P.edges_at(v)]
    pts = [_horosphere_point(x, P.lifts[w] / np.linalg.norm(P.lifts[w])) for w in ring]
    total = sum(math.sqrt(max(-2.0 * inner(a, b) - 2.0, 0.0)) for a, b in zip(pts, pts[1:] + pts[:1]))
    return x * total


def _anchor(P: HyperidealPolyhedron, v: int, w: int, lift: np.ndarray | None = None) -> np.ndarray:
    """Unit AdS point on the edge v-w close to v: the truncation cut, or a horosphere point."""
    y = P.lifts[w] / np.linalg.norm(P.lifts[w])
    if P.vertex_signs[v] == "+":
        p = cut_point(P.lifts[v] / np.linalg.norm(P.lifts[v]), y)
        return p / math.sqrt(-inner(p, p))
    return _horosphere_point(_ideal_lift(P, v) if lift is None else lift, y)


def _face_frame(P: HyperidealPolyhedron, f: int, center: np.ndarray | None = None) -> np.ndarray:
    """Rows f1, f2, f3: a form-orthonormal basis of the face plane (f3 timelike).

    The basis is oriented by the outward covector and time-oriented so that
    consistent lifts of AdS points of the face land on the upper sheet.  f3 is
    ``center`` when given, otherwise an AdS point on the first edge.
    """
    n = P.covectors[f]
    _, _, vt = np.linalg.svd((FORM @ n).reshape(1, 4))
    basis = vt[1:]
    if center is None:
        face = P.faces[f]
        center = ads_point_on_edge(P.lifts[face[0]], P.lifts[face[1]])
    f3 = center / math.sqrt(-inner(center, center))
    rest = []
    for b in basis:
        v = b + inner(b, f3) * f3
        for r in rest:
            v = v - inner(v, r) * r
        if inner(v, v) > 1e-10:
            rest.append(v / math.sqrt(inner(v, v)))
        if len(rest) == 2:
            break
    f1, f2 = rest
    if np.linalg.det(np.vstack([f1, f2, f3, n])) < 0:
        f1 = -f1
    return np.vstack([f1, f2, f3])


def _frame_coords(frame: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.array([inner(x, frame[0]), inner(x, frame[1]), -inner(x, frame[2])])


def puncture_holonomy(P: HyperidealPolyhedron, v: int, start: int = 0) -> np.ndarray:
    """SO(2,1) holonomy of the developed face cycle around vertex v, from face ``start`` of the ring.

    Frames and gluing points are taken near v (on the truncation plane, or on a
    horosphere at an ideal vertex) so the composed steps stay well conditioned.
    """
    faces = P.faces_at(v)
    edges = P.edges_at(v)
    faces = faces[start:] + faces[:start]
    edges = edges[start:] + edges[:start]
    k = len(faces)

    def other(e):
        return e[1] if e[0] == v else e[0]

    lift = _ideal_lift(P, v) if P.vertex_signs[v] == "0" else None
    anchors = [_anchor(P, v, other(e), lift) for e in edges]
    # face i lies between edges i-1 and i of the ring
    frames = {faces[(i + 1) % k]: _face_frame(P, faces[(i + 1) % k], anchors[i]) for i in range(k)}
    total = np.eye(3)
    for i in range(k):
        fa, fb = faces[i], faces[(i + 1) % k]
        a = anchors[i]
        b = _tangent(a, P.lifts[other(edges[i])])
        b = b / math.sqrt(inner(b, b))

        def inward(f):
            z = P.lifts[_off_edge_vertex(P, f, edges[i])]
            c = z + inner(z, a) * a - inner(z, b) * b
            return c / math.sqrt(inner(c, c))

        ca, cb = inward(fa), inward(fb)
        src = np.column_stack([_frame_coords(frames[fb], x) for x in (a, b, cb)])
        dst = np.column_stack([_frame_coords(frames[fa], x) for x in (a, b, -ca)])
        total = total @ (dst @ np.linalg.inv(src))
    return total


def _trace_and_waist(h: np.ndarray) -> tuple[float, float]:
    tr = math.sqrt(max(float(np.trace(h)) + 1.0, 0.0))
    waist = 2.0 * math.acosh(tr / 2.0) if tr > 2.0 + CUSP_TOL else 0.0
    return tr, waist


def induced_metric_complex(P: HyperidealPolyhedron) -> MetricComplex:
    polys = tuple(_face_polygon(P, f) for f in range(len(P.faces)))
    gluings = []
    for (a, b), (f1, f2) in sorted(P.edge_faces.items()):
        lens = []
        for fp in (polys[f1], polys[f2]):
            m = len(fp.corners)
            for i in range(m):
                c1, c2 = fp.corners[i], fp.corners[(i + 1) % m]
                if {c1[1], c2[1]} == {a, b} and not fp.truncation[i]:
                    lens.append(fp.lengths[i])
                    break
        gluings.append((f"{a}-{b}", f1, f2, lens[0], lens[1]))
    punctures = []
    for v in range(P.n):
        tr, waist = _trace_and_waist(puncture_holonomy(P, v))
        punctures.append(PunctureData(P.vertex_signs[v], tr, waist))
    return MetricComplex(polys, tuple(gluings), tuple(punctures))


# --- sampling -----------------------------------------------------------------------


def _place(angle: float, h: float, kappa: float) -> np.ndarray:
    r = math.sqrt(1.0 + h * h) * kappa
    return np.array([r * math.cos(angle), r * math.sin(angle), h])


def _sample_free(n: int, signs: Sequence[str], rng: np.random.Generator) -> np.ndarray:
    base = rng.uniform(0, 2 * math.pi)
    jitter = rng.uniform(-0.15, 0.15, size=n)
    angles = base + 2 * math.pi * (np.arange(n) + jitter) / n
    # an equator chord between heights h and -h stays in AdS while sqrt(1+h^2) cos(gap/2) < 1
    gap = np.diff(np.append(angles, angles[0] + 2 * math.pi))
    hcap = min(0.6, math.tan(gap.min() / 2))
    mags = rng.uniform(0.3, 0.95, size=n) * hcap
    hs = np.where(np.arange(n) % 2 == 0, mags, -mags)
    if n % 2 == 1:
        hs[-1] = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 0.4) * hcap
    pts = []
    for i, (a, h, s) in enumerate(zip(angles, hs, signs)):
        kappa = 1.0
        if s == "+":
            # keep both equator chords at this vertex inside AdS
            room = min(gap[i - 1], gap[i])
            kmax = min(1.5, 1.0 / (math.sqrt(1 + h * h) * math.cos(room / 2)))
            kappa = 1.0 + (kmax - 1.0) * float(rng.uniform(0.15, 0.85))
        pts.append(_place(a, h, kappa))
    return np.array(pts)


def _kappa_max(n: int) -> float:
    return min(1.5, 0.97 / math.cos(math.pi / n))


def _height_lp(n: int, top, bottom, radii: np.ndarray, ang: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Heights making the top chords an upper hull and the bottom chords a lower hull."""
    xy = np.column_stack([radii * np.cos(ang), radii * np.sin(ang)])
    rows = []

    def plane_row(tri, d, sign):
        a, b, c = tri
        m = np.array([[xy[a, 0], xy[a, 1], 1.0], [xy[b, 0], xy[b, 1], 1.0], [xy[c, 0], xy[c, 1], 1.0]])
        bary = np.linalg.solve(m.T, np.array([xy[d, 0], xy[d, 1], 1.0]))
        row = np.zeros(n)
        row[[a, b, c]] += bary
        row[d] -= 1.0
        # upper hull: interpolated plane above the opposite vertex (row . h >= 1)
        rows.append(sign * row)

    for chords, sign in ((top, 1.0), (bottom, -1.0)):
        tris = _split_regions(n, chords)
        for a, b in chords:
            ts = [t for t in tris if a in t and b in t]
            t1, t2 = ts
            d = next(x for x in t2 if x not in (a, b))
            plane_row(t1, d, sign)
    a_ub = -np.array(rows)
    b_ub = -np.ones(len(rows))
    cost = rng.normal(size=n) * 0.1
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(-50, 50)] * n, method="highs")
    if res.status != 0:
        raise SamplingFailed("no heights realize the requested triangulations")
    h = res.x - res.x.mean()
    return h / np.abs(h).max()


def sample_polyhedron(
    size_or_graph, signs: Sequence[str] | None = None, seed: int | None = None, max_tries: int = 400
) -> HyperidealPolyhedron:
    """Random valid polyhedron with n vertices (int) or with a prescribed skeleton (MarkedGraph).

    Vertices sit on the chart hyperboloid at increasing angles; vertices with
    sign "+" are pushed radially outwards.  Candidates are rejected until
    build_polyhedron accepts them with the requested signs (and skeleton).
    """
    rng = np.random.default_rng(seed)
    graph = size_or_graph if isinstance(size_or_graph, MarkedGraph) else None
    n = graph.n if graph is not None else int(size_or_graph)
    if n < 4:
        raise DomainError("need n >= 4")
    if signs is None:
        signs = ["0"] * n
    signs = [str(s) for s in signs]
    if len(signs) != n or not set(signs) <= {"0", "+"}:
        raise DomainError("signs must list '0' or '+' per vertex")
    if graph is not None:
        return _sample_with_graph(graph, signs, rng, max_tries)
    for _ in range(max_tries):
        pts = _sample_free(n, signs, rng)
        try:
            p = build_polyhedron(pts)
        except InvalidPolyhedron:
            continue
        if list(p.vertex_signs) == signs:
            return p
    raise SamplingFailed(f"no valid polyhedron after {max_tries} tries")


def _sample_with_graph(graph: MarkedGraph, signs, rng, max_tries) -> HyperidealPolyhedron:
    from .graphs import complete_to_admissible_triangulation

    require_valid(graph)
    full = graph if graph.is_triangulation() else complete_to_admissible_triangulation(graph)
    if not triangulation_admissible(full):
        raise DomainError("skeleton cannot be realized")
    n = graph.n
    kmax = _kappa_max(n)
    tries = 0
    while tries < max_tries:
        tries += 1
        kappas = np.array([1.0 if s == "0" else rng.uniform(1.02, kmax) for s in signs])
        ang = 2 * math.pi * (np.arange(n) + rng.uniform(-0.2, 0.2, size=n)) / n
        try:
            h0 = _height_lp(n, full.top, full.bottom, kappas, ang, rng)
        except SamplingFailed:
            continue
        scale = 0.6
        while scale > 1e-3 and tries < max_tries:
            tries += 1
            pts = np.array([_place(a, h, k) for a, h, k in zip(ang, scale * h0, kappas)])
            try:
                p = build_polyhedron(pts)
            except InvalidPolyhedron:
                scale /= 2
                continue
            if list(p.vertex_signs) == signs and p.skeleton == full:
                if graph is not full:
                    return _merge_to_graph(p, graph, int(rng.integers(2**31)))
                return p
            scale /= 2
    # rare skeletons whose upper and lower triangulations fight over a near-regular
    # projection: fall back to rejection from the free sampler
    for _ in range(5 * max_tries):
        try:
            p = build_polyhedron(_sample_free(n, signs, rng))
        except InvalidPolyhedron:
            continue
        if list(p.vertex_signs) == signs and p.skeleton == full:
            return p if graph is full else _merge_to_graph(p, graph, int(rng.integers(2**31)))
    raise SamplingFailed(f"could not realize the skeleton after {max_tries} tries")


def _merge_to_graph(p: HyperidealPolyhedron, graph: MarkedGraph, seed: int) -> HyperidealPolyhedron:
    """Flatten the extra diagonals of p by realizing nearby admissible angles on `graph`."""
    from .admissibility import sample_admissible_with_signs
    from .realization import SolveOptions, realize_from

    given = angle_map(p).as_mapping()
    try:
        theta = sample_admissible_with_signs(
            graph, p.vertex_signs, seed=seed, near=[given[e.key] for e in graph.edges]
        )
        return realize_from(theta, p, SolveOptions(seed=seed))
    except (DomainError, InvalidPolyhedron, NoConvergence, CombinatoricsChanged) as exc:
        raise SamplingFailed(f"could not flatten the added diagonals: {exc}") from exc
