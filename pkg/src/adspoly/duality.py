"""Polar duality, truncation of hyperideal vertices, vertex cross-sections and light-like measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad

from .errors import DegenerateDual, NotHyperideal, NotIdeal, SingularRay, SingularVertex
from .hs_kernel import FORM, hilbert_distance, inner
from .polyhedron import HyperidealPolyhedron, _normalize_edge, cut_point

SINGULAR_TOL = 1e-12


# --- dual polyhedron ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualPolyhedron:
    """A projective polytope given by vertex lifts, cyclic faces and outward covectors.

    Lifts and covectors satisfy <covector, lift> <= 0, which is symmetric in the
    two roles, so dualizing swaps them without any sign bookkeeping.
    """

    lifts: np.ndarray
    faces: tuple[tuple[int, ...], ...]
    covectors: np.ndarray

    def edges(self) -> dict[tuple[int, int], tuple[int, int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for f, face in enumerate(self.faces):
            for a, b in zip(face, face[1:] + face[:1]):
                out.setdefault((min(a, b), max(a, b)), []).append(f)
        return {e: tuple(fs) for e, fs in out.items()}

    def to_json(self) -> dict:
        return {
            "vertexLifts": self.lifts.tolist(),
            "faces": [list(f) for f in self.faces],
            "faceCovectors": self.covectors.tolist(),
        }


def _rings(lifts: np.ndarray, faces, covectors) -> tuple[tuple[int, ...], ...]:
    """For each vertex, the faces around it in cyclic order."""
    edge_faces: dict[tuple[int, int], list[int]] = {}
    for f, face in enumerate(faces):
        for a, b in zip(face, face[1:] + face[:1]):
            edge_faces.setdefault((min(a, b), max(a, b)), []).append(f)
    rings = []
    for v in range(len(lifts)):
        around = [f for f, face in enumerate(faces) if v in face]
        if not around:
            raise DegenerateDual(f"vertex {v} lies on no face")
        order = [around[0]]
        while len(order) < len(around):
            face = faces[order[-1]]
            k = face.index(v)
            nxt = face[(k + 1) % len(face)]
            a, b = edge_faces[(min(v, nxt), max(v, nxt))]
            order.append(b if a == order[-1] else a)
        rings.append(tuple(order))
    return tuple(rings)


def dual_polyhedron(P) -> DualPolyhedron:
    """Vertices are the face covectors, faces are the rings of faces around each vertex."""
    lifts = np.asarray(P.lifts, dtype=float)
    covectors = np.asarray(P.covectors, dtype=float)
    unit = covectors / np.linalg.norm(covectors, axis=1)[:, None]
    for f in range(len(unit)):
        for g in range(f):
            if min(np.linalg.norm(unit[f] - unit[g]), np.linalg.norm(unit[f] + unit[g])) < 1e-9:
                raise DegenerateDual(f"faces {g} and {f} span the same plane")
    rings = _rings(lifts, P.faces, covectors)
    # keep face vertex order anticlockwise seen from outside, as for the original
    return DualPolyhedron(lifts=covectors.copy(), faces=rings, covectors=lifts.copy())


def dual_edge(P: HyperidealPolyhedron, e) -> tuple[int, int]:
    """Indices of the dual vertices (faces of P) joined by the dual of edge e."""
    return P.edge_faces[_normalize_edge(P, e)]


def signed_dual_edge_length(P: HyperidealPolyhedron, e) -> float:
    """Length of the dual edge, negative when its endpoints lie on one sheet of the lift."""
    f1, f2 = dual_edge(P, e)
    n1, n2 = P.covectors[f1], P.covectors[f2]
    d = hilbert_distance(n1, n2)
    mag = abs(d.re)
    return -mag if inner(n1, n2) > 0 else mag


# --- truncation ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncatedPolyhedron:
    source: HyperidealPolyhedron
    lifts: np.ndarray
    labels: tuple[tuple, ...]  # ("ideal", v) or ("cut", v, w)
    faces: tuple[tuple[int, ...], ...]
    covectors: np.ndarray
    truncation_faces: dict[int, int]  # original vertex -> face index

    def new_edge_angles(self) -> dict[tuple[int, int], float]:
        """Hyperbolic angle between each truncation plane and the adjacent faces.

        The value is asinh of the normalized form product of the two normals, so
        it is zero exactly when the cut is orthogonal to the face.
        """
        out = {}
        for v, tf in self.truncation_faces.items():
            c = self.covectors[tf]
            for f, face in enumerate(self.faces):
                if f == tf or not set(face) & set(self.faces[tf]):
                    continue
                n = self.covectors[f]
                r = inner(n, c) / math.sqrt(abs(inner(n, n)) * abs(inner(c, c)))
                out[(v, f)] = math.asinh(r)
        return out


def truncate(P: HyperidealPolyhedron) -> TruncatedPolyhedron:
    labels: list[tuple] = []
    index: dict[tuple, int] = {}

    def vid(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    faces = []
    for face in P.faces:
        k = len(face)
        ring = []
        for j, v in enumerate(face):
            if P.vertex_signs[v] == "0":
                ring.append(vid(("ideal", v)))
            else:
                ring.append(vid(("cut", v, face[j - 1])))
                ring.append(vid(("cut", v, face[(j + 1) % k])))
        faces.append(tuple(ring))
    covectors = list(P.covectors)
    trunc: dict[int, int] = {}
    for v in range(P.n):
        if P.vertex_signs[v] != "+":
            continue
        # walk the faces around v backwards so the new face is anticlockwise from outside
        ring = []
        for f in reversed(P.faces_at(v)):
            face = P.faces[f]
            k = face.index(v)
            ring.append(vid(("cut", v, face[(k + 1) % len(face)])))
        trunc[v] = len(faces)
        faces.append(tuple(ring))
        covectors.append(P.lifts[v] / np.linalg.norm(P.lifts[v]))

    def point(label):
        if label[0] == "ideal":
            return P.lifts[label[1]]
        return cut_point(P.lifts[label[1]], P.lifts[label[2]])

    # cut_point has positive coefficients on both endpoints, so normalized cut
    # points stay on the same side of every face plane as the vertex lifts
    lifts = np.array([x / np.linalg.norm(x) for x in map(point, labels)])
    return TruncatedPolyhedron(P, lifts, tuple(labels), tuple(faces), np.array(covectors), trunc)


def separates(P: HyperidealPolyhedron, v: int) -> bool:
    """Whether the polar plane of v has v on one side and every other vertex on the other."""
    x = P.lifts[v]
    own = inner(x, x)
    return own > 0 and all(inner(x, P.lifts[w]) < 0 for w in range(P.n) if w != v)


# --- cross-section area -------------------------------------------------------------


def _orthonormal_complement(v: np.ndarray) -> np.ndarray:
    """Rows e0 (spacelike), e1, e2 (timelike): a form-orthonormal basis of v-perp, v spacelike."""
    _, _, vt = np.linalg.svd((FORM @ v).reshape(1, 4))
    basis = list(vt[1:])
    out = []
    # Gram-Schmidt with the form, spacelike vectors first
    basis.sort(key=lambda b: -inner(b, b))
    for b in basis:
        w = b.copy()
        for r in out:
            w = w - inner(w, r) / inner(r, r) * r
        q = inner(w, w)
        if abs(q) < 1e-12:
            raise NotHyperideal("degenerate polar plane")
        out.append(w / math.sqrt(abs(q)))
    out.sort(key=lambda r: -inner(r, r))
    return np.array(out)


def cross_section_polygon(P: HyperidealPolyhedron, v: int) -> np.ndarray:
    """Cut points on the edges at v, in the cyclic order of edges_at(v)."""
    if P.vertex_signs[v] != "+":
        raise NotHyperideal(f"vertex {v} is not strictly hyperideal")
    pts = []
    for a, b in P.edges_at(v):
        w = b if a == v else a
        p = cut_point(P.lifts[v], P.lifts[w])
        pts.append(p / math.sqrt(-inner(p, p)))
    return np.array(pts)


def _triangle_area(c0: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> float:
    # with x(s, t) affine in the triangle, det(x, x_s, x_t) is constant and the
    # area element of the radial projection onto the unit sheet is
    # |det| / (-Q(x))^{3/2}
    det = abs(np.linalg.det(np.column_stack([c0, c1, c2])))
    e1, e2 = c1 - c0, c2 - c0
    sig = np.array([1.0, -1.0, -1.0])

    def f(t, s):
        x = c0 + s * e1 + t * e2
        q = float(np.dot(sig * x, x))
        return (-q) ** -1.5

    val, _ = dblquad(f, 0.0, 1.0, 0.0, lambda s: 1.0 - s, epsabs=1e-14, epsrel=1e-13)
    return det * val


def cross_section_area(P: HyperidealPolyhedron, v: int, apex: int = 0) -> float:
    """Lorentzian area of the compact polygon cut from P by the polar plane of v.

    The polygon is fanned from corner ``apex``; changing it only re-triangulates.
    """
    pts = cross_section_polygon(P, v)
    basis = _orthonormal_complement(P.lifts[v])
    coords = np.array([[inner(p, basis[0]), -inner(p, basis[1]), -inner(p, basis[2])] for p in pts])
    k = len(coords)
    total = 0.0
    for j in range(1, k - 1):
        a, b = (apex + j) % k, (apex + j + 1) % k
        total += _triangle_area(coords[apex % k], coords[a], coords[b])
    return total


# --- light-like planes --------------------------------------------------------------


def region(p) -> int:
    """Region 1..4 of a non-singular vector: I = {x > |y|}, then anticlockwise."""
    x, y = float(p[0]), float(p[1])
    if abs(abs(x) - abs(y)) <= SINGULAR_TOL * max(abs(x), abs(y), 1.0):
        raise SingularRay(f"({x}, {y}) lies on a light-like line")
    if x > abs(y):
        return 1
    if y > abs(x):
        return 2
    if x < -abs(y):
        return 3
    return 4


def _mink(a, b) -> float:
    return float(a[0] * b[0] - a[1] * b[1])


def _orthogonal_in(p, target: int) -> np.ndarray:
    """The Minkowski-orthogonal ray of p lying in region target (adjacent to p's region)."""
    q = np.array([p[1], p[0]], dtype=float)
    return q if region(q) == target else -q


def _fundamental(a, b, reg: int) -> float:
    """Anticlockwise fundamental angle from a to b inside one region."""
    # sinh of the angle is |a x b| / sqrt(|<a,a><b,b>|), accurate for small angles
    cross = float(a[0] * b[1] - a[1] * b[0])
    mag = math.asinh(abs(cross) / math.sqrt(abs(_mink(a, a)) * abs(_mink(b, b))))
    return -mag if reg in (1, 3) else mag


def _ccw_between(a, b, c) -> bool:
    """Whether c lies in the anticlockwise sweep from a to b (exclusive of a)."""
    def ang(u):
        return math.atan2(float(u[1]), float(u[0]))

    t = (ang(c) - ang(a)) % (2 * math.pi)
    s = (ang(b) - ang(a)) % (2 * math.pi)
    return 0 < t <= s


def _sweep(l1, l2) -> float:
    """Measure of the anticlockwise sweep from l1 to l2 (less than a full turn)."""
    r1, r2 = region(l1), region(l2)
    cur, reg = np.asarray(l1, dtype=float), r1
    cross = float(l1[0] * l2[1] - l1[1] * l2[0])
    same_sector = r1 == r2 and (cross > 0 or (cross == 0 and np.dot(l1, l2) > 0))
    total = 0.0
    if same_sector:
        return _fundamental(cur, l2, reg)
    while True:
        nxt = reg % 4 + 1
        if nxt == r2:
            jump = _orthogonal_in(cur, nxt)
            if _ccw_between(cur, l2, jump):
                # the orthogonal ray is passed before l2: zero jump, then a piece in r2
                return total + _fundamental(jump, l2, r2)
            # l2 sits between the light-like line and the orthogonal ray
            back = _orthogonal_in(l2, reg)
            return total + _fundamental(cur, back, reg)
        cur, reg = _orthogonal_in(cur, nxt), nxt


def sectorial_measure(l1, l2) -> float:
    """Directed measure from ray l1 to ray l2, sweeping the shorter way (anticlockwise if opposite)."""
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    region(l1)
    region(l2)
    cross = float(l1[0] * l2[1] - l1[1] * l2[0])
    if cross > 0 or (cross == 0 and np.dot(l1, l2) < 0):
        return _sweep(l1, l2)
    if cross == 0:
        return 0.0
    return -_sweep(l2, l1)


def directed_measure(p1, p2) -> float:
    return sectorial_measure(p1, p2)


def polygon_measure_sum(vertices) -> float:
    pts = [np.asarray(p, dtype=float) for p in vertices]
    for p in pts:
        try:
            region(p)
        except SingularRay as exc:
            raise SingularVertex(str(exc)) from exc
    return float(sum(directed_measure(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))))


@dataclass(frozen=True)
class LightlikeChart:
    """Affine coordinates on the tangent plane at an ideal vertex, with the vertex at the origin.

    ``e1`` and ``e2`` are a form-orthonormal basis (spacelike, timelike) of the
    part of the tangent plane transverse to the vertex; ``ref`` is the point
    whose pairing fixes the affine scale.
    """

    origin: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    ref: np.ndarray

    @classmethod
    def at(cls, v: np.ndarray, ref: np.ndarray) -> "LightlikeChart":
        v = np.asarray(v, dtype=float)
        if abs(inner(v, v)) > 1e-8 * float(np.dot(v, v)):
            raise NotIdeal("chart origin must lie on the quadric")
        w = FORM @ v
        m = np.vstack([v, w]) @ FORM
        _, _, vt = np.linalg.svd(m)
        a, b = vt[2], vt[3]
        qa, qb, qab = inner(a, a), inner(b, b), inner(a, b)
        # diagonalize the (1,1) form on the complement
        g = np.array([[qa, qab], [qab, qb]])
        vals, vecs = np.linalg.eigh(g)
        t = vecs[:, 0] @ np.vstack([a, b])
        s = vecs[:, 1] @ np.vstack([a, b])
        e1 = s / math.sqrt(inner(s, s))
        e2 = t / math.sqrt(-inner(t, t))
        return cls(v, e1, e2, np.asarray(ref, dtype=float))

    def coords(self, p: np.ndarray) -> np.ndarray:
        lam = -inner(p, self.ref)
        return np.array([inner(p, self.e1), -inner(p, self.e2)]) / lam

    def degenerate_form(self, xy) -> float:
        return float(xy[0] ** 2 - xy[1] ** 2)


def _anticlockwise(pts: np.ndarray) -> bool:
    x, y = pts[:, 0], pts[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)) > 0


def ideal_vertex_dual_face_lengths(P: HyperidealPolyhedron, v: int) -> dict[tuple[int, int], float]:
    """Directed light-like lengths of the edges of the dual face at an ideal vertex."""
    if P.vertex_signs[v] != "0":
        raise NotIdeal(f"vertex {v} is not ideal")
    chart = LightlikeChart.at(P.lifts[v], P.interior)
    faces = P.faces_at(v)
    edges = P.edges_at(v)
    pts = np.array([chart.coords(P.covectors[f]) for f in faces])
    order = list(range(len(faces)))
    if not _anticlockwise(pts):
        # traverse the ring the other way; edge i then joins faces i+1 and i
        order.reverse()
    out = {}
    k = len(faces)
    for j in range(k):
        a, b = order[j], order[(j + 1) % k]
        i = a if (a + 1) % k == b else b
        out[edges[i]] = directed_measure(pts[a], pts[b])
    return out
