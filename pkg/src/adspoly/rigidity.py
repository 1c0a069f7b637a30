"""Infinitesimal Pogorelov map, Killing fields in the chart, and angle-Jacobian rigidity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from ._accel import boost_angles
from .errors import DegenerateSamples, DomainError, InvalidTriangulation, NonSpacelikeFace, OnLightCone, OnQuadric
from .graphs import MarkedGraph
from .hs_kernel import FORM, lie_algebra_basis
from .polyhedron import HyperidealPolyhedron

MINK = np.diag([1.0, 1.0, -1.0])
CONE_TOL = 1e-12
RANK_RTOL = 1e-7
KERNEL_ANGLE_TOL = 1e-5


def _mink(a, b) -> float:
    return float(np.dot(a, MINK @ b))


def hs_metric(x) -> np.ndarray:
    """Gram matrix of the HS metric at chart point x (x4 = 1)."""
    x = np.asarray(x, dtype=float)
    m = _mink(x, x)
    if abs(1.0 - m) <= CONE_TOL:
        raise OnQuadric("the metric blows up on the quadric")
    mx = MINK @ x
    return MINK / (1.0 - m) + np.outer(mx, mx) / (1.0 - m) ** 2


def pogorelov_upsilon(x, w) -> np.ndarray:
    """Rescale the radial part of w by the ratio of HS to Minkowski radial speeds."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if not np.any(x):
        return w.copy()
    m = _mink(x, x)
    if abs(m) <= CONE_TOL * max(1.0, float(np.dot(x, x))):
        raise OnLightCone("radial direction is light-like")
    if abs(1.0 - m) <= CONE_TOL:
        raise OnQuadric("the point lies on the quadric")
    # Minkowski and HS orthogonality to the radial direction agree in the chart.
    # The radial speed ratio is 1 / |1 - m|; past the quadric the HS ray runs
    # backwards, so the signed factor is the one that carries Killing fields over
    radial = _mink(x, w) / m
    return w + radial * (1.0 / (1.0 - m) - 1.0) * x


def pogorelov_pi(x, w) -> np.ndarray:
    v = pogorelov_upsilon(x, w)
    v[2] = -v[2]
    return v


@dataclass(frozen=True, eq=False)
class KillingField:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (4, 4) or np.max(np.abs(a.T @ FORM + FORM @ a)) > 1e-12 * max(1.0, np.abs(a).max()):
            raise DomainError("matrix is not in the Lie algebra of the form")
        object.__setattr__(self, "matrix", a)

    def __call__(self, x) -> np.ndarray:
        """Chart vector field: derivative of the projective flow at chart points (rows)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lifted = np.hstack([x, np.ones((len(x), 1))]) @ self.matrix.T
        out = lifted[:, :3] - x * lifted[:, 3:4]
        return out[0] if out.shape[0] == 1 else out

    def on_lift(self, lift: np.ndarray) -> np.ndarray:
        """Chart velocity of a (possibly unnormalized) lift."""
        x = lift[:3] / lift[3]
        return self(x)


def hs_killing_basis() -> list[KillingField]:
    return [KillingField(a) for a in lie_algebra_basis()]


def euclidean_killing_residual(points, vectors) -> float:
    """Relative least-squares misfit of samples against fields x -> w x x + c."""
    p = np.asarray(points, dtype=float)
    y = np.asarray(vectors, dtype=float)
    if len(p) < 4:
        raise DegenerateSamples("need at least four sample points")
    centred = p - p.mean(axis=0)
    if np.linalg.svd(centred, compute_uv=False)[-1] <= 1e-9 * max(1.0, np.abs(p).max()):
        raise DegenerateSamples("sample points are coplanar")
    rows = []
    for q in p:
        # w x q as a linear map of w
        cross = np.array([[0.0, q[2], -q[1]], [-q[2], 0.0, q[0]], [q[1], -q[0], 0.0]])
        rows.append(np.hstack([cross, np.eye(3)]))
    a = np.vstack(rows)
    b = y.reshape(-1)
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    scale = np.linalg.norm(b)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(a @ coef - b) / scale)


# --- angle Jacobian -----------------------------------------------------------------


def _edge_triangles(g: MarkedGraph) -> list[tuple[int, int, int, int]]:
    """For each edge (a, b) of a triangulation, the opposite vertices of its two triangles."""
    if not g.is_triangulation():
        raise InvalidTriangulation("refinement must be a triangulation")
    opp: dict[tuple[int, int], list[int]] = {}
    for face in g.faces:
        for i in range(3):
            a, b, c = face[i], face[(i + 1) % 3], face[(i + 2) % 3]
            opp.setdefault((min(a, b), max(a, b)), []).append(c)
    out = []
    for e in g.edges:
        zs = opp.get(e.pair, [])
        if len(zs) != 2:
            raise InvalidTriangulation(f"edge {e.key} does not border two triangles")
        out.append((e.pair[0], e.pair[1], zs[0], zs[1]))
    return out


def triangulated_angles(coords: np.ndarray, tris) -> np.ndarray:
    """Dihedral angles of a triangulated surface, signed against its vertex centroid."""
    lifts = np.hstack([coords, np.ones((len(coords), 1))])
    out = boost_angles(lifts, tris, lifts.mean(axis=0))
    if not np.all(np.isfinite(out)):
        raise NonSpacelikeFace("a triangle is not space-like or an edge misses AdS")
    return out


def refinement(P: HyperidealPolyhedron, gamma0: MarkedGraph | None = None) -> MarkedGraph:
    """A triangulation containing the skeleton; flat added diagonals are checked."""
    g = P.skeleton
    if gamma0 is None:
        if g.is_triangulation():
            return g
        from .graphs import complete_to_admissible_triangulation

        gamma0 = complete_to_admissible_triangulation(g)
    if gamma0.n != g.n or not (set(g.top) <= set(gamma0.top) and set(g.bottom) <= set(gamma0.bottom)):
        raise InvalidTriangulation("refinement must contain the skeleton")
    tris = _edge_triangles(gamma0)
    vals = triangulated_angles(P.chart_vertices(), tris)
    skel = {e.pair for e in g.edges}
    for e, v in zip(gamma0.edges, vals):
        if e.pair not in skel and abs(v) > 1e-7:
            raise InvalidTriangulation(f"added diagonal {e.key} does not lie in a flat face")
    return gamma0


def motion_basis(P: HyperidealPolyhedron) -> np.ndarray:
    """3N x D basis of allowed vertex motions: free for '+', quadric-tangent for '0'."""
    x = P.chart_vertices()
    cols = []
    for i, (p, s) in enumerate(zip(x, P.vertex_signs)):
        if s == "+":
            for k in range(3):
                c = np.zeros(3 * P.n)
                c[3 * i + k] = 1.0
                cols.append(c)
        else:
            grad = MINK @ p
            t = np.linalg.svd(grad.reshape(1, 3))[2][1:]
            for v in t:
                c = np.zeros(3 * P.n)
                c[3 * i : 3 * i + 3] = v
                cols.append(c)
    return np.column_stack(cols)


@dataclass
class AngleJacobian:
    edges: list[str]
    matrix: np.ndarray  # |E| x 3N, chart coordinates
    basis: np.ndarray  # 3N x D allowed motions
    richardson_gap: float

    @property
    def constrained(self) -> np.ndarray:
        return self.matrix @ self.basis


def angle_jacobian(P: HyperidealPolyhedron, gamma0: MarkedGraph | None = None, h: float = 1e-6) -> AngleJacobian:
    g = refinement(P, gamma0)
    tris = _edge_triangles(g)
    x0 = P.chart_vertices()
    step = h * max(1.0, float(np.abs(x0).max()))
    flat = x0.reshape(-1)

    def column(k, s):
        up, dn = flat.copy(), flat.copy()
        up[k] += s
        dn[k] -= s
        return (triangulated_angles(up.reshape(-1, 3), tris) - triangulated_angles(dn.reshape(-1, 3), tris)) / (2 * s)

    jac = np.column_stack([column(k, step) for k in range(flat.size)])
    coarse = np.column_stack([column(k, 2 * step) for k in range(flat.size)])
    gap = float(np.abs(jac - coarse).max() / max(1.0, np.abs(jac).max()))
    return AngleJacobian([e.key for e in g.edges], jac, motion_basis(P), gap)


def killing_restrictions(P: HyperidealPolyhedron) -> np.ndarray:
    """3N x 6 matrix whose columns are the basis Killing fields at the vertices."""
    x = P.chart_vertices()
    return np.column_stack([kf(x).reshape(-1) for kf in hs_killing_basis()])


@dataclass
class RigidityReport:
    kernel_dim: int
    principal_angles: list[float]
    singular_values: list[float]
    passed: bool

    def to_json(self) -> dict:
        return {
            "kernelDim": self.kernel_dim,
            "pass": self.passed,
            "singularValues": self.singular_values,
            "principalAngles": self.principal_angles,
        }


def report_from_matrix(constrained: np.ndarray, basis: np.ndarray, killing: np.ndarray) -> RigidityReport:
    _, s, vt = np.linalg.svd(constrained)
    d = constrained.shape[1]
    sv = np.zeros(d)
    sv[: len(s)] = s
    thresh = RANK_RTOL * (s[0] if len(s) else 0.0)
    kdim = int(np.sum(sv <= thresh))
    kernel = basis @ vt[d - kdim :].T if kdim else np.zeros((basis.shape[0], 0))
    angles: list[float] = []
    if kdim:
        angles = [float(a) for a in subspace_angles(kernel, killing)]
    passed = kdim == 6 and bool(angles) and max(angles) < KERNEL_ANGLE_TOL
    return RigidityReport(kdim, angles, [float(v) for v in sv], passed)


def rigidity_report(P: HyperidealPolyhedron, gamma0: MarkedGraph | None = None) -> RigidityReport:
    jac = angle_jacobian(P, gamma0)
    return report_from_matrix(jac.constrained, jac.basis, killing_restrictions(P))
