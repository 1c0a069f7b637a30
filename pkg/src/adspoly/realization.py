"""Finding the polyhedron with prescribed dihedral angles by continuation inside the admissible cone."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

from .admissibility import AngleAssignment, check_gamma_admissible
from .errors import (
    CombinatoricsChanged,
    DomainError,
    InvalidPolyhedron,
    NoConvergence,
    NotAdmissible,
    WrongCyclicOrder,
)
from .graphs import MarkedGraph, complete_to_admissible_triangulation
from .hs_kernel import Isometry, ProjectivePoint, inner, normalize_boundary_triple
from .polyhedron import HyperidealPolyhedron, build_polyhedron, sample_polyhedron
from .rigidity import _edge_triangles, hs_killing_basis, triangulated_angles


@dataclass
class SolveOptions:
    residual_tol: float = 1e-8
    max_newton_iters: int = 50
    continuation_steps: int = 16
    seed: int | None = 0
    max_halvings: int = 12

    def __post_init__(self):
        if self.residual_tol <= 0 or self.max_newton_iters < 1 or self.continuation_steps < 1:
            raise DomainError("tolerances must be positive and step counts at least 1")


@dataclass
class SolveLog:
    steps: list[dict] = field(default_factory=list)

    def to_json(self) -> list[dict]:
        return self.steps


class _Param:
    """Vertex coordinates from a flat parameter vector; ideal vertices stay on the quadric."""

    def __init__(self, signs):
        self.signs = list(signs)
        self.slices = []
        k = 0
        for s in self.signs:
            d = 3 if s == "+" else 2
            self.slices.append(slice(k, k + d))
            k += d
        self.size = k

    def coords(self, p: np.ndarray) -> np.ndarray:
        out = np.empty((len(self.signs), 3))
        for i, (s, sl) in enumerate(zip(self.signs, self.slices)):
            if s == "+":
                out[i] = p[sl]
            else:
                phi, h = p[sl]
                r = math.sqrt(1.0 + h * h)
                out[i] = (r * math.cos(phi), r * math.sin(phi), h)
        return out

    def params(self, coords: np.ndarray) -> np.ndarray:
        p = np.empty(self.size)
        for x, s, sl in zip(coords, self.signs, self.slices):
            p[sl] = x if s == "+" else (math.atan2(x[1], x[0]), x[2])
        return p

    def velocity(self, coords: np.ndarray, chart_vel: np.ndarray) -> np.ndarray:
        """Parameter velocity of a chart velocity field (tangent to the quadric at ideal vertices)."""
        out = np.empty(self.size)
        for x, v, s, sl in zip(coords, chart_vel, self.signs, self.slices):
            if s == "+":
                out[sl] = v
            else:
                h = x[2]
                r = math.sqrt(1.0 + h * h)
                phi = math.atan2(x[1], x[0])
                dphi = np.array([-r * math.sin(phi), r * math.cos(phi), 0.0])
                dh = np.array([h / r * math.cos(phi), h / r * math.sin(phi), 1.0])
                out[sl] = np.linalg.lstsq(np.column_stack([dphi, dh]), v, rcond=None)[0]
        return out


def _gauge_indices(param: _Param, coords: np.ndarray) -> np.ndarray:
    """Six parameters whose pinning cuts the isometry orbit transversally."""
    k = np.array([param.velocity(coords, kf(coords)) for kf in hs_killing_basis()])
    _, _, piv = qr(k, pivoting=True)
    return np.sort(piv[:6])


class _Problem:
    def __init__(self, param: _Param, tris, pinned: np.ndarray, base: np.ndarray):
        self.param = param
        self.tris = list(tris)
        self.pinned = pinned
        self.base = base.copy()
        self.free = np.setdiff1d(np.arange(param.size), pinned)

    def full(self, x: np.ndarray) -> np.ndarray:
        p = self.base.copy()
        p[self.free] = x
        return p

    def angles(self, x: np.ndarray) -> np.ndarray:
        return triangulated_angles(self.param.coords(self.full(x)), self.tris)

    def jacobian(self, x: np.ndarray, step: float = 1e-7) -> np.ndarray:
        cols = []
        for k in range(len(x)):
            up, dn = x.copy(), x.copy()
            up[k] += step
            dn[k] -= step
            cols.append((self.angles(up) - self.angles(dn)) / (2 * step))
        return np.column_stack(cols)


def _levenberg_marquardt(prob: _Problem, x: np.ndarray, target: np.ndarray, tol: float, max_iter: int):
    """Damped Gauss-Newton; only steps that lower the residual norm are accepted."""
    r = prob.angles(x) - target
    history = [float(np.linalg.norm(r))]
    mu = 1e-3
    for _ in range(max_iter):
        if np.abs(r).max() < tol:
            return x, r, history, True
        try:
            jac = prob.jacobian(x)
        except (ValueError, ZeroDivisionError, np.linalg.LinAlgError):
            # the iterate sits at the edge of the domain; let the caller shorten the step
            break
        jtj = jac.T @ jac
        g = jac.T @ r
        accepted = False
        for _ in range(30):
            lhs = jtj + mu * np.diag(np.maximum(np.diag(jtj), 1e-12))
            try:
                dx = -np.linalg.solve(lhs, g)
            except np.linalg.LinAlgError:
                mu *= 10
                continue
            try:
                r_new = prob.angles(x + dx) - target
            except (ValueError, ZeroDivisionError, np.linalg.LinAlgError):
                mu *= 10
                continue
            if np.all(np.isfinite(r_new)) and np.linalg.norm(r_new) < np.linalg.norm(r):
                x, r = x + dx, r_new
                mu = max(mu / 3, 1e-12)
                accepted = True
                history.append(float(np.linalg.norm(r)))
                break
            mu *= 4
        if not accepted:
            break
    return x, r, history, bool(np.abs(r).max() < tol)


def _convex_position(coords: np.ndarray, faces, tol: float = 1e-9) -> bool:
    """True when every vertex lies weakly on one side of each triangle's plane."""
    lifts = np.hstack([coords, np.ones((len(coords), 1))])
    scale = np.abs(coords).max()
    for face in faces:
        normal = np.linalg.svd(lifts[list(face)])[2][-1]
        vals = lifts @ normal / np.linalg.norm(normal[:3])
        if vals.min() < -tol * scale and vals.max() > tol * scale:
            return False
    return True


def _valid_step(coords: np.ndarray, faces, signs, marked: set) -> bool:
    """Still a convex hyperideal polyhedron with the same signs and edge sides.

    The side check also rejects jumps to the time-reversed copy, which has the
    same angles and sits close by when the polyhedron is nearly flat.
    """
    if not _convex_position(coords, faces):
        return False
    try:
        P = build_polyhedron(coords)
    except InvalidPolyhedron:
        return False
    return list(P.vertex_signs) == list(signs) and marked <= {(e.key, e.side) for e in P.skeleton.edges}


def _target_vector(theta: AngleAssignment, g0: MarkedGraph) -> np.ndarray:
    given = theta.as_mapping()
    return np.array([given.get(e.key, 0.0) for e in g0.edges])


def realize_with_log(theta: AngleAssignment, opts: SolveOptions | None = None) -> tuple[HyperidealPolyhedron, SolveLog]:
    opts = opts or SolveOptions()
    report = check_gamma_admissible(theta)
    if not report.satisfied:
        raise NotAdmissible(f"angles violate the admissibility conditions: {report.violations[:3]}")
    graph = theta.graph
    g0 = graph if graph.is_triangulation() else complete_to_admissible_triangulation(graph)
    signs = [report.predicted_signs[v] for v in range(graph.n)]
    return _continue(theta, sample_polyhedron(g0, signs, seed=opts.seed), opts)


def realize_from(theta: AngleAssignment, start: HyperidealPolyhedron, opts: SolveOptions | None = None) -> HyperidealPolyhedron:
    """Continuation from a given start whose skeleton triangulates theta's graph, with theta's signs."""
    opts = opts or SolveOptions()
    report = check_gamma_admissible(theta)
    if not report.satisfied:
        raise NotAdmissible(f"angles violate the admissibility conditions: {report.violations[:3]}")
    g0 = start.skeleton
    graph = theta.graph
    if not g0.is_triangulation() or not ({e.key for e in graph.edges} <= {e.key for e in g0.edges}):
        raise DomainError("start skeleton must be a triangulation containing the target graph")
    if [report.predicted_signs[v] for v in range(graph.n)] != list(start.vertex_signs):
        raise DomainError("start vertex signs differ from the signs predicted by the angles")
    return _continue(theta, start, opts)[0]


def _continue(theta: AngleAssignment, p0: HyperidealPolyhedron, opts: SolveOptions):
    graph = theta.graph
    g0 = p0.skeleton
    signs = list(p0.vertex_signs)
    added = {e.key for e in g0.edges} - {e.key for e in graph.edges}
    marked = {(e.key, e.side) for e in graph.edges}
    param = _Param(signs)
    coords0 = p0.chart_vertices()
    tris = _edge_triangles(g0)
    pinned = _gauge_indices(param, coords0)
    prob = _Problem(param, tris, pinned, param.params(coords0))
    x = prob.base[prob.free].copy()

    theta0 = prob.angles(x)
    theta1 = _target_vector(theta, g0)
    equator = np.array([e.side.value == "equator" for e in g0.edges])
    keep_sign = np.array([e.key not in added for e in g0.edges])
    log = SolveLog()

    t, dt = 0.0, 1.0 / opts.continuation_steps
    halvings = 0
    last_error: type = NoConvergence
    while t < 1.0:
        t_next = min(1.0, t + dt)
        target = (1 - t_next) * theta0 + t_next * theta1
        final = t_next >= 1.0
        tol = opts.residual_tol * (1e-2 if final else 1e2)
        x_new, r, hist, ok = _levenberg_marquardt(prob, x, target, tol, opts.max_newton_iters)
        if ok:
            ang = target + r
            flipped = keep_sign & ((equator & (ang >= 0)) | (~equator & (ang <= 0)))
            if flipped.any() or not _valid_step(param.coords(prob.full(x_new)), g0.faces, signs, marked):
                ok, last_error = False, CombinatoricsChanged
        elif final and np.abs(r).max() < opts.residual_tol:
            # the polishing target was not reached but the contract tolerance is
            ok = True
        else:
            last_error = NoConvergence
        if ok:
            log.steps.append({"t": t_next, "iterations": len(hist) - 1, "residual": float(np.abs(r).max()),
                              "history": hist})
            x, t = x_new, t_next
            dt = min(dt * 1.5, 1.0 / opts.continuation_steps) if halvings == 0 else dt
            continue
        halvings += 1
        if halvings > opts.max_halvings:
            if last_error is CombinatoricsChanged:
                raise CombinatoricsChanged(f"an edge angle changed sign near t = {t:.4f}")
            raise NoConvergence(f"Newton failed near t = {t:.4f}, residual {np.abs(r).max():.3e}")
        dt /= 2

    coords = param.coords(prob.full(x))
    try:
        P = build_polyhedron(coords)
    except InvalidPolyhedron as exc:
        raise CombinatoricsChanged(f"solution is not a valid polyhedron: {exc}") from exc
    if P.skeleton != graph or list(P.vertex_signs) != signs:
        raise CombinatoricsChanged("solution has a different skeleton or vertex signs")
    return P, log


def realize(theta: AngleAssignment, opts: SolveOptions | None = None) -> HyperidealPolyhedron:
    return realize_with_log(theta, opts)[0]


# --- gauge ----------------------------------------------------------------------------


def _first_crossing(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Quadric point on the segment u -> w closest to u (u itself when ideal)."""
    u, w = u / np.linalg.norm(u), w / np.linalg.norm(w)
    a, b, c = inner(u, u), inner(u, w), inner(w, w)
    if abs(a) <= 1e-12:
        return u
    disc = math.sqrt(max(b * b - a * c, 0.0))
    # roots of a + 2 b t + c t^2; the smaller positive one
    roots = [t for t in ((-b - disc) / c, (-b + disc) / c) if t > 0] if abs(c) > 1e-14 else [-a / (2 * b)]
    return u + min(roots) * w


def gauge_isometry(P: HyperidealPolyhedron) -> Isometry:
    face = P.faces[0]
    pts = [ProjectivePoint(_first_crossing(P.lifts[face[i]], P.lifts[face[(i + 1) % len(face)]])) for i in range(3)]
    try:
        return normalize_boundary_triple(pts[0], pts[1], pts[2], tol=1e-7)
    except WrongCyclicOrder:
        return normalize_boundary_triple(pts[0], pts[2], pts[1], tol=1e-7)


def gauge_fix(P: HyperidealPolyhedron) -> HyperidealPolyhedron:
    """Move the first face's boundary circle through three fixed quadric points."""
    return P.transformed(gauge_isometry(P))


def canonical_lifts(P: HyperidealPolyhedron) -> np.ndarray:
    """Unit vertex lifts with a common sign fixed by the mean lift's leading large entry."""
    lifts = P.lifts / np.linalg.norm(P.lifts, axis=1)[:, None]
    m = lifts.mean(axis=0)
    # first entry within 1e-6 of the largest magnitude, so near-ties resolve the same way
    k = int(np.flatnonzero(np.abs(m) >= np.abs(m).max() - 1e-6)[0])
    return -lifts if m[k] < 0 else lifts
