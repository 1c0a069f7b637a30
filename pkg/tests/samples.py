"""Deterministic sets of sampled polyhedra shared across test modules."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from scipy.spatial import ConvexHull

from adspoly.polyhedron import build_polyhedron, sample_polyhedron


def tetra_points(scale0: float = 1.0, h: float = 0.3) -> np.ndarray:
    angles = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    heights = [-h, h, -h, h]
    pts = []
    for k, (a, z) in enumerate(zip(angles, heights)):
        r = math.sqrt(1 + z * z) * (scale0 if k == 0 else 1.0)
        pts.append([r * math.cos(a), r * math.sin(a), z])
    return np.array(pts)


def ideal_tetrahedron():
    return build_polyhedron(tetra_points())


def signature(n: int, seed: int) -> list[str]:
    rng = np.random.default_rng(1000 + seed)
    mode = seed % 3
    if mode == 0:
        return ["0"] * n
    if mode == 1:
        return ["+"] * n
    return [str(s) for s in rng.choice(["0", "+"], size=n)]


@lru_cache(maxsize=None)
def polyhedra(count: int = 200, nmin: int = 4, nmax: int = 8):
    """``count`` polyhedra cycling over n and over all-ideal, all-hyperideal and mixed signs."""
    out = []
    sizes = list(range(nmin, nmax + 1))
    for k in range(count):
        n = sizes[k % len(sizes)]
        out.append(sample_polyhedron(n, signature(n, k), seed=k))
    return tuple(out)


def random_convex_polygon(rng, contains_origin: bool):
    while True:
        k = int(rng.integers(3, 9))
        centre = np.zeros(2) if contains_origin else rng.uniform(-4, 4, size=2)
        pts = centre + rng.normal(scale=rng.uniform(0.3, 2.0), size=(k, 2))
        hull = ConvexHull(pts)
        poly = pts[hull.vertices]  # anticlockwise
        if any(abs(abs(x) - abs(y)) < 1e-6 for x, y in poly):
            continue
        inside = all(np.dot(eq[:2], [0.0, 0.0]) + eq[2] < -1e-9 for eq in hull.equations)
        outside = any(np.dot(eq[:2], [0.0, 0.0]) + eq[2] > 1e-9 for eq in hull.equations)
        if (contains_origin and inside) or (not contains_origin and outside):
            return poly
