"""Batched dihedral angles of triangle pairs, with an optional numba kernel.

Set ADSPOLY_DISABLE_NUMBA=1 to force the numpy path (numba is an optional extra).
Both paths evaluate the same closed form: writing the second half-plane direction
as a e1 + b t in an orthonormal basis of the edge's normal plane,

    |b| / sqrt(q2) = |det(u, w, z1, z2)| sqrt|G(u, w)| / sqrt(|G(u, w, z1)| |G(u, w, z2)|)

where G is the Gram determinant of the form.  The 4x4 determinant stays accurate
when the two faces are nearly coplanar, which is where the angle is small.
"""

from __future__ import annotations

import math
import os

import numpy as np

FORM_DIAG = np.array([1.0, 1.0, -1.0, -1.0])


def _numba_enabled() -> bool:
    if os.environ.get("ADSPOLY_DISABLE_NUMBA", "") not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _gram(vecs: np.ndarray) -> np.ndarray:
    """Batched form-Gram matrices of stacks of row vectors (batch, k, 4)."""
    return np.einsum("bid,d,bjd->bij", vecs, FORM_DIAG, vecs)


def boost_angles_numpy(lifts: np.ndarray, tris: np.ndarray, inside: np.ndarray | None = None) -> np.ndarray:
    a, b, z1, z2 = (lifts[tris[:, k]] for k in range(4))
    uw = np.stack([a, b], axis=1)
    g2 = np.linalg.det(_gram(uw))
    g3a = np.linalg.det(_gram(np.stack([a, b, z1], axis=1)))
    g3b = np.linalg.det(_gram(np.stack([a, b, z2], axis=1)))
    d4 = np.linalg.det(np.stack([a, b, z1, z2], axis=1))
    # the edge spans a (1,1) plane and both half-plane directions are spacelike
    valid = (g2 < 0) & (g3a < 0) & (g3b < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(valid, np.abs(d4) * np.sqrt(np.abs(g2)) / np.sqrt(np.abs(g3a * g3b)), np.nan)
    # sign of <d1, d2>: the normal-plane projections of z1 and z2
    gm = _gram(uw)
    k1 = np.stack([np.einsum("bd,d,bd->b", a, FORM_DIAG, z1), np.einsum("bd,d,bd->b", b, FORM_DIAG, z1)], axis=1)
    k2 = np.stack([np.einsum("bd,d,bd->b", a, FORM_DIAG, z2), np.einsum("bd,d,bd->b", b, FORM_DIAG, z2)], axis=1)
    p = np.einsum("bd,d,bd->b", z1, FORM_DIAG, z2) - np.einsum("bi,bi->b", k1, np.linalg.solve(gm, k2[..., None])[..., 0])
    mag = np.arcsinh(ratio)
    out = np.where(p > 0, -mag, mag)
    if inside is not None:
        side = np.linalg.det(np.stack([a, b, z1, np.broadcast_to(inside, a.shape)], axis=1))
        smooth = np.arcsinh(np.sign(side * d4) * ratio)
        out = np.where(p < 0, smooth, out)
    return out


_numba_kernel = None


def _build_numba_kernel():
    import numba

    @numba.njit(cache=True, inline="always")
    def form(x, y):
        return x[0] * y[0] + x[1] * y[1] - x[2] * y[2] - x[3] * y[3]

    @numba.njit(cache=True, inline="always")
    def det3(a, b, c, d, e, f, g, h, i):
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    @numba.njit(cache=True, inline="always")
    def gram3(x, y, z):
        xx, xy, xz, yy, yz, zz = form(x, x), form(x, y), form(x, z), form(y, y), form(y, z), form(z, z)
        return det3(xx, xy, xz, xy, yy, yz, xz, yz, zz)

    @numba.njit(cache=True, inline="always")
    def det4(a, b, c, d):
        # rows a, b, c, d; Laplace expansion along the 2x2 minors of the first two rows
        s0 = a[0] * b[1] - a[1] * b[0]
        s1 = a[0] * b[2] - a[2] * b[0]
        s2 = a[0] * b[3] - a[3] * b[0]
        s3 = a[1] * b[2] - a[2] * b[1]
        s4 = a[1] * b[3] - a[3] * b[1]
        s5 = a[2] * b[3] - a[3] * b[2]
        c5 = c[2] * d[3] - c[3] * d[2]
        c4 = c[1] * d[3] - c[3] * d[1]
        c3 = c[1] * d[2] - c[2] * d[1]
        c2 = c[0] * d[3] - c[3] * d[0]
        c1 = c[0] * d[2] - c[2] * d[0]
        c0 = c[0] * d[1] - c[1] * d[0]
        return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0

    @numba.njit(cache=True)
    def kernel(lifts, tris, inside, use_inside):
        m = tris.shape[0]
        out = np.empty(m)
        for e in range(m):
            u, w = lifts[tris[e, 0]], lifts[tris[e, 1]]
            z1, z2 = lifts[tris[e, 2]], lifts[tris[e, 3]]
            guu, guw, gww = form(u, u), form(u, w), form(w, w)
            g2 = guu * gww - guw * guw
            g3a, g3b = gram3(u, w, z1), gram3(u, w, z2)
            if not (g2 < 0 and g3a < 0 and g3b < 0):
                out[e] = np.nan
                continue
            d4 = det4(u, w, z1, z2)
            ratio = abs(d4) * math.sqrt(-g2) / math.sqrt(g3a * g3b)
            a1, b1 = form(u, z1), form(w, z1)
            a2, b2 = form(u, z2), form(w, z2)
            # k1^T G^{-1} k2 for the 2x2 Gram matrix of u, w
            corr = (a1 * (gww * a2 - guw * b2) + b1 * (-guw * a2 + guu * b2)) / g2
            p = form(z1, z2) - corr
            if p < 0 and use_inside:
                s = 1.0 if det4(u, w, z1, inside) * d4 > 0 else -1.0
                out[e] = math.asinh(s * ratio)
            else:
                mag = math.asinh(ratio)
                out[e] = -mag if p > 0 else mag
        return out

    return kernel


def boost_angles(lifts: np.ndarray, tris, inside: np.ndarray | None = None) -> np.ndarray:
    """Signed dihedral angles at edges (a, b) between triangles towards z1 and z2, for rows (a, b, z1, z2)."""
    global _numba_kernel
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 4)
    lifts = np.ascontiguousarray(lifts, dtype=float)
    if _numba_enabled():
        if _numba_kernel is None:
            _numba_kernel = _build_numba_kernel()
        ref = np.zeros(4) if inside is None else np.asarray(inside, dtype=float)
        return _numba_kernel(lifts, tris, ref, inside is not None)
    return boost_angles_numpy(lifts, tris, inside)
