"""Time the batched dihedral-angle kernel against the per-edge reference.

    python3 benchmarks/bench_kernels.py [--repeat 20]

The numba row is skipped when numba is missing or ADSPOLY_DISABLE_NUMBA is set.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from adspoly import _accel
from adspoly.polyhedron import boost_angle, sample_polyhedron


def triangle_pairs(P):
    """Rows (a, b, z1, z2) for every edge of a triangulated polyhedron."""
    rows = []
    for (a, b), (f1, f2) in sorted(P.edge_faces.items()):
        z1 = next(v for v in P.faces[f1] if v not in (a, b))
        z2 = next(v for v in P.faces[f2] if v not in (a, b))
        rows.append((a, b, z1, z2))
    return np.array(rows, dtype=np.int64)


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--copies", type=int, default=200, help="stack this many polyhedra into one batch")
    args = parser.parse_args()

    polys = [sample_polyhedron(8, ["+"] * 8, seed=s) for s in range(args.copies)]
    single = (polys[0].lifts, triangle_pairs(polys[0]))
    stacked = (np.vstack([P.lifts for P in polys]), np.vstack([triangle_pairs(P) + 8 * k for k, P in enumerate(polys)]))
    for label, (lifts, tris) in (("one polyhedron", single), ("stacked batch", stacked)):
        print(f"{label}: {len(tris)} edges")
        run_batch(lifts, tris, args.repeat)


def run_batch(lifts, tris, repeat: int) -> None:
    def python_loop():
        return [boost_angle(*(lifts[i] for i in row)) for row in tris]

    timings = {"python per edge": best_of(python_loop, max(1, repeat // 10))}
    timings["numpy batched"] = best_of(lambda: _accel.boost_angles_numpy(lifts, tris), repeat)
    if _accel._numba_enabled():
        _accel.boost_angles(lifts, tris)  # compile outside the timed region
        timings["numba"] = best_of(lambda: _accel.boost_angles(lifts, tris), repeat)
    ref = timings["python per edge"]
    for name, t in timings.items():
        print(f"  {name:16s} {t * 1e3:9.3f} ms  x{ref / t:7.1f}")

if __name__ == "__main__":
    main()
