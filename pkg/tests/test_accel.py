import numpy as np
import pytest

from adspoly import _accel
from adspoly.polyhedron import boost_angle
from samples import polyhedra


def _rows(P):
    """Every (edge, third vertex, third vertex) combination across the two faces at each edge."""
    rows = []
    for (a, b), (f1, f2) in sorted(P.edge_faces.items()):
        for z1 in P.faces[f1]:
            for z2 in P.faces[f2]:
                if z1 not in (a, b) and z2 not in (a, b):
                    rows.append((a, b, z1, z2))
    return np.array(rows, dtype=np.int64)


@pytest.mark.parametrize("with_inside", [False, True])
def test_numpy_kernel_matches_reference(with_inside):
    for P in polyhedra()[:60]:
        rows = _rows(P)
        inside = P.interior if with_inside else None
        ref = [boost_angle(*(P.lifts[i] for i in row), inside=inside) for row in rows]
        assert np.abs(_accel.boost_angles_numpy(P.lifts, rows, inside) - ref).max() < 1e-12


@pytest.mark.skipif(not _accel._numba_enabled(), reason="numba unavailable or disabled")
@pytest.mark.parametrize("with_inside", [False, True])
def test_numba_kernel_matches_numpy(with_inside):
    for P in polyhedra()[:60]:
        rows = _rows(P)
        inside = P.interior if with_inside else None
        fast = _accel.boost_angles(P.lifts, rows, inside)
        assert np.abs(fast - _accel.boost_angles_numpy(P.lifts, rows, inside)).max() < 1e-12


def test_disable_switch(monkeypatch):
    monkeypatch.setenv("ADSPOLY_DISABLE_NUMBA", "1")
    assert not _accel._numba_enabled()
    P = polyhedra()[5]
    rows = _rows(P)
    assert np.array_equal(_accel.boost_angles(P.lifts, rows), _accel.boost_angles_numpy(P.lifts, rows))


def test_invalid_rows_give_nan():
    lifts = np.array([[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.0, 1.0]])
    # the first two points span a negative definite plane, not an edge crossing AdS
    rows = np.array([[0, 1, 2, 3]])
    assert np.isnan(_accel.boost_angles(lifts, rows)).all()
    assert np.isnan(_accel.boost_angles_numpy(lifts, rows)).all()
