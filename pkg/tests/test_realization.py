import numpy as np
import pytest

from adspoly.admissibility import AngleAssignment, check_gamma_admissible, sample_admissible_with_signs
from adspoly.errors import DomainError, NotAdmissible
from adspoly.graphs import MarkedGraph, Side
from adspoly.hs_kernel import inner, random_isometry
from adspoly.polyhedron import angle_map, sample_polyhedron
from adspoly.realization import (
    SolveOptions,
    canonical_lifts,
    gauge_fix,
    realize,
    realize_with_log,
)
from samples import polyhedra


def _canon(P):
    return canonical_lifts(gauge_fix(P))


def _round_trip_cases():
    picked = {}
    for P in polyhedra()[:40]:
        key = (P.n, P.vertex_signs.count("0") == P.n, P.vertex_signs.count("+") == P.n)
        if P.n <= 7 and key not in picked:
            picked[key] = P
    return sorted(picked.values(), key=lambda P: P.n)


@pytest.mark.parametrize("P", _round_trip_cases(), ids=lambda P: f"n{P.n}-{''.join(P.vertex_signs)}")
def test_round_trip(P):
    theta = angle_map(P)
    Q, log = realize_with_log(theta, SolveOptions(seed=P.n))
    assert np.abs(np.array(angle_map(Q).values) - theta.values).max() < 1e-8
    assert Q.vertex_signs == P.vertex_signs and Q.skeleton == P.skeleton
    assert np.abs(_canon(P) - _canon(Q)).max() < 1e-6
    assert log.steps[-1]["t"] == 1.0


def test_tetrahedron_all_ideal():
    g = MarkedGraph.from_diagonals(4, top=[(0, 2)], bottom=[(1, 3)])
    theta = AngleAssignment(g, tuple(-1.0 if e.side is Side.EQUATOR else 2.0 for e in g.edges))
    assert set(check_gamma_admissible(theta).predicted_signs.values()) == {"0"}
    P = realize(theta)
    assert P.vertex_signs == ("0",) * 4
    for x in P.lifts:
        assert abs(inner(x, x)) / np.dot(x, x) < 1e-9
    assert np.abs(np.array(angle_map(P).values) - theta.values).max() < 1e-8


def test_half_angles_realize_differently():
    P = polyhedra()[6]
    theta = angle_map(P)
    half = theta.scaled(0.5)
    Q = realize(half, SolveOptions(seed=1))
    assert np.abs(np.array(angle_map(Q).values) - half.values).max() < 1e-8
    assert np.abs(_canon(P) - _canon(Q)).max() > 1e-3


def test_path_invariance():
    P = polyhedra()[13]
    theta = angle_map(P)
    a = realize(theta, SolveOptions(seed=3))
    b = realize(theta, SolveOptions(seed=17))
    assert np.abs(_canon(a) - _canon(b)).max() < 1e-6


def test_monotone_residual_history():
    P = polyhedra()[8]
    _, log = realize_with_log(angle_map(P), SolveOptions(seed=2))
    for step in log.steps:
        hist = step["history"]
        assert all(b < a for a, b in zip(hist, hist[1:]))
        assert step["residual"] < 1e-6


def test_gauge_fix_properties():
    rng = np.random.default_rng(9)
    for P in polyhedra()[:20]:
        G = gauge_fix(P)
        assert np.abs(_canon(G) - canonical_lifts(gauge_fix(G))).max() < 1e-9
        assert np.abs(np.array(angle_map(G).values) - angle_map(P).values).max() < 1e-9
        Q = P.transformed(random_isometry(rng))
        assert np.abs(_canon(Q) - _canon(P)).max() < 1e-8


def test_non_triangulated_skeleton():
    g = MarkedGraph.from_diagonals(6, top=[(0, 2), (0, 4)], bottom=[(1, 3), (3, 5), (1, 5)])
    assert not g.is_triangulation()
    for signs in (["0"] * 6, ["+", "0", "+", "0", "+", "0"]):
        P = sample_polyhedron(g, signs, seed=1)
        assert P.skeleton == g and list(P.vertex_signs) == signs
        assert any(len(f) == 4 for f in P.faces)
        Q = realize(angle_map(P), SolveOptions(seed=4))
        assert Q.skeleton == g
        assert np.abs(_canon(P) - _canon(Q)).max() < 1e-6


def test_sampled_angles_with_signs():
    g = MarkedGraph.from_diagonals(5, top=[(0, 2)], bottom=[(1, 4), (1, 3)])
    signs = ["+", "0", "+", "0", "+"]
    theta = sample_admissible_with_signs(g, signs, seed=3)
    rep = check_gamma_admissible(theta)
    assert rep.satisfied
    assert [rep.predicted_signs[v] for v in range(5)] == signs
    P = realize(theta)
    assert list(P.vertex_signs) == signs


def test_rejections():
    g = MarkedGraph.from_diagonals(4, top=[(0, 2)], bottom=[(1, 3)])
    with pytest.raises(NotAdmissible):
        realize(AngleAssignment(g, tuple(1.0 for _ in g.edges)))
    with pytest.raises(DomainError):
        SolveOptions(residual_tol=0.0)
    with pytest.raises(DomainError):
        sample_admissible_with_signs(g, ["+"] * 3)
