import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adspoly.errors import (
    CoincidentPoints,
    DegenerateConfiguration,
    NotDiagonal,
    NotDistinct,
    NotOnQuadric,
    PointOnQuadric,
    WrongCyclicOrder,
)
from adspoly.hs_kernel import (
    ComplexDistance,
    Isometry,
    LineType,
    PointLocation,
    ProjectivePlane,
    ProjectivePoint,
    boundary_param,
    boundary_point,
    classify_line,
    classify_point,
    cross_ratio,
    dual,
    hilbert_distance,
    inner,
    lie_algebra_basis,
    moebius,
    normalize_ideal_triple,
    pair_from_matrix,
    pure_translation,
    random_isometry,
)

from oracles import (
    dual_spacelike_angle,
    mod_pi_gap,
    random_quadric_vector,
    sample_pair,
    spacelike_distance,
    timelike_angle,
)

P = ProjectivePoint.from_chart


def test_inner_examples():
    assert inner([1, 0, 0, 0], [1, 0, 0, 0]) == 1
    assert inner([0, 0, 0, 1], [0, 0, 0, 1]) == -1
    assert inner([1, 1, 1, 1], [1, -1, 1, -1]) == 0


def test_canonical_representative():
    p = ProjectivePoint([0, -3, 4, 0])
    assert np.allclose(p.coords, [0, 0.6, -0.8, 0])
    assert ProjectivePoint([0, 3, -4, 0]).isclose(p)


def test_classify_point_examples():
    assert classify_point(P([0, 0, 0])) is PointLocation.INTERIOR
    assert classify_point(P([1, 0, 0])) is PointLocation.BOUNDARY
    assert classify_point(P([2, 0, 0])) is PointLocation.EXTERIOR


def test_classify_line_examples():
    assert classify_line(P([0, 0, 0]), P([0.5, 0, 0])) is LineType.SPACELIKE_A
    assert classify_line(P([0, 0, 0]), P([0, 0, 0.5])) is LineType.TIMELIKE_B
    assert classify_line(P([1, 0, 0]), P([1, 0, 1])) is LineType.LIGHTLIKE_D
    assert classify_line(P([3, 0, 0]), P([3, 1, 0])) is LineType.DUAL_SPACELIKE_C
    with pytest.raises(CoincidentPoints):
        classify_line(P([0.1, 0, 0]), ProjectivePoint([-0.2, 0, 0, -2]))


def test_cross_ratio_examples():
    s = 0.3
    assert cross_ratio(0, s, -1, 1) == pytest.approx((1 - s) / (1 + s))
    assert cross_ratio(0.4, 0.4, 2, 5) == pytest.approx(1)
    assert cross_ratio(0, 1, 1j, -1j) == pytest.approx(-1j)
    # infinity enters as a limit
    assert cross_ratio(0, math.inf, 2, 3) == pytest.approx(2 / 3)
    assert cross_ratio(0, 1e12, 2, 3) == pytest.approx(2 / 3)
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(1, 2, 1, 1)


def test_hilbert_examples():
    d = hilbert_distance(P([0, 0, 0]), P([math.tanh(1), 0, 0]))
    assert d.re == pytest.approx(1, abs=1e-12) and d.im == 0
    d = hilbert_distance(P([2, 0, 0]), P([3, 0, 0]))
    assert d.re < 0 and d.im == 0
    d = hilbert_distance(P([0, 0, 0]), P([0, 0, 1]))
    assert d.re == pytest.approx(0, abs=1e-12)
    assert d.im == pytest.approx(math.pi / 4, abs=1e-12)


def test_hilbert_special_cases():
    x = P([0.2, 0.1, 0.3])
    assert hilbert_distance(x, ProjectivePoint(-3 * x.coords)) == ComplexDistance(0.0, 0.0)
    with pytest.raises(PointOnQuadric):
        hilbert_distance(P([1, 0, 0]), x)
    with pytest.raises(ValueError):
        ComplexDistance(0.0, -math.pi)


@pytest.mark.parametrize(
    "kind", ["ads", "dual_same", "dual_opposite", "mixed", "timelike", "dual_spacelike", "lightlike"]
)
def test_value_table(kind):
    rng = np.random.default_rng(11)
    for _ in range(60):
        x, y = sample_pair(rng, kind)
        d = hilbert_distance(ProjectivePoint(x), ProjectivePoint(y))
        if kind == "ads":
            assert d.re == pytest.approx(spacelike_distance(x, y), abs=1e-9) and d.im == 0
        elif kind == "dual_same":
            assert d.re == pytest.approx(-spacelike_distance(x, y), abs=1e-9) and d.im == 0
        elif kind == "dual_opposite":
            assert mod_pi_gap(d.im, math.pi) < 1e-9
        elif kind == "mixed":
            assert mod_pi_gap(d.im, math.pi / 2) < 1e-9
        elif kind == "timelike":
            assert abs(d.re) < 1e-9
            assert mod_pi_gap(d.im, timelike_angle(x, y)) < 1e-9
        elif kind == "dual_spacelike":
            assert abs(d.re) < 1e-9
            assert mod_pi_gap(d.im, -dual_spacelike_angle(x, y)) < 1e-9
        else:
            assert d == ComplexDistance(0.0, 0.0)


def test_dual_examples():
    plane = dual(P([0, 0, 0]))
    assert np.allclose(plane.covector, [0, 0, 0, 1])
    p = ProjectivePoint([1, 0, 0, 1])
    tangent = dual(p)
    assert tangent.contains(p)
    assert dual(dual(p)).isclose(p)
    assert isinstance(dual(ProjectivePlane([1, 2, 3, 4])), ProjectivePoint)


def test_duality_distance_is_right_angle():
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = ProjectivePoint(rng.normal(size=4))
        if abs(x.self_inner()) < 0.05:
            continue
        # random vector of the polar plane
        basis = np.linalg.svd((np.diag([1, 1, -1, -1]) @ x.coords).reshape(1, 4))[2][1:]
        y = ProjectivePoint(basis.T @ rng.normal(size=3))
        if abs(y.self_inner()) < 0.05 or abs(y.chart_lift()[3]) < 0.05 or abs(x.coords[3]) < 0.05:
            continue
        d = hilbert_distance(x, y)
        assert mod_pi_gap(d.im, math.pi / 2) < 1e-9


def test_boundary_param_fixed_points():
    assert boundary_param(P([0, -1, 0])) == pytest.approx((0, 0), abs=1e-15)
    assert boundary_param(P([-1, 0, 0])) == pytest.approx((1, 1))
    assert boundary_param(P([0, 1, 0])) == (math.inf, math.inf)
    with pytest.raises(NotOnQuadric):
        boundary_param(P([0, 0, 0]))


def test_boundary_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = ProjectivePoint(random_quadric_vector(rng))
        q = boundary_point(*boundary_param(p))
        assert p.isclose(q, 1e-10)


def test_left_leaf_shares_parameter():
    # points a (J b)^T with a fixed form a projective line on the quadric
    rng = np.random.default_rng(4)
    xi = 0.37
    for b in rng.normal(size=(20, 2)):
        pt = boundary_point(xi, b[0] / b[1])
        assert boundary_param(pt)[0] == pytest.approx(xi)
    pts = [boundary_point(xi, z).coords for z in (-1.0, 0.5, 3.0)]
    assert np.linalg.matrix_rank(np.array(pts), tol=1e-10) == 2


def test_pure_translation():
    assert np.allclose(pure_translation(0.0).matrix, np.eye(4))
    lam = 0.7
    g = pure_translation(lam)
    img = g(boundary_point(1.0, 1.0))
    assert boundary_param(img) == pytest.approx((math.exp(lam), math.exp(lam)))
    for t in (-0.4, 0.0, 0.5):
        x = P([0, t, 0])
        assert hilbert_distance(x, g(x)).re == pytest.approx(lam, abs=1e-10)
    end = boundary_point(math.inf, math.inf)
    assert pure_translation(1.0)(end).isclose(end)


def test_normalize_ideal_triple():
    pts = [boundary_point(z, z) for z in (0.0, 1.0, math.inf)]
    assert np.allclose(normalize_ideal_triple(*pts).matrix, np.eye(4))

    pts = [boundary_point(z, z) for z in (1.0, 2.0, 3.0)]
    g = normalize_ideal_triple(*pts)
    images = [boundary_param(g(p)) for p in pts]
    assert images[0] == pytest.approx((0, 0), abs=1e-12)
    assert images[1] == pytest.approx((1, 1))
    assert images[2] == (math.inf, math.inf)
    # the Moebius map solved by hand: z -> (z - 1)(2 - 3) / ((z - 3)(2 - 1))
    a = g.pair[0]
    for z in (-2.0, 0.5, 5.0):
        assert moebius(a, z) == pytest.approx((z - 1) * (2 - 3) / ((z - 3) * (2 - 1)))
    for p in pts:
        assert classify_point(g(p)) is PointLocation.BOUNDARY


def test_normalize_ideal_triple_errors():
    with pytest.raises(NotDiagonal):
        normalize_ideal_triple(boundary_point(0, 1), boundary_point(1, 1), boundary_point(2, 2))
    with pytest.raises(NotDistinct):
        normalize_ideal_triple(boundary_point(1, 1), boundary_point(1, 1), boundary_point(2, 2))
    with pytest.raises(WrongCyclicOrder):
        normalize_ideal_triple(boundary_point(3, 3), boundary_point(2, 2), boundary_point(1, 1))


def test_isometry_group_structure():
    rng = np.random.default_rng(8)
    g, h = random_isometry(rng), random_isometry(rng)
    gh = g.compose(h)
    assert np.allclose(gh.matrix, g.matrix @ h.matrix)
    assert np.allclose(g.compose(g.inverse()).matrix, np.eye(4), atol=1e-10)
    a, b = pair_from_matrix(gh.matrix)
    # (A, B) and (-A, -B) induce the same matrix
    sign = 1.0 if np.sum(a * gh.pair[0]) > 0 else -1.0
    assert np.allclose(sign * a, gh.pair[0], atol=1e-9) and np.allclose(sign * b, gh.pair[1], atol=1e-9)
    with pytest.raises(ValueError):
        Isometry(np.diag([1.0, 1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        Isometry(np.diag([1.0, 2.0, 1.0, 1.0]))


def test_pair_form_matches_boundary_action():
    rng = np.random.default_rng(9)
    for _ in range(20):
        g = random_isometry(rng)
        for xl, xr in rng.normal(size=(5, 2)):
            img = boundary_param(g(boundary_point(xl, xr)))
            assert img[0] == pytest.approx(moebius(g.pair[0], xl), rel=1e-9, abs=1e-9)
            assert img[1] == pytest.approx(moebius(g.pair[1], xr), rel=1e-9, abs=1e-9)


def test_lie_algebra_basis():
    jm = np.diag([1.0, 1.0, -1.0, -1.0])
    basis = lie_algebra_basis()
    assert len(basis) == 6
    for a in basis:
        assert np.allclose(a.T @ jm + jm @ a, 0)
    assert np.linalg.matrix_rank(np.array([a.ravel() for a in basis])) == 6


def test_apply_isometry_preserves_location():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        g = random_isometry(rng, scale=0.4)
        p = ProjectivePoint(rng.normal(size=4))
        if abs(p.self_inner()) < 1e-3:
            continue
        assert classify_point(g(p)) is classify_point(p)


coords = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(coords, coords, st.floats(1e-3, 1e3), st.floats(-1e3, -1e-3))
def test_scale_invariance(a, b, s1, s2):
    x = np.append(a, 1.0)
    y = np.append(b, 1.0)
    px, py = ProjectivePoint(x), ProjectivePoint(y)
    if min(abs(px.self_inner()), abs(py.self_inner())) < 1e-6 or px.isclose(py, 1e-6):
        return
    assert classify_point(ProjectivePoint(s1 * x)) is classify_point(px)
    assert classify_line(ProjectivePoint(s1 * x), ProjectivePoint(s2 * y)) is classify_line(px, py)
    d1 = hilbert_distance(px, py)
    d2 = hilbert_distance(ProjectivePoint(s1 * x), ProjectivePoint(s2 * y))
    assert d1.re == pytest.approx(d2.re, abs=1e-9)
    assert mod_pi_gap(d1.im, d2.im) < 1e-9


@settings(max_examples=200, deadline=None)
@given(coords, coords, st.integers(0, 2**32 - 1))
def test_isometry_invariance(a, b, seed):
    px, py = P(a), P(b)
    if min(abs(px.self_inner()), abs(py.self_inner())) < 1e-4 or px.isclose(py, 1e-4):
        return
    g = random_isometry(np.random.default_rng(seed), scale=0.3)
    gx = g.apply_lifted(np.append(a, 1.0))
    gy = g.apply_lifted(np.append(b, 1.0))
    # both images must stay on one side of the chart's plane at infinity
    if gx[3] * gy[3] <= 0 or min(abs(gx[3]), abs(gy[3])) < 1e-3:
        return
    d1 = hilbert_distance(px, py)
    d2 = hilbert_distance(ProjectivePoint(gx), ProjectivePoint(gy))
    if classify_line(px, py) is LineType.LIGHTLIKE_D:
        return
    assert d1.re == pytest.approx(d2.re, abs=1e-8 * max(1.0, abs(d1.re)))
    assert mod_pi_gap(d1.im, d2.im) < 1e-8


@settings(max_examples=100, deadline=None)
@given(coords, coords)
def test_symmetry_of_real_distances(a, b):
    px, py = P(a), P(b)
    if min(abs(px.self_inner()), abs(py.self_inner())) < 1e-4 or px.isclose(py, 1e-4):
        return
    d1, d2 = hilbert_distance(px, py), hilbert_distance(py, px)
    if d1.im == 0 and d2.im == 0:
        assert d1.re == pytest.approx(d2.re, abs=1e-9)
