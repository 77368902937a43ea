import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obstacle_spectra.geometry import (
    ConvexRegion,
    GeometryError,
    Hyperplane2D,
    Shape,
    Translate,
    chebyshev_center,
    clip_halfplane,
    contains,
    distance_to_translate,
    estimate_asymmetry,
    heart,
    inradius,
    interior_reflection_offset,
    is_symmetric,
    l_shape,
    reflect_contained,
    symmetry_axes,
)

SQUARE = Shape.rectangle(1, 1)
TRIANGLE = Shape.polygon([[0, 0], [4, 0], [1, 2]])
EQUILATERAL = Shape.polygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])


def test_closed_containment_on_edge():
    assert contains(SQUARE, (0.5, 1.0))
    assert contains(SQUARE, (0.0, 0.0))
    assert not contains(SQUARE, (0.5, 1.0 + 1e-6))


def test_distance_to_translate_corner():
    assert distance_to_translate((2, 3), Translate(SQUARE, (0, 0))) == pytest.approx(math.sqrt(5))
    assert distance_to_translate((0.5, 0.5), Translate(SQUARE, (0, 0))) == 0.0


def test_disc_distance_and_translate():
    t = Translate(Shape.disc((0, 0), 0.2), (1.0, 1.0))
    assert t.distance([[1.5, 1.0]])[0] == pytest.approx(0.3)
    assert t.contains([[1.1, 1.1]])[0]


def test_polygon_validation():
    with pytest.raises(GeometryError):
        Shape.polygon([[0, 0], [1, 1], [1, 0], [0, 1]])  # self-intersecting
    with pytest.raises(GeometryError):
        Shape.polygon([[0, 0], [1, 0]])
    with pytest.raises(GeometryError):
        Shape.polygon(l_shape().vertices, convex=True)


def test_from_dict_missing_kind_names_key():
    with pytest.raises(GeometryError, match="'kind'"):
        Shape.from_dict({"vertices": [[0, 0], [1, 0], [0, 1]]})


def test_round_trip_dict():
    for s in (SQUARE, TRIANGLE, Shape.disc((1, 2), 0.5), l_shape()):
        back = Shape.from_dict(s.to_dict())
        assert back.kind == s.kind
        assert back.area == pytest.approx(s.area)


def test_basic_measures():
    assert SQUARE.area == pytest.approx(1.0)
    assert SQUARE.perimeter == pytest.approx(4.0)
    assert SQUARE.diameter == pytest.approx(math.sqrt(2))
    assert Shape.disc((0, 0), 2).area == pytest.approx(4 * math.pi)
    assert l_shape().area == pytest.approx(0.75)


def test_chebyshev_center_matches_incircle_formula():
    # a triangle's inradius is 2A / P
    r, c = chebyshev_center(TRIANGLE)
    assert r == pytest.approx(2 * TRIANGLE.area / TRIANGLE.perimeter, rel=1e-9)
    assert TRIANGLE.boundary_distance([c])[0] == pytest.approx(r, rel=1e-9)


@pytest.mark.parametrize("shape", [SQUARE, TRIANGLE, EQUILATERAL, Shape.rectangle(1, 4)])
def test_grid_inradius_against_linear_program(shape):
    h = shape.diameter / 200
    r_grid, _ = inradius(shape, h)
    r_lp, _ = chebyshev_center(shape)
    assert r_lp - 2 * h <= r_grid <= r_lp + 1e-12


def test_reflect_contained_square():
    assert reflect_contained(SQUARE, Hyperplane2D((1.0, 0.0), 0.7))
    assert not reflect_contained(SQUARE, Hyperplane2D((1.0, 0.0), 0.3))
    with pytest.raises(GeometryError):
        reflect_contained(SQUARE, Hyperplane2D((1.0, 0.0), 1.5))


def test_reflect_contained_disc_is_centre_rule():
    d = Shape.disc((0, 0), 1)
    assert reflect_contained(d, Hyperplane2D((0.0, 1.0), 0.01))
    assert not reflect_contained(d, Hyperplane2D((0.0, 1.0), -0.01))


def test_reflect_contained_requires_convexity():
    with pytest.raises(GeometryError):
        reflect_contained(l_shape(), Hyperplane2D((1.0, 0.0), 0.5))


def test_interior_reflection_offset_equilateral_axis():
    tol = 1e-3
    t = interior_reflection_offset(EQUILATERAL, (1.0, 0.0), tol)
    assert 0.5 <= t <= 0.5 + 3 * tol / 8 + 1e-12


def _brute_offset(shape, u, n=4000):
    """Scan t from the top down; the first failure bounds the minimal offset."""
    hi = float((shape.vertices @ u).max())
    lo = float((shape.vertices @ u).min())
    ts = np.linspace(hi, lo, n + 2)[1:-1]
    last = hi
    for t in ts:
        if not reflect_contained(shape, Hyperplane2D(tuple(u), float(t))):
            return last, (hi - lo) / (n + 1)
        last = t
    return last, (hi - lo) / (n + 1)


@pytest.mark.parametrize("theta", [0.3, 1.1, 2.0, 3.7, 5.5])
def test_reflection_offset_against_scan(theta):
    u = np.array([math.cos(theta), math.sin(theta)])
    tol = 1e-3
    t = interior_reflection_offset(TRIANGLE, u, tol)
    t_scan, step = _brute_offset(TRIANGLE, u)
    assert abs(t - t_scan) <= step + tol


def test_heart_of_square_is_centre():
    H = heart(SQUARE, 360, 1e-3)
    assert H.degenerate
    assert H.diameter <= 2e-3
    assert np.hypot(*(H.centroid - 0.5)) <= 1e-3


def test_heart_of_disc_is_centre():
    H = heart(Shape.disc((0.3, -0.2), 1), 360, 1e-3)
    assert np.hypot(*(H.centroid - [0.3, -0.2])) <= 1e-3


def test_heart_of_rectangle():
    H = heart(Shape.rectangle(1, 2), 360, 1e-3)
    assert np.hypot(*(H.centroid - [0.5, 1.0])) <= 1e-3


def test_heart_refinement_shrinks_and_converges():
    H360 = heart(TRIANGLE, 360, 1e-3)
    H720 = heart(TRIANGLE, 720, 1e-3)
    assert not H360.degenerate
    # direction set for 360 is a subset of the one for 720
    assert H360.distance(H720.vertices).max() <= 1e-9
    assert H720.distance(H360.vertices).max() <= 0.01


def test_heart_is_inside_shape_and_contains_nothing_outside():
    H = heart(TRIANGLE, 180, 1e-3)
    assert np.all(TRIANGLE.contains(H.vertices))


def test_heart_guards():
    with pytest.raises(GeometryError):
        heart(l_shape())
    with pytest.raises(GeometryError):
        heart(SQUARE, n_directions=4)


def test_symmetry_axes():
    assert len(symmetry_axes(SQUARE, 1e-9)) == 4
    assert len(symmetry_axes(Shape.rectangle(1, 2), 1e-9)) == 2
    assert len(symmetry_axes(TRIANGLE, 1e-9)) == 0
    assert len(symmetry_axes(EQUILATERAL, 1e-9)) == 3
    assert is_symmetric(SQUARE, Hyperplane2D((1.0, 0.0), 0.5), 1e-9)


def test_asymmetry_is_deterministic_and_orders_shapes():
    kw = dict(n_boundary=40, n_radii=6, n_samples=600, seed=7)
    a1 = estimate_asymmetry(SQUARE, **kw)
    a2 = estimate_asymmetry(SQUARE, **kw)
    assert a1 == a2
    assert estimate_asymmetry(l_shape(), **kw) < a1


def test_convex_region_point_distance():
    R = ConvexRegion(np.array([[0.5, 0.5]]), degenerate=True)
    assert R.distance([[0.5, 1.5]])[0] == pytest.approx(1.0)


coords = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 2 * math.pi), coords, coords, coords)
def test_reflection_is_an_involution(theta, offset, x, y):
    H = Hyperplane2D.from_angle(theta, offset)
    p = np.array([[x, y]])
    assert np.allclose(H.reflect(H.reflect(p)), p, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(coords, coords, coords, coords)
def test_distance_commutes_with_translation(dx, dy, px, py):
    d0 = TRIANGLE.distance([[px, py]])[0]
    d1 = TRIANGLE.translated((dx, dy)).distance([[px + dx, py + dy]])[0]
    assert d0 == pytest.approx(d1, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-1, 1))
def test_clip_keeps_subset(theta, t):
    u = np.array([math.cos(theta), math.sin(theta)])
    poly = clip_halfplane(SQUARE.vertices - 0.5, u, t)
    if len(poly):
        assert np.all(poly @ u <= t + 1e-12)
        assert np.all(np.abs(poly) <= 0.5 + 1e-12)
