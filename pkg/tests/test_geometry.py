import itertools
import random
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cshape.geometry import (
    convex_hull, digit_tile_hull, extreme_points, extreme_points_lp, facet_normal_eigencheck,
    in_hull, minimizing_face, normal_fan, opposite_normal_cone, polytope_test, tile_points, tile_raster,
)
from cshape.lattice import dot
from cshape.substitution import Substitution

from conftest import load_example

F = Fraction
points2 = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=40)
points3 = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
                   min_size=1, max_size=25)


def test_square_faces():
    P = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1), (F(1, 2), F(1, 2))])
    assert len(P.vertices) == 4
    assert len(P.faces[1]) == 4
    bottom = [i for i, v in enumerate(P.vertices) if v[1] == 0]
    cone = opposite_normal_cone(P, frozenset(bottom))
    assert cone.generators == ((0, 1),)
    origin = P.vertices.index((0, 0))
    assert sorted(opposite_normal_cone(P, frozenset([origin])).generators) == [(0, 1), (1, 0)]


def test_collinear_and_single_points():
    assert sorted(extreme_points([(0, 0), (1, 1), (2, 2), (3, 3)])) == [(0, 0), (3, 3)]
    assert extreme_points([(2, 5)]) == [(2, 5)]


@given(points2)
def test_hull_matches_feasibility_oracle_2d(pts):
    assert sorted(extreme_points(pts)) == sorted(extreme_points_lp(pts))


@given(points3)
def test_hull_matches_feasibility_oracle_3d(pts):
    assert sorted(extreme_points(pts)) == sorted(extreme_points_lp(pts))


@given(points2, st.tuples(st.integers(-7, 7), st.integers(-7, 7)))
def test_membership_agrees_with_facets(pts, x):
    P = convex_hull(pts)
    if P.dim < 2:
        return
    assert P.contains(x) == in_hull(x, pts)


@pytest.mark.parametrize("pts", [
    [(0, 0), (1, 0), (0, 1), (1, 1)],
    [(0, 0), (3, 1), (1, 4), (-2, 2), (-1, -1)],
    [(F(1), F(1, 2)), (F(1), F(3, 2)), (F(-2), F(-3, 2)), (F(-2), F(-5, 2))],
])
def test_normal_fan_covers_sampled_directions(pts):
    P = convex_hull(pts)
    fan = normal_fan(P)
    rng = random.Random(7)
    for _ in range(1000):
        v = (rng.randint(-50, 50), rng.randint(-50, 50))
        if v == (0, 0):
            continue
        face = minimizing_face(P, v)
        hits = [f for f, cone in fan if cone.contains(v)]
        assert hits, v
        assert face in hits
        # v attains its minimum on every vertex of the face
        m = min(dot(v, p) for p in P.vertices)
        assert all(dot(v, P.vertices[i]) == m for i in face)


def test_nonpolytope_counts_grow_linearly():
    test = polytope_test(load_example("nonpolytope"), 6)
    assert test.is_polytope is None
    assert test.counts == [n + 3 for n in range(1, 7)]


def test_nonselfsimilar_hull():
    z = load_example("nonselfsimilar")
    test = polytope_test(z, 6)
    assert test.is_polytope and test.level == 1
    hull = digit_tile_hull(z, test.level)
    assert sorted(hull.vertices) == sorted([(F(1), F(1, 2)), (F(1), F(3, 2)), (F(-2), F(-3, 2)),
                                            (F(-2), F(-5, 2))])
    report, eig, integral = facet_normal_eigencheck(z)
    assert integral and sorted(eig) == [2, 3]
    assert all(r.power == 1 for r in report)


def test_scalar_expansions_and_gasket():
    gasket = load_example("gasket")
    assert polytope_test(gasket).is_polytope
    hull = digit_tile_hull(gasket, 1)
    assert len(hull.vertices) == 3


def test_negative_scalar_expansion_is_not_shortcut():
    z = Substitution("x", [[-2, 0], [0, -2]], [(0, 0), (1, 0), (0, 1), (-1, -1)], {"x": "xxxx"})
    test = polytope_test(z, 4)
    assert test.counts == [3, 6, 6]
    assert test.is_polytope and test.level == 2


def test_digit_tile_hull_contains_tile_approximations():
    z = load_example("nonselfsimilar")
    hull = digit_tile_hull(z, 1)
    approx = tile_points(z, 4)
    assert all(hull.contains(p) for p in approx.points)


def test_twin_dragon_images():
    z = load_example("twindragon")
    approx, pgm, svg = tile_raster(z, 12, 128, 96, 4)
    assert len(approx.points) == 4096 == len(set(approx.points))
    header = pgm.split(b"\n", 3)
    assert header[:3] == [b"P5", b"128 96", b"255"]
    assert len(header[3]) == 128 * 96
    root = ET.fromstring(svg.split("\n", 1)[1])
    assert root.get("version") == "1.1"
    assert len(list(root.iter("{http://www.w3.org/2000/svg}rect"))) == 4096 + 1


def test_three_dimensional_faces():
    cube = list(itertools.product((0, 1), repeat=3))
    P = convex_hull(cube + [(F(1, 2),) * 3])
    assert len(P.vertices) == 8
    assert len(P.facets) == 6
    assert len(P.faces[1]) == 12
