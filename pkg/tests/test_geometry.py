from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.geometry import (ChromaticPointSet, GeometryError, in_sphere_flat, lift,
                                      orientation)


def test_orientation_examples():
    assert orientation([(0, 0), (1, 0), (0, 1)]) == 1
    assert orientation([(0, 0), (1, 0), (2, 0)]) == 0
    assert orientation([(0, 0), (0, 1), (1, 0)]) == -1


def test_in_sphere_examples():
    tri = [(0, 0), (2, 0), (0, 2)]
    assert in_sphere_flat(tri + [(1, 1)]) == -1
    assert in_sphere_flat(tri + [(2, 2)]) == 0
    assert in_sphere_flat(tri + [(5, 5)]) == 1


def test_in_sphere_inside_a_flat():
    # the same square corners embedded in the plane z = 7 of R^3
    tri = [(0, 0, 7), (2, 0, 7), (0, 2, 7)]
    assert in_sphere_flat(tri + [(1, 1, 7)]) == -1
    assert in_sphere_flat(tri + [(2, 2, 7)]) == 0


coord = st.integers(-50, 50)
point2 = st.tuples(coord, coord)


@given(st.lists(point2, min_size=4, max_size=4, unique=True), st.integers(1, 9))
@settings(max_examples=80, deadline=None)
def test_in_sphere_scale_and_translation_invariant(pts, k):
    if orientation(pts[:3]) == 0:
        return
    base = in_sphere_flat(pts)
    assert in_sphere_flat([(k * x + 3, k * y - 1) for x, y in pts]) == base


@given(st.lists(point2, min_size=3, max_size=3), st.integers(1, 9))
@settings(max_examples=80, deadline=None)
def test_orientation_homogeneous(pts, k):
    assert orientation([(k * x, k * y) for x, y in pts]) == orientation(pts)


def test_lift_one_color_is_identity():
    chi = ChromaticPointSet(((F(3),),), (0,), 1)
    L = lift(chi)
    assert L.lifted_points == ((F(3),),)
    assert L.ambient_dim == 1


def test_lift_two_colors():
    chi = ChromaticPointSet(((F(0),), (F(5),)), (0, 1), 2)
    L = lift(chi, 1)
    assert L.ambient_dim == 3
    assert L.lifted_points == ((0, 0, 0), (0, 1, 5))
    # both points satisfy the flat equation x_0 = 0
    for a, b in L.flat_equations():
        assert all(sum(x * y for x, y in zip(a, p)) == b for p in L.lifted_points)
    assert len(L.flat_coordinates()[0]) == 2


def test_lift_rejects_nonpositive_scale():
    chi = ChromaticPointSet(((F(0),), (F(5),)), (0, 1), 2)
    with pytest.raises(GeometryError):
        lift(chi, 0)


def test_point_set_validation():
    with pytest.raises(GeometryError):
        ChromaticPointSet(((0, 0), (0, 0)), (0, 1), 2)
    with pytest.raises(GeometryError):
        ChromaticPointSet(((0, 0), (1, 0)), (0, 2), 2)
    with pytest.raises(GeometryError):
        ChromaticPointSet(((0, 0), (1, 0)), (0, 0), 2)
    with pytest.raises(GeometryError):
        ChromaticPointSet(((0, 0), (1,)), (0, 0), 1)


def test_restricted_relabels():
    chi = ChromaticPointSet(((0,), (1,), (2,), (3,)), (0, 2, 1, 2), 3)
    sub, keep = chi.restricted({2})
    assert keep == [1, 3]
    assert sub.colors == (0, 0) and sub.sigma_size == 1


def test_jitter_is_deterministic_and_small():
    chi = ChromaticPointSet(((0, 0), (1, 0), (0, 1), (1, 1)), (0, 1, 1, 0), 2)
    a, b = chi.jittered(5), chi.jittered(5)
    assert a.points == b.points
    assert a.points != chi.points
    assert max(abs(x - y) for p, q in zip(a.points, chi.points) for x, y in zip(p, q)) <= F(1, 2**30)
