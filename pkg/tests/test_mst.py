import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.delaunay import build_mosaic
from chromatic_alpha.geometry import ChromaticPointSet, GeometryError
from chromatic_alpha.mst import (_complete_mst, brute_force_mst_length_sq, deaths_equal_half_mst,
                                 expected_ratio_montecarlo, kruskal, max_ratio_bruteforce, mst, mst_ratio)
from chromatic_alpha.persistence import persistence_diagram
from chromatic_alpha.radius import radius_function
from chromatic_alpha.validation import random_instance

LINE = [(F(0),), (F(1),), (F(3),)]


def test_collinear_mst():
    t = mst(LINE)
    assert t.edges == ((0, 1), (1, 2))
    assert t.length_sq_terms == (1, 4)
    assert t.total_length == 3


def test_square_tie_break():
    t = mst([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert t.edges == ((0, 1), (0, 2), (1, 3))
    assert t.total_length == 3


def test_kruskal_disconnected():
    with pytest.raises(GeometryError):
        kruskal(3, [(1, 0, 1)])


def test_delaunay_mst_equals_complete_mst():
    chi = random_instance(12, (200, 200), dims=(2,), colors=(2,))
    a = mst(chi.points)
    b = _complete_mst([tuple(p) for p in chi.points])
    assert sorted(a.length_sq_terms) == sorted(b.length_sq_terms)
    assert set(a.edges) == set(b.edges)


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=2, max_size=6, unique=True))
@settings(max_examples=40, deadline=None)
def test_mst_is_minimal(pts):
    assert mst(pts).total_length == pytest.approx(brute_force_mst_length_sq(pts), rel=1e-12)


def test_ratio_on_a_line():
    chi = ChromaticPointSet(LINE, (0, 1, 0), 2)
    rep = mst_ratio(chi)
    assert rep.mst_ratio == 1.0
    assert rep.per_color_length == (3.0, 0.0)
    assert rep.image_share == 1.0 and rep.kernel_share == 0.0


def test_ratio_rejects_empty_class():
    chi = ChromaticPointSet(LINE, (0, 0, 0), 2, allow_empty_colors=True)
    with pytest.raises(GeometryError):
        mst_ratio(chi)


@given(st.integers(0, 10**6), st.sampled_from([(0, 1), (-1, 0), (0, -1)]), st.integers(1, 5))
@settings(max_examples=20, deadline=None)
def test_ratio_invariant_under_similarity(seed, rot, k):
    chi = random_instance(seed, (6, 30), dims=(2,), colors=(2, 3))
    c, s = rot
    moved = tuple((k * (c * x - s * y) + 7, k * (s * x + c * y) - 3) for x, y in chi.points)
    chi2 = ChromaticPointSet(moved, chi.colors, chi.sigma_size)
    assert mst_ratio(chi2).mst_ratio == pytest.approx(mst_ratio(chi).mst_ratio, rel=1e-12)


def test_mst_link_examples():
    two = ChromaticPointSet(((0, 0), (2, 0)), (0, 0), 1)
    dgm = persistence_diagram(radius_function(build_mosaic(two)).value_sq).in_dim(0)
    assert deaths_equal_half_mst(dgm, mst(two.points))
    line = ChromaticPointSet(LINE, (0, 0, 0), 1)
    dgm = persistence_diagram(radius_function(build_mosaic(line)).value_sq).in_dim(0)
    assert sorted(x.death_sq for x in dgm.finite()) == [F(1, 4), 1]
    assert deaths_equal_half_mst(dgm, mst(LINE))


def test_mst_link_chromatic_sample():
    chi = random_instance(77, (100, 100), dims=(2,), colors=(2,))
    rf = radius_function(build_mosaic(chi), chi)
    assert deaths_equal_half_mst(persistence_diagram(rf.value_sq).in_dim(0), mst(chi.points))


def test_max_ratio_examples():
    coloring, mu = max_ratio_bruteforce([(0, 0), (1, 0)])
    assert mu == 0.0 and sorted(coloring) == [0, 1]
    coloring, mu = max_ratio_bruteforce(LINE)
    assert mu == 1.0
    assert coloring[0] == coloring[2] != coloring[1]


def test_max_ratio_three_colors_and_caps():
    pts = random_instance(1, (7, 7), dims=(2,), colors=(2,)).points
    coloring, mu = max_ratio_bruteforce(pts, 3)
    chi = ChromaticPointSet(pts, coloring, 3)
    assert mst_ratio(chi).mst_ratio == pytest.approx(mu, rel=1e-12)
    with pytest.raises(GeometryError):
        max_ratio_bruteforce([(i, 0) for i in range(17)], 2)
    with pytest.raises(GeometryError):
        max_ratio_bruteforce([(i, 0) for i in range(11)], 3)


def test_montecarlo_deterministic():
    a = expected_ratio_montecarlo(100, 3, seed=4)
    b = expected_ratio_montecarlo(100, 3, seed=4)
    assert a == b


def test_montecarlo_trend_toward_sqrt2():
    small = expected_ratio_montecarlo(100, 40, seed=0)
    large = expected_ratio_montecarlo(2000, 5, seed=0)
    assert abs(large.mean - math.sqrt(2)) < abs(small.mean - math.sqrt(2))
