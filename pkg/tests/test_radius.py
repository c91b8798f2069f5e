from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.delaunay import build_mosaic
from chromatic_alpha.generators import integer_checkerboard
from chromatic_alpha.geometry import ChromaticPointSet, GeneralPositionError
from chromatic_alpha.radius import (Stack, alpha_complex, critical_agreement, grid_stack_oracle,
                                    is_empty_stack, mono_radius_function, radius_function,
                                    smallest_stack_through, verify_gdm)
from chromatic_alpha.validation import random_instance


@pytest.fixture
def square_cb():
    """Unit square corners, checkerboard colored."""
    return ChromaticPointSet(((0, 0), (1, 0), (0, 1), (1, 1)), (0, 1, 1, 0), 2, general_position=False)


def test_single_vertex_stack(square_cb):
    st_ = smallest_stack_through(square_cb, (2,))
    assert st_.center == (0, 1) and st_.stack_radius_sq == 0
    assert is_empty_stack(square_cb, st_)


def test_bichromatic_pair_stack():
    chi = ChromaticPointSet(((0, 0), (2, 0)), (0, 1), 2)
    st_ = smallest_stack_through(chi, (0, 1))
    assert st_.center == (1, 0)
    assert st_.radius_sq_per_color == {0: 1, 1: 1}
    assert grid_stack_oracle(chi, (0, 1)) == pytest.approx(1, abs=1e-6)


def test_three_square_corners(square_cb):
    st_ = smallest_stack_through(square_cb, (0, 1, 3))
    assert st_.center == (F(1, 2), F(1, 2))
    assert st_.stack_radius_sq == F(1, 2)
    # the fourth corner lies on, not inside, its sphere
    assert is_empty_stack(square_cb, st_)


def test_nonempty_stack():
    chi = ChromaticPointSet(((0, 0), (F(1, 2), 0), (5, 5)), (0, 0, 1), 2)
    assert not is_empty_stack(chi, Stack((F(0), F(0)), {0: F(1), 1: F(0)}))


def test_line_triangle_value(line_bichromatic):
    rf = radius_function(build_mosaic(line_bichromatic))
    assert all(rf[(v,)] == 0 for v in range(3))
    assert rf[(0, 1, 2)] == 1


def test_checkerboard_values(square_cb):
    rf = radius_function(build_mosaic(square_cb))
    assert rf[(0, 1)] == rf[(0, 2)] == rf[(1, 3)] == rf[(2, 3)] == F(1, 4)
    for t in build_mosaic(square_cb).simplices[2]:
        assert rf[t] == F(1, 2)


def test_mono_examples(equilateral):
    two = ChromaticPointSet(((0, 0), (2, 0)), (0, 0), 1)
    assert mono_radius_function(build_mosaic(two))[(0, 1)] == 1
    rf = mono_radius_function(build_mosaic(equilateral))
    assert float(rf[(0, 1, 2)]) == pytest.approx(4 / 3, abs=1e-11)
    obtuse = ChromaticPointSet(((0, 0), (4, 0), (1, 1)), (0, 0, 0), 1)
    rf = mono_radius_function(build_mosaic(obtuse))
    assert rf[(0, 1, 2)] == rf[(0, 1)] == 5
    assert grid_stack_oracle(obtuse, (0, 1)) == pytest.approx(5 ** 0.5, abs=1e-6)


def test_alpha_complex_examples():
    chi = integer_checkerboard(3)
    rf = radius_function(build_mosaic(chi))
    assert len(alpha_complex(rf, -1)) == 0
    assert set(alpha_complex(rf, rf.max_value)) == set(rf.mosaic)
    sub = alpha_complex(rf, F(1, 4))
    assert len(sub.simplices[0]) == 9
    assert len(sub.simplices) == 2
    # 12 unit edges, all bichromatic
    assert len(sub.simplices[1]) == 12
    assert all(len(sub.colors_of(e)) == 2 for e in sub.simplices[1])


def test_gdm_examples():
    one = ChromaticPointSet(((0, 0),), (0,), 1)
    part = verify_gdm(radius_function(build_mosaic(one)))
    assert len(part) == 1 and list(part.critical()) == [(0,)]
    two = ChromaticPointSet(((0, 0), (2, 0)), (0, 0), 1)
    part = verify_gdm(radius_function(build_mosaic(two)))
    assert part.critical() == {(0,): 0, (1,): 0, (0, 1): 1}


def test_gdm_thirty_points():
    chi = random_instance(11, (30, 30), dims=(2,), colors=(2,))
    rf = radius_function(build_mosaic(chi), chi)
    verify_gdm(rf)
    ok, _, _ = critical_agreement(chi, rf)
    assert ok


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_monotone_and_scale_free(seed):
    chi = random_instance(seed, (5, 14))
    try:
        base = radius_function(build_mosaic(chi), chi).value_sq
    except GeneralPositionError:
        return
    for s, v in base.items():
        for k in range(len(s)):
            face = s[:k] + s[k + 1:]
            if face:
                assert base[face] <= v
    assert radius_function(build_mosaic(chi, M=2), chi).value_sq == base
