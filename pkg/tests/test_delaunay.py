from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.delaunay import (build_mosaic, is_delaunay_oracle, oracle_complex, restrict,
                                      size_stats)
from chromatic_alpha.geometry import ChromaticPointSet, GeneralPositionError
from chromatic_alpha.validation import random_instance


def test_one_color_line_is_the_sorted_path():
    chi = ChromaticPointSet(((F(0),), (F(1),), (F(2),)), (0, 0, 0), 1)
    m = build_mosaic(chi)
    assert m.simplices == (((0,), (1,), (2,)), ((0, 1), (1, 2)))


def test_bichromatic_line(line_bichromatic):
    m = build_mosaic(line_bichromatic)
    assert (0, 2) in m and (0, 1, 2) in m
    assert size_stats(m).counts == (3, 3, 1)
    assert set(m) == oracle_complex(line_bichromatic)


def test_restrict_examples(line_bichromatic):
    m = build_mosaic(line_bichromatic)
    assert restrict(m, {0, 1}).simplices == m.simplices
    r = restrict(m, {0})
    assert r.simplices == (((0,), (1,)), ((0, 1),))
    assert r.origin == (0, 2)


def test_oracle_examples(line_bichromatic):
    mono = ChromaticPointSet(((F(0),), (F(1),), (F(2),)), (0, 0, 0), 1)
    assert is_delaunay_oracle(mono, (1,))
    assert not is_delaunay_oracle(mono, (0, 2))
    assert is_delaunay_oracle(line_bichromatic, (0, 2))


def test_forty_random_points_match_oracle():
    chi = random_instance(7, (40, 40), dims=(2,), colors=(2,))
    assert set(build_mosaic(chi)) == oracle_complex(chi)


def test_degenerate_input_names_the_subset():
    square = ChromaticPointSet(((0, 0), (1, 0), (0, 1), (1, 1)), (0, 0, 0, 0), 1)
    with pytest.raises(GeneralPositionError) as exc:
        build_mosaic(square)
    assert sorted(exc.value.subset) == [0, 1, 2, 3]
    loose = ChromaticPointSet(square.points, square.colors, 1, general_position=False)
    m = build_mosaic(loose)
    assert m.degenerate and len(m.simplices[2]) == 2
    assert not build_mosaic(square.jittered(1)).degenerate


@pytest.mark.parametrize("seed", range(3))
def test_scale_independence(seed):
    chi = random_instance(100 + seed, (20, 20), dims=(2,), colors=(2,))
    base = build_mosaic(chi, M=1).simplices
    for M in (F(1, 2), 2):
        assert build_mosaic(chi, M=M).simplices == base


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_restriction_commutes_with_construction(seed):
    chi = random_instance(seed, (6, 18))
    try:
        m = build_mosaic(chi)
    except GeneralPositionError:
        return
    for tau in ({0}, {0, 1}, set(range(chi.sigma_size))):
        sub, _ = chi.restricted(tau)
        direct = build_mosaic(sub) if len(sub) else None
        assert restrict(m, tau).simplices == direct.simplices


def test_single_color_size_bound():
    chi = random_instance(3, (200, 200), dims=(2,), colors=(2,))
    one = chi.uncolored()
    assert size_stats(build_mosaic(one)).total <= 6 * len(one)


def test_random_two_color_size_is_linear():
    import math

    from chromatic_alpha.generators import iid_coloring, uniform_square

    xs, ys = [], []
    for n in (100, 400, 1600):
        for t in range(2):
            chi = ChromaticPointSet(uniform_square(n, 10 * n + t), iid_coloring(n, 1, t, True), 2)
            st_ = size_stats(build_mosaic(chi))
            xs.append(math.log(n))
            ys.append(math.log(st_.total))
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    assert slope <= 1.15


def test_spread():
    chi = ChromaticPointSet(((F(0),), (F(1),), (F(3),)), (0, 0, 0), 1)
    assert size_stats(build_mosaic(chi)).spread == pytest.approx(3.0)
