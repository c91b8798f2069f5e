from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.delaunay import build_mosaic
from chromatic_alpha.geometry import GeneralPositionError
from chromatic_alpha.persistence import (DiagramPoint, FiltrationError, PersistenceDiagram, betti_curve,
                                         bottleneck, diagram, filtration_order, homology_oracle,
                                         persistence_diagram, reduce_boundary)
from chromatic_alpha.radius import radius_function
from chromatic_alpha.validation import random_instance

EQUI = {(0,): F(0), (1,): F(0), (2,): F(0), (0, 1): F(1), (0, 2): F(1), (1, 2): F(1), (0, 1, 2): F(4, 3)}
EDGE = {(0,): F(0), (1,): F(0), (0, 1): F(1)}


def test_order_examples():
    assert filtration_order({(0,): F(0)}).simplices == ((0,),)
    assert filtration_order(EDGE).simplices == ((0,), (1,), (0, 1))
    square = {(0,): 0, (1,): 0, (2,): 0, (3,): 0, (0, 1): F(1, 4), (0, 2): F(1, 4), (1, 3): F(1, 4),
              (2, 3): F(1, 4), (0, 3): F(1, 2), (0, 1, 3): F(1, 2), (0, 2, 3): F(1, 2)}
    order = filtration_order(square).simplices
    assert order[4:8] == ((0, 1), (0, 2), (1, 3), (2, 3))
    assert order[8:] == ((0, 3), (0, 1, 3), (0, 2, 3))


def test_order_rejects_bad_input():
    with pytest.raises(FiltrationError):
        filtration_order({(0,): F(1), (1,): F(0), (0, 1): F(0)})
    with pytest.raises(FiltrationError):
        filtration_order({(0,): F(0), (0, 1): F(1)})


def test_reduce_edge():
    red = reduce_boundary(filtration_order(EDGE))
    assert red.pairs == ((1, 2),)
    assert red.essential == (0,)


def test_reduce_triangle():
    red = reduce_boundary(filtration_order(EQUI))
    # edges (0,1),(0,2) kill vertices, (1,2) opens a cycle the triangle closes
    assert red.pairs == ((1, 3), (2, 4), (5, 6))
    assert red.essential == (0,)


def test_tie_break_irrelevant_for_distinct_values():
    vals = {(0,): F(0), (1,): F(1), (2,): F(2), (0, 1): F(3), (1, 2): F(4)}
    a = persistence_diagram(vals)
    relabel = {0: 2, 1: 1, 2: 0}
    b = persistence_diagram({tuple(sorted(relabel[v] for v in s)): x for s, x in vals.items()})
    assert a.multiset() == b.multiset()


def test_diagram_examples():
    one = diagram(reduce_boundary(filtration_order({(0,): F(0)})), C_sq=1)
    assert one.points == (DiagramPoint(0, F(0), F(1), True),)
    two = persistence_diagram({(0,): F(0), (1,): F(0), (0, 1): F(1)}, C_sq=9)
    assert two.multiset() == Counter({(0, 0, 9, True): 1, (0, 0, 1, False): 1})
    tri = persistence_diagram(EQUI).in_dim(1)
    assert tri.points == (DiagramPoint(1, F(1), F(4, 3)),)
    with pytest.raises(FiltrationError):
        persistence_diagram(EDGE, C_sq=0)


def test_default_closing_value():
    assert persistence_diagram(EQUI).C_sq == 2
    assert persistence_diagram(EDGE).C_sq == 2


def test_betti_curve():
    tri = persistence_diagram(EQUI)
    assert betti_curve(PersistenceDiagram((), F(1)), 0) == 0
    assert betti_curve(tri, F(11, 10), 1) == 1
    assert betti_curve(tri, F(4, 3), 1) == 0


def test_bottleneck_examples():
    D = persistence_diagram(EQUI)
    assert bottleneck(D, D) == 0
    one = PersistenceDiagram((DiagramPoint(0, F(0), F(4)),), F(9))
    assert bottleneck(one, PersistenceDiagram((), F(9))) == pytest.approx(1.0)


def test_bottleneck_under_perturbation():
    from chromatic_alpha.validation import perturb

    chi = random_instance(5, (30, 30), dims=(2,), colors=(2,))
    chi2 = perturb(chi, F(1, 100), 6)
    d1 = persistence_diagram(radius_function(build_mosaic(chi), chi).value_sq)
    d2 = persistence_diagram(radius_function(build_mosaic(chi2), chi2).value_sq)
    for p in (0, 1):
        assert bottleneck(d1, d2, p) <= 0.01 + 1e-9


def test_oracle_examples():
    assert homology_oracle(EDGE).diagram().multiset() == persistence_diagram(EDGE).multiset()
    assert homology_oracle(EQUI).diagram().in_dim(1).multiset() == Counter({(1, 1, F(4, 3), False): 1})


def test_oracle_on_25_points():
    chi = random_instance(8, (25, 25), dims=(2,), colors=(2,))
    rf = radius_function(build_mosaic(chi), chi)
    dgm = persistence_diagram(rf.value_sq)
    assert homology_oracle(rf, cap=10**4).diagram(dgm.C_sq).multiset() == dgm.nonzero().multiset()


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_reduction_matches_oracle(seed):
    chi = random_instance(seed, (4, 12))
    try:
        rf = radius_function(build_mosaic(chi), chi)
    except GeneralPositionError:
        return
    dgm = persistence_diagram(rf.value_sq)
    assert homology_oracle(rf).diagram(dgm.C_sq).multiset() == dgm.nonzero().multiset()
