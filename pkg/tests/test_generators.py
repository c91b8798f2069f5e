import math
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from chromatic_alpha.generators import (AnnuliConfig, GeneratorSpec, annuli_sample, fcc, hexagonal,
                                        iid_coloring, integer_checkerboard, sublattice_3coloring,
                                        uniform_square)
from chromatic_alpha.geometry import GeometryError


def test_hexagonal_small_disk():
    chi = sublattice_3coloring(F(11, 10))
    assert len(chi) == 7
    # origin alone in its class, its six neighbors alternate between the other two
    assert sorted(Counter(chi.colors).values()) == [1, 3, 3]
    assert chi.colors[chi.points.index((0, 0))] == 0


def test_color_classes_are_scaled_hexagonal_lattices():
    chi = sublattice_3coloring(6)
    pts = np.array([[float(x) for x in p] for p in chi.points])
    for j in range(3):
        cls = pts[np.array(chi.color_class(j))]
        d = np.sqrt(((cls[:, None] - cls[None]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        assert np.abs(d.min(axis=1) - math.sqrt(3)).max() < 1e-9


def test_hexagonal_density():
    n = len(hexagonal(30))
    assert abs(n - math.pi * 900 / (math.sqrt(3) / 2)) < 0.01 * n


def test_checkerboard():
    chi = integer_checkerboard(3)
    col = dict(zip(chi.points, chi.colors))
    assert col[(0, 0)] == 0 and col[(1, 0)] == 1
    assert sorted(Counter(chi.colors).values()) == [4, 5]
    for k in (4, 5, 6):
        c = Counter(integer_checkerboard(k).colors)
        assert abs(c[0] - c[1]) <= 1
    with pytest.raises(GeometryError):
        integer_checkerboard(0)


def test_fcc():
    chi = fcc(F(3))
    col = dict(zip(chi.points, chi.colors))
    assert col[(0, 0, 0)] == 0
    assert col[(1, 1, 0)] == 1
    assert all(sum(p) % 2 == 0 for p in chi.points)
    big = fcc(F(12))
    assert abs(Counter(big.colors)[0] / len(big) - 1 / 8) < 0.01


def test_uniform_square():
    a = uniform_square(500, 3)
    assert a == uniform_square(500, 3)
    assert len(set(a)) == 500
    assert all(0 <= x < 1 and 0 <= y < 1 for x, y in a)


def test_iid_coloring_frequencies():
    n, s = 3000, 2
    cols = iid_coloring(n, s, 8)
    assert cols == iid_coloring(n, s, 8)
    p = 1 / (s + 1)
    sigma = math.sqrt(n * p * (1 - p))
    for j, c in Counter(cols).items():
        assert abs(c - n * p) <= 3 * sigma
    assert set(iid_coloring(3, 2, 0, ensure_all=True)) == {0, 1, 2}
    with pytest.raises(GeometryError):
        iid_coloring(2, 2, 0, ensure_all=True)


def test_annuli_reproducible_and_placed():
    a, b = annuli_sample(5), annuli_sample(5)
    assert a == b
    cfg = AnnuliConfig()
    centers = cfg.centers()
    blue = Counter()
    orange = Counter()
    for p, c in zip(a.points, a.colors):
        x, y = float(p[0]), float(p[1])
        k, dist = min(((k, math.hypot(x - cx, y - cy)) for k, (cx, cy) in enumerate(centers)),
                      key=lambda t: t[1])
        if c == 0:
            assert cfg.inner - 1e-5 <= dist <= cfg.outer + 1e-5
            blue[k] += 1
        else:
            assert dist <= cfg.fill_radius + 1e-5
            orange[k] += 1
    assert blue == {0: 75, 1: 75, 2: 75}
    assert orange == {0: 80, 1: 40}
    assert cfg.threshold == 0.5


def test_generator_spec_round_trip():
    spec = GeneratorSpec("annuli", seed=3, extra={"n_in": 30, "n_out": 20})
    back = GeneratorSpec.from_config(spec.to_config())
    assert back == spec
    assert back.build() == spec.build()
    assert len(GeneratorSpec("uniform_square", portion=50, colors=3, seed=1).build()) == 50
    with pytest.raises(GeometryError):
        GeneratorSpec("nope")
