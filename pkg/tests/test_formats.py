from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_alpha.delaunay import build_mosaic, size_stats
from chromatic_alpha.formats import (FormatError, diagram_from_json, diagram_to_json, format_config,
                                     format_points, mingling_csv, mosaic_from_json, mosaic_to_json,
                                     parse_config, parse_points, q, radius_from_json, radius_to_json,
                                     sixpack_from_json, sixpack_svg, sixpack_to_json)
from chromatic_alpha.geometry import ChromaticPointSet
from chromatic_alpha.mst import mst_ratio
from chromatic_alpha.persistence import persistence_diagram
from chromatic_alpha.radius import radius_function
from chromatic_alpha.sixpack import LABELS, InclusionSpec, sixpack_of
from chromatic_alpha.validation import random_instance

GOLDEN = Path(__file__).parent / "golden"


def test_q_is_canonical():
    assert q(F(2, 4)) == "1/2"
    assert q(F(3)) == "3"
    assert q(F(-1, 3)) == "-1/3"


def test_parse_points_exact():
    chi = parse_points("# c\nd=2 s=1\n0.1 1/3 0  # tail\n\n2 -4 1\n")
    assert chi.points == ((F(1, 10), F(1, 3)), (F(2), F(-4)))
    assert chi.colors == (0, 1)
    assert parse_points(format_points(chi)) == chi


@pytest.mark.parametrize("text", [
    "", "d=2\n0 0 0\n", "d=2 s=0\n0 0\n", "d=1 s=0\n0 3\n", "d=1 s=0\nx 0\n", "d=1 s=0\n1 0\n1 0\n",
    "d=1 s=0\n1/0 0\n",
])
def test_parse_points_errors(text):
    with pytest.raises(FormatError):
        parse_points(text)


coords = st.fractions(min_value=-10, max_value=10, max_denominator=50)


@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=12, unique=True),
       st.integers(1, 3), st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_point_round_trip(pts, k, rnd):
    cols = [rnd.randrange(k) for _ in pts]
    chi = ChromaticPointSet(tuple(pts), tuple(cols), k, general_position=False, allow_empty_colors=True)
    text = format_points(chi)
    assert format_points(parse_points(text)) == text
    assert parse_points(text).points == chi.points


def _packed(seed):
    chi = random_instance(seed, (10, 14), dims=(2,), colors=(2,))
    m = build_mosaic(chi)
    rf = radius_function(m, chi)
    return chi, m, rf, sixpack_of(m, rf, InclusionSpec("color", color=0))


def test_mosaic_and_radius_round_trip():
    chi, m, rf, _ = _packed(1)
    back = mosaic_from_json(mosaic_to_json(m, size_stats(m)))
    assert back.simplices == m.simplices and back.point_set.points == chi.points
    assert radius_from_json(radius_to_json(rf)) == rf.value_sq


def test_diagram_round_trip():
    chi, m, rf, pack = _packed(2)
    dgm = persistence_diagram(rf.value_sq)
    assert diagram_from_json(diagram_to_json(dgm)) == dgm
    back = sixpack_from_json(sixpack_to_json(pack, {"mode": "color:0"}))
    assert all(back[l] == pack[l] for l in LABELS) and back.C_sq == pack.C_sq


def test_wrong_format_tag():
    with pytest.raises(FormatError):
        mosaic_from_json('{"format": "chromatic-radius"}')
    with pytest.raises(FormatError):
        diagram_from_json("not json")


def test_config_round_trip():
    cfg = parse_config("b = 2\n# x\na=1  # one\n")
    assert cfg == {"a": "1", "b": "2"}
    assert format_config(cfg) == "a=1\nb=2\n"
    with pytest.raises(FormatError):
        parse_config("novalue\n")


def test_svg_and_csv():
    chi, m, rf, pack = _packed(3)
    svg = sixpack_svg(pack)
    assert svg.startswith("<svg") and all(l in svg for l in LABELS)
    assert svg.count("<circle") == sum(len(pack[l].nonzero()) for l in LABELS)
    bars = sixpack_svg(pack, barcode=True, show_collapsible=True)
    assert bars.count('stroke-width') == sum(len(pack[l]) for l in LABELS)
    csv = mingling_csv(mst_ratio(chi), {"n": len(chi)})
    head, row = csv.splitlines()
    assert head.split(",")[0] == "mst_ratio" and len(head.split(",")) == len(row.split(","))


def test_golden_files_parse():
    chi = parse_points((GOLDEN / "line.txt").read_text())
    m = mosaic_from_json((GOLDEN / "line.mosaic.json").read_text())
    assert m.simplices == build_mosaic(chi).simplices
    vals = radius_from_json((GOLDEN / "line.radius.json").read_text())
    assert vals == radius_function(build_mosaic(chi), chi).value_sq
    pack = sixpack_from_json((GOLDEN / "line.sixpack.json").read_text())
    # the two color-0 points join in K at 1/4 but in L only at 1
    assert [(x.p, x.birth_sq, x.death_sq) for x in pack.kernel] == [(0, F(1, 4), 1)]
