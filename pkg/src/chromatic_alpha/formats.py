"""Text formats: point files, mosaics, radius functions, diagrams, configs, SVG.

Exact quantities are written as rational strings (``"p/q"`` or ``"p"``);
decimal companions are rounded to 12 digits and are for display only.  All
writers emit a fixed field order, so equal inputs give byte-identical files.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Mapping

from . import __version__
from .delaunay import ChromaticDelaunayMosaic, SizeStats
from .geometry import ChromaticPointSet, GeometryError, as_fraction
from .persistence import DiagramPoint, PersistenceDiagram
from .radius import RadiusFunction
from .sixpack import LABELS, SixPack

DECIMALS = 12


class FormatError(ValueError):
    """Malformed input file."""


def q(x) -> str:
    """Canonical rational string."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dec(x: float) -> float:
    return round(float(x), DECIMALS)


def _encode(obj, depth: int) -> str:
    """JSON with one line per record: lists of scalars and flat dicts stay inline."""
    pad = " " * (depth + 1)
    if isinstance(obj, dict):
        if all(not isinstance(v, (dict, list)) for v in obj.values()):
            return json.dumps(obj, ensure_ascii=True)
        items = [f"{pad}{json.dumps(k)}: {_encode(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * depth + "}"
    if isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            return json.dumps(obj, ensure_ascii=True)
        if all(isinstance(v, list) and all(not isinstance(u, (dict, list)) for u in v) for v in obj) \
                and sum(len(v) for v in obj) <= 64:
            return json.dumps(obj, ensure_ascii=True)
        items = [pad + _encode(v, depth + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + " " * depth + "]"
    return json.dumps(obj, ensure_ascii=True)


def _dump(obj) -> str:
    return _encode(obj, 0) + "\n"


# ---------------------------------------------------------------------------
# point files


def parse_points(text: str, general_position: bool = False) -> ChromaticPointSet:
    """Parse ``d=<dim> s=<colors-1>`` followed by one ``x1 .. xd color`` line per point.

    Blank lines and ``#`` comments are ignored; coordinates may be integers,
    decimals or ``p/q`` rationals and are read exactly.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty point file")
    header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    try:
        d, s = int(header["d"]), int(header["s"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header {lines[0]!r}, expected 'd=<dim> s=<colors-1>'") from exc
    if d < 1 or s < 0:
        raise FormatError("d must be positive and s non-negative")
    pts, cols = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = ln.split()
        if len(toks) != d + 1:
            raise FormatError(f"record {lineno}: expected {d} coordinates and a color")
        try:
            pts.append(tuple(as_fraction(t) for t in toks[:d]))
            cols.append(int(toks[d]))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"record {lineno}: {exc}") from exc
    try:
        return ChromaticPointSet(tuple(pts), tuple(cols), s + 1, general_position=general_position,
                                 allow_empty_colors=True)
    except GeometryError as exc:
        raise FormatError(str(exc)) from exc


def format_points(chi: ChromaticPointSet) -> str:
    out = [f"d={chi.dim_d} s={chi.s}"]
    for p, c in zip(chi.points, chi.colors):
        out.append(" ".join(q(x) for x in p) + f" {c}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# mosaics and radius functions


def mosaic_to_json(mosaic: ChromaticDelaunayMosaic, stats: SizeStats | None = None,
                   meta: Mapping[str, object] | None = None) -> str:
    chi = mosaic.point_set
    obj = {
        "format": "chromatic-mosaic",
        "tool_version": __version__,
        "d": chi.dim_d,
        "s": chi.s,
        "points": [[q(x) for x in p] for p in chi.points],
        "colors": list(chi.colors),
        "degenerate": mosaic.degenerate,
        "simplices": [[list(s) for s in layer] for layer in mosaic.simplices],
    }
    if stats is not None:
        obj["stats"] = {"counts": list(stats.counts), "total": stats.total, "n": stats.n,
                        "spread": dec(stats.spread)}
    if meta:
        obj["metadata"] = dict(meta)
    return _dump(obj)


def mosaic_from_json(text: str) -> ChromaticDelaunayMosaic:
    obj = _load(text, "chromatic-mosaic")
    chi = ChromaticPointSet(tuple(tuple(Fraction(x) for x in p) for p in obj["points"]),
                            tuple(obj["colors"]), obj["s"] + 1, general_position=False,
                            allow_empty_colors=True)
    layers = tuple(tuple(tuple(s) for s in layer) for layer in obj["simplices"])
    return ChromaticDelaunayMosaic(chi, layers, obj["degenerate"])


def radius_to_json(rf: RadiusFunction, meta: Mapping[str, object] | None = None) -> str:
    from .persistence import filtration_order

    order = filtration_order(rf)
    obj = {
        "format": "chromatic-radius",
        "tool_version": __version__,
        "simplices": [{"simplex": list(s), "value_sq": q(v), "value": dec(math.sqrt(v))}
                      for s, v in zip(order.simplices, order.values)],
    }
    if meta:
        obj["metadata"] = dict(meta)
    return _dump(obj)


def radius_from_json(text: str) -> dict[tuple[int, ...], Fraction]:
    obj = _load(text, "chromatic-radius")
    return {tuple(e["simplex"]): Fraction(e["value_sq"]) for e in obj["simplices"]}


def _load(text: str, fmt: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from exc
    if obj.get("format") != fmt:
        raise FormatError(f"expected format {fmt!r}, got {obj.get('format')!r}")
    return obj


# ---------------------------------------------------------------------------
# diagrams


def _point_record(x: DiagramPoint, C_sq: Fraction) -> dict:
    return {
        "p": x.p,
        "birth_sq": q(x.birth_sq),
        "death_sq": "essential" if x.essential else q(x.death_sq),
        "birth": dec(x.birth),
        "death": dec(math.sqrt(C_sq) if x.essential else x.death),
        "collapsible": x.collapsible,
    }


def _point_from_record(r: dict, C_sq: Fraction) -> DiagramPoint:
    ess = r["death_sq"] == "essential"
    return DiagramPoint(int(r["p"]), Fraction(r["birth_sq"]), C_sq if ess else Fraction(r["death_sq"]), ess)


def diagram_to_json(dgm: PersistenceDiagram, meta: Mapping[str, object] | None = None) -> str:
    obj = {"format": "chromatic-diagram", "tool_version": __version__, "C_sq": q(dgm.C_sq),
           "metadata": dict(meta or {}), "points": [_point_record(x, dgm.C_sq) for x in dgm]}
    return _dump(obj)


def diagram_from_json(text: str) -> PersistenceDiagram:
    obj = _load(text, "chromatic-diagram")
    C_sq = Fraction(obj["C_sq"])
    return PersistenceDiagram(tuple(_point_from_record(r, C_sq) for r in obj["points"]), C_sq)


def sixpack_to_json(pack: SixPack, meta: Mapping[str, object] | None = None) -> str:
    obj = {
        "format": "chromatic-sixpack",
        "tool_version": __version__,
        "C_sq": q(pack.C_sq),
        "metadata": {"inclusion": pack.inclusion, **dict(meta or {})},
        "diagrams": {label: [_point_record(x, pack.C_sq) for x in pack[label]] for label in LABELS},
    }
    return _dump(obj)


def sixpack_from_json(text: str) -> SixPack:
    obj = _load(text, "chromatic-sixpack")
    C_sq = Fraction(obj["C_sq"])
    dgms = [PersistenceDiagram(tuple(_point_from_record(r, C_sq) for r in obj["diagrams"][label]), C_sq)
            for label in LABELS]
    return SixPack(*dgms, C_sq, obj["metadata"].get("inclusion", ""))


# ---------------------------------------------------------------------------
# flat key=value configs


def parse_config(text: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise FormatError(f"config line {lineno}: expected key=value")
        k, v = ln.split("=", 1)
        cfg[k.strip()] = v.strip()
    return cfg


def format_config(cfg: Mapping[str, object]) -> str:
    return "".join(f"{k}={cfg[k]}\n" for k in sorted(cfg))


# ---------------------------------------------------------------------------
# SVG


def _svg_panel(dgm: PersistenceDiagram, label: str, x0: float, y0: float, size: float,
               top: float, show_collapsible: bool) -> list[str]:
    pad = 28.0
    w = size - 2 * pad

    def sx(v):
        return x0 + pad + w * v / top

    def sy(v):
        return y0 + pad + w * (1 - v / top)

    out = [f'<rect x="{x0 + pad:.2f}" y="{y0 + pad:.2f}" width="{w:.2f}" height="{w:.2f}" '
           'fill="none" stroke="#888"/>',
           f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(top):.2f}" y2="{sy(top):.2f}" stroke="#bbb"/>',
           f'<text x="{x0 + pad:.2f}" y="{y0 + pad - 8:.2f}" font-size="13">{label}</text>']
    colors = {0: "#1f77b4", 1: "#d62728", 2: "#2ca02c"}
    for x in dgm:
        if x.collapsible and not show_collapsible:
            continue
        b, d = x.birth, x.death
        r = 2.0 + 6.0 * min(1.0, (d - b) / top)
        fill = colors.get(x.p, "#555")
        out.append(f'<circle cx="{sx(b):.2f}" cy="{sy(d):.2f}" r="{r:.2f}" fill="{fill}" '
                   f'fill-opacity="0.6"><title>p={x.p} ({q(x.birth_sq)}, '
                   f'{"essential" if x.essential else q(x.death_sq)})</title></circle>')
    return out


def _svg_bars(dgm: PersistenceDiagram, label: str, x0: float, y0: float, size: float,
              top: float, show_collapsible: bool) -> list[str]:
    pad = 28.0
    w = size - 2 * pad
    bars = sorted((x for x in dgm if show_collapsible or not x.collapsible),
                  key=lambda x: (x.p, x.birth_sq, x.death_sq))
    step = w / max(len(bars), 1)
    out = [f'<rect x="{x0 + pad:.2f}" y="{y0 + pad:.2f}" width="{w:.2f}" height="{w:.2f}" '
           'fill="none" stroke="#888"/>',
           f'<text x="{x0 + pad:.2f}" y="{y0 + pad - 8:.2f}" font-size="13">{label}</text>']
    colors = {0: "#1f77b4", 1: "#d62728", 2: "#2ca02c"}
    for k, x in enumerate(bars):
        y = y0 + pad + step * (k + 0.5)
        out.append(f'<line x1="{x0 + pad + w * x.birth / top:.2f}" y1="{y:.2f}" '
                   f'x2="{x0 + pad + w * x.death / top:.2f}" y2="{y:.2f}" '
                   f'stroke="{colors.get(x.p, "#555")}" stroke-width="{min(3.0, 0.8 * step):.2f}"/>')
    return out


def sixpack_svg(pack: SixPack, show_collapsible: bool = False, size: float = 260.0,
                barcode: bool = False) -> str:
    """2x3 grid: kernel, relative, cokernel over domain, image, codomain.

    Axes are radii; essential points sit at ``sqrt(C_sq)``; marker size grows
    with persistence.  Zero-persistence points are hidden unless requested.
    With ``barcode`` every panel shows intervals instead of points.
    """
    panel = _svg_bars if barcode else _svg_panel
    top = math.sqrt(pack.C_sq) or 1.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{3 * size:.0f}" height="{2 * size:.0f}" '
           f'viewBox="0 0 {3 * size:.0f} {2 * size:.0f}">',
           '<rect width="100%" height="100%" fill="white"/>']
    for k, label in enumerate(LABELS):
        row, col = divmod(k, 3)
        out += panel(pack[label], label, col * size, row * size, size, top, show_collapsible)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def mingling_csv(report, extra: Mapping[str, object] | None = None) -> str:
    cols = ["mst_ratio", "image_share", "kernel_share", "union_length"]
    fields = [dec(getattr(report, c)) for c in cols]
    per = [dec(x) for x in report.per_color_length]
    head = cols + [f"length_color_{j}" for j in range(len(per))]
    vals = fields + per
    if extra:
        head += list(extra)
        vals += list(extra.values())
    return ",".join(head) + "\n" + ",".join(str(v) for v in vals) + "\n"
