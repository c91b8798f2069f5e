"""Seeded point generators: lattices, random windows and the annuli set.

All coordinates are rational so the exact predicates apply unchanged.
Random coordinates are dyadic (multiples of ``2**-GRID_BITS``).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import ChromaticPointSet, GeometryError

GRID_BITS = 32

# rational stand-in for sqrt(3)/2, |error| < 1e-12
HEX_Q = Fraction(math.sqrt(3) / 2).limit_denominator(10**7)
assert abs(float(HEX_Q) - math.sqrt(3) / 2) < 1e-12


def _dyadic(x: float, bits: int = GRID_BITS) -> Fraction:
    return Fraction(round(x * (1 << bits)), 1 << bits)


# ---------------------------------------------------------------------------
# lattices


def hexagonal(R) -> list[tuple[Fraction, Fraction]]:
    """Hexagonal lattice points ``a(1,0) + b(1/2,q)`` in the closed disk of radius ``R``."""
    return [p for p, _ in _hexagonal_indexed(R)]


def _hexagonal_indexed(R):
    R = Fraction(R)
    if R <= 0:
        raise GeometryError("radius must be positive")
    R2 = R * R
    bmax = int(R / HEX_Q) + 1
    out = []
    for b in range(-bmax, bmax + 1):
        y = b * HEX_Q
        if y * y > R2:
            continue
        amax = int(R) + abs(b) + 1
        for a in range(-amax, amax + 1):
            x = a + Fraction(b, 2)
            if x * x + y * y <= R2:
                out.append(((x, y), (a, b)))
    out.sort(key=lambda t: (t[0][1], t[0][0]))
    return out


def sublattice_3coloring(R) -> ChromaticPointSet:
    """Hexagonal disk colored by the three cosets of the index-3 sublattice.

    The class of ``a(1,0) + b(1/2,q)`` is ``(a - b) mod 3``.  Each class is a
    hexagonal lattice scaled by sqrt(3) and rotated by 30 degrees.
    """
    pts = _hexagonal_indexed(R)
    return ChromaticPointSet(tuple(p for p, _ in pts), tuple((a - b) % 3 for _, (a, b) in pts), 3,
                             general_position=False, allow_empty_colors=True)


def integer_checkerboard(k: int) -> ChromaticPointSet:
    """The grid ``{0..k-1}^2`` colored by coordinate-sum parity."""
    if k < 1:
        raise GeometryError("k must be positive")
    pts = tuple((Fraction(x), Fraction(y)) for x in range(k) for y in range(k))
    cols = tuple(int(x + y) % 2 for x, y in pts)
    return ChromaticPointSet(pts, cols, 2, general_position=False, allow_empty_colors=True)


def fcc(R) -> ChromaticPointSet:
    """FCC points (even coordinate sum) in the ball of radius ``R``.

    Color 0 is ``B = 2 FCC`` (all coordinates even, sum divisible by 4);
    color 1 is the rest.
    """
    R = Fraction(R)
    if R <= 0:
        raise GeometryError("radius must be positive")
    m = int(R)
    R2 = R * R
    pts, cols = [], []
    for x in range(-m, m + 1):
        for y in range(-m, m + 1):
            for z in range(-m, m + 1):
                if (x + y + z) % 2 or x * x + y * y + z * z > R2:
                    continue
                pts.append((Fraction(x), Fraction(y), Fraction(z)))
                in_b = x % 2 == 0 and y % 2 == 0 and z % 2 == 0 and (x + y + z) % 4 == 0
                cols.append(0 if in_b else 1)
    return ChromaticPointSet(tuple(pts), tuple(cols), 2, general_position=False,
                             allow_empty_colors=True)


# ---------------------------------------------------------------------------
# random windows


def uniform_square(n: int, seed: int) -> tuple[tuple[Fraction, Fraction], ...]:
    """``n`` distinct dyadic points uniform in ``[0,1)^2``."""
    rng = random.Random(seed)
    seen: set = set()
    out = []
    scale = 1 << GRID_BITS
    while len(out) < n:
        p = (Fraction(rng.getrandbits(GRID_BITS), scale), Fraction(rng.getrandbits(GRID_BITS), scale))
        if p not in seen:
            seen.add(p)
            out.append(p)
    return tuple(out)


def iid_coloring(n: int, s: int, seed: int, ensure_all: bool = False) -> tuple[int, ...]:
    """Independent uniform colors in ``0..s``.

    With ``ensure_all`` the draw is repeated (same stream) until every color
    occurs; this needs ``n > s``.
    """
    if ensure_all and n <= s:
        raise GeometryError("not enough points to use every color")
    rng = random.Random(seed)
    while True:
        cols = tuple(rng.randrange(s + 1) for _ in range(n))
        if not ensure_all or len(set(cols)) == s + 1:
            return cols


# ---------------------------------------------------------------------------
# annuli ("monkey") configuration


@dataclass(frozen=True)
class AnnuliConfig:
    inner: float = 1.0
    outer: float = 1.5
    spacing: float = 4.0  # mutual distance of the three centers
    fill_radius: float = 0.98  # orange points stay inside this radius of each hole
    occupancy: tuple[float, float, float] = (1.0, 0.5, 0.0)
    n_in: int = 75  # blue points per annulus
    n_out: int = 80  # orange points in a fully occupied hole

    @property
    def threshold(self) -> float:
        return self.inner / 2

    def centers(self) -> list[tuple[float, float]]:
        r = self.spacing / math.sqrt(3)
        return [(r * math.cos(math.pi / 2 + 2 * math.pi * k / 3),
                 r * math.sin(math.pi / 2 + 2 * math.pi * k / 3)) for k in range(3)]


def annuli_sample(seed: int, n_in: int | None = None, n_out: int | None = None,
                  config: AnnuliConfig | None = None) -> ChromaticPointSet:
    """Blue (color 0) points in three annuli, orange (color 1) points in the holes.

    Hole ``k`` receives ``round(occupancy[k] * n_out)`` orange points, uniform in
    the disk of radius ``fill_radius`` about its center: one hole is filled,
    one half-filled, one left empty.
    """
    cfg = config or AnnuliConfig()
    n_in = cfg.n_in if n_in is None else n_in
    n_out = cfg.n_out if n_out is None else n_out
    rng = random.Random(seed)
    pts, cols = [], []
    seen: set = set()

    def add(x: float, y: float, c: int) -> None:
        p = (_dyadic(x, 20), _dyadic(y, 20))
        if p not in seen:
            seen.add(p)
            pts.append(p)
            cols.append(c)

    for cx, cy in cfg.centers():
        for _ in range(n_in):
            # area-uniform radius in [inner, outer]
            r = math.sqrt(rng.uniform(cfg.inner**2, cfg.outer**2))
            t = rng.uniform(0, 2 * math.pi)
            add(cx + r * math.cos(t), cy + r * math.sin(t), 0)
    for (cx, cy), occ in zip(cfg.centers(), cfg.occupancy):
        for _ in range(round(occ * n_out)):
            r = cfg.fill_radius * math.sqrt(rng.random())
            t = rng.uniform(0, 2 * math.pi)
            add(cx + r * math.cos(t), cy + r * math.sin(t), 1)
    return ChromaticPointSet(tuple(pts), tuple(cols), 2, general_position=False,
                             allow_empty_colors=True)


# ---------------------------------------------------------------------------
# specs

KINDS = ("hexagonal", "integer", "fcc", "uniform_square", "annuli")


@dataclass(frozen=True)
class GeneratorSpec:
    """Serializable description of a generated chromatic point set.

    ``portion`` is the disk radius (hexagonal, fcc), the grid side (integer)
    or the point count (uniform_square).  ``colors`` is only used by the
    i.i.d. coloring of ``uniform_square``.
    """

    kind: str
    portion: float = 10.0
    colors: int = 2
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GeometryError(f"unknown generator kind {self.kind!r}")

    def build(self) -> ChromaticPointSet:
        if self.kind == "hexagonal":
            return sublattice_3coloring(Fraction(str(self.portion)))
        if self.kind == "integer":
            return integer_checkerboard(int(self.portion))
        if self.kind == "fcc":
            return fcc(Fraction(str(self.portion)))
        if self.kind == "uniform_square":
            n = int(self.portion)
            pts = uniform_square(n, self.seed)
            cols = iid_coloring(n, self.colors - 1, self.seed + 1, ensure_all=n >= self.colors)
            return ChromaticPointSet(pts, cols, self.colors, general_position=False,
                                     allow_empty_colors=True)
        cfg = AnnuliConfig(**{k: v for k, v in self.extra.items() if k in AnnuliConfig.__dataclass_fields__})
        return annuli_sample(self.seed, config=cfg)

    def to_config(self) -> dict[str, str]:
        out = {"kind": self.kind, "portion": repr(self.portion), "colors": str(self.colors),
               "seed": str(self.seed)}
        for k in sorted(self.extra):
            out[f"extra.{k}"] = str(self.extra[k])
        return out

    @classmethod
    def from_config(cls, cfg: dict[str, str]) -> "GeneratorSpec":
        extra = {}
        for k, v in cfg.items():
            if k.startswith("extra."):
                key = k[len("extra."):]
                extra[key] = int(v) if key in ("n_in", "n_out") else float(v)
        return cls(cfg["kind"], float(cfg.get("portion", 10.0)), int(cfg.get("colors", 2)),
                   int(cfg.get("seed", 0)), extra)
