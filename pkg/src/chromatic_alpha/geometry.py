"""Exact-arithmetic points, colors, predicates and the color lift.

Everything here works over :class:`fractions.Fraction` (or plain ``int``);
floating point never enters a predicate.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
Point = tuple[Fraction, ...]


class GeometryError(ValueError):
    """Malformed geometric input (dimension mismatch, duplicates, bad colors)."""


class GeneralPositionError(GeometryError):
    """Raised when a degenerate (e.g. cospherical) configuration is detected.

    ``subset`` holds the offending point indices.
    """

    def __init__(self, message: str, subset: Sequence[int] = ()):
        super().__init__(message)
        self.subset = tuple(subset)


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions, decimal strings or ``"p/q"`` strings exactly.

    Floats are converted through their decimal ``repr`` so that ``0.1`` means
    one tenth rather than the nearest binary double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise GeometryError(f"non-finite coordinate {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GeometryError(f"cannot parse rational {x!r}") from exc
    return Fraction(x)


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def det(matrix: Sequence[Sequence]) -> Fraction | int:
    """Exact determinant. Integer matrices use fraction-free Bareiss elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    if any(len(row) != n for row in matrix):
        raise GeometryError("determinant of a non-square matrix")
    if all(isinstance(v, int) for row in matrix for v in row):
        return _bareiss(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                row_r, row_c = a[r], a[col]
                for c in range(col + 1, n):
                    row_r[c] -= f * row_c[c]
    return sign * result


def _bareiss(matrix: Sequence[Sequence[int]]) -> int:
    a = [list(row) for row in matrix]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            ai = a[i]
            aik = ai[k]
            ak = a[k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * akk - aik * ak[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve a square system exactly; ``None`` if singular."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        row_c = a[col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / p
                row_r = a[r]
                for c in range(col, n + 1):
                    row_r[c] -= f * row_c[c]
    return [a[i][n] / a[i][i] for i in range(n)]


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of ``points`` (−1 for no points)."""
    if not points:
        return -1
    base = points[0]
    rows = [[Fraction(x) - Fraction(b) for x, b in zip(p, base)] for p in points[1:]]
    return _rank(rows)


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / p
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def sqdist(p: Sequence, q: Sequence):
    return sum((a - b) * (a - b) for a, b in zip(p, q))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# predicates


def orientation(pts: Sequence[Sequence]) -> int:
    """Sign of the oriented volume of ``k+1`` points in ``R^k``."""
    pts = [tuple(as_fraction(x) for x in p) for p in pts]
    if not pts:
        raise GeometryError("orientation needs at least one point")
    k = len(pts) - 1
    if any(len(p) != k for p in pts):
        raise GeometryError(f"orientation needs {k + 1} points in R^{k}")
    base = pts[0]
    rows = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    return _sign(det(rows))


def in_sphere_flat(pts: Sequence[Sequence]) -> int:
    """Decide where the last point lies relative to the circumsphere of the others.

    The first ``k+1`` points span a ``k``-flat (possibly inside a larger
    ambient space) and the last point must lie in that flat.  Only pairwise
    squared distances are used: the Gram matrix of the frame is rebuilt from
    them by polarization, so the test is intrinsic to the flat.

    Returns −1 (inside), 0 (on the sphere) or +1 (outside).
    """
    pts = [tuple(as_fraction(x) for x in p) for p in pts]
    if len(pts) < 2:
        raise GeometryError("in_sphere_flat needs at least two points")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise GeometryError("points of mixed dimension")
    frame = pts[:-1]
    k = len(frame) - 1
    d0 = [sqdist(frame[0], p) for p in pts]

    def gram(i: int, j: int) -> Fraction:
        return (d0[i] + d0[j] - sqdist(pts[i], pts[j])) / 2

    G = [[gram(i, j) for j in range(1, k + 1)] for i in range(1, k + 1)]
    det_g = det(G)
    if det_g == 0:
        raise GeometryError("first k+1 points are affinely dependent")
    # query must be in the flat: the extended Gram matrix is then singular
    G_ext = [[gram(i, j) for j in list(range(1, k + 1)) + [k + 1]] for i in list(range(1, k + 1)) + [k + 1]]
    if det(G_ext) != 0:
        raise GeometryError("query point does not lie in the flat of the frame")
    # circumcenter c = p0 + sum alpha_i (p_i - p0) with G alpha = diag(G)/2
    alpha = solve(G, [G[i][i] / 2 for i in range(k)]) if k else []
    g_q = [gram(k + 1, j) for j in range(1, k + 1)]
    power = d0[k + 1] - 2 * sum(a * g for a, g in zip(alpha, g_q))
    return _sign(power)


# ---------------------------------------------------------------------------
# point sets


@dataclass(frozen=True)
class ChromaticPointSet:
    """Points in ``R^d`` with a color map into ``{0, ..., s}``.

    ``sigma_size`` is ``s + 1``.  When ``general_position`` is set, mosaic
    construction rejects cospherical lifted configurations instead of
    triangulating through them.
    """

    points: tuple[Point, ...]
    colors: tuple[int, ...]
    sigma_size: int
    general_position: bool = True
    allow_empty_colors: bool = False
    dim_d: int = field(init=False)

    def __post_init__(self):
        pts = tuple(tuple(as_fraction(x) for x in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if len(self.points) != len(self.colors):
            raise GeometryError("points and colors differ in length")
        if self.sigma_size < 1:
            raise GeometryError("sigma_size must be positive")
        dims = {len(p) for p in pts}
        if len(dims) > 1:
            raise GeometryError(f"points of mixed dimension {sorted(dims)}")
        object.__setattr__(self, "dim_d", dims.pop() if dims else 0)
        for c in self.colors:
            if not 0 <= c < self.sigma_size:
                raise GeometryError(f"color {c} outside 0..{self.sigma_size - 1}")
        if len(set(pts)) != len(pts):
            seen: dict[Point, int] = {}
            for i, p in enumerate(pts):
                if p in seen:
                    raise GeometryError(f"duplicate points {seen[p]} and {i}")
                seen[p] = i
        if not self.allow_empty_colors:
            missing = set(range(self.sigma_size)) - set(self.colors)
            if missing and pts:
                raise GeometryError(f"empty color classes {sorted(missing)}")

    @classmethod
    def from_iterables(cls, points: Iterable[Iterable], colors: Iterable[int],
                       sigma_size: int | None = None, **kwargs) -> "ChromaticPointSet":
        colors = list(colors)
        if sigma_size is None:
            sigma_size = max(colors) + 1 if colors else 1
        return cls(tuple(tuple(p) for p in points), tuple(colors), sigma_size, **kwargs)

    @property
    def s(self) -> int:
        return self.sigma_size - 1

    def __len__(self) -> int:
        return len(self.points)

    def color_class(self, j: int) -> list[int]:
        return [i for i, c in enumerate(self.colors) if c == j]

    def restricted(self, tau: Iterable[int]) -> tuple["ChromaticPointSet", list[int]]:
        """Sub-point-set of the colors in ``tau`` (relabelled 0..|tau|-1).

        Also returns the original index of every kept point.
        """
        tau = sorted(set(tau))
        if not tau:
            raise GeometryError("empty color subset")
        relabel = {c: k for k, c in enumerate(tau)}
        keep = [i for i, c in enumerate(self.colors) if c in relabel]
        sub = ChromaticPointSet(
            tuple(self.points[i] for i in keep),
            tuple(relabel[self.colors[i]] for i in keep),
            len(tau),
            general_position=self.general_position,
            allow_empty_colors=True,
        )
        return sub, keep

    def uncolored(self) -> "ChromaticPointSet":
        """The same points with every color collapsed to 0."""
        return ChromaticPointSet(self.points, (0,) * len(self.points), 1,
                                 general_position=self.general_position)

    def min_distance_sq(self) -> Fraction:
        n = len(self.points)
        return min(sqdist(self.points[i], self.points[j]) for i in range(n) for j in range(i + 1, n))

    def jittered(self, seed: int, magnitude: Fraction | None = None) -> "ChromaticPointSet":
        """Deterministic rational perturbation of every coordinate.

        ``magnitude`` defaults to ``2**-30`` times (a rational lower bound of)
        the minimum inter-point distance.
        """
        if magnitude is None:
            dmin = _sqrt_floor(self.min_distance_sq()) if len(self.points) > 1 else Fraction(1)
            magnitude = dmin / 2**30
        rng = random.Random(seed)
        denom = 2**20
        pts = tuple(
            tuple(x + magnitude * Fraction(rng.randint(-denom, denom), denom) for x in p)
            for p in self.points
        )
        return ChromaticPointSet(pts, self.colors, self.sigma_size,
                                 general_position=self.general_position,
                                 allow_empty_colors=self.allow_empty_colors)


def _sqrt_floor(x: Fraction, bits: int = 32) -> Fraction:
    """Rational lower bound of sqrt(x) with ``bits`` bits of precision."""
    scaled = x * 4**bits
    return Fraction(math.isqrt(scaled.numerator // scaled.denominator), 2**bits)


@dataclass(frozen=True)
class LiftedPointSet:
    """Points lifted to ``u_j + A_j``.

    For ``s >= 1`` the color block has ``s+1`` coordinates with ``u_0`` the
    origin and ``u_j = M e_j``; block coordinate 0 is therefore identically
    zero and the points lie in the ``(s+d)``-flat ``{x_0 = 0}``.  For ``s = 0``
    the lift is the identity.
    """

    lifted_points: tuple[Point, ...]
    fiber_index: tuple[int, ...]
    scale_M: Fraction
    s: int
    d: int

    @property
    def ambient_dim(self) -> int:
        return self.s + 1 + self.d if self.s else self.d

    def flat_coordinates(self) -> list[Point]:
        """Intrinsic ``(s+d)``-dimensional coordinates (the zero block coordinate dropped)."""
        if self.s == 0:
            return list(self.lifted_points)
        return [p[1:] for p in self.lifted_points]

    def flat_equations(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Affine equations ``a . x = b`` cutting out the lift flat."""
        if self.s == 0:
            return []
        a = tuple(Fraction(1 if i == 0 else 0) for i in range(self.ambient_dim))
        return [(a, Fraction(0))]


def color_block(j: int, s: int, M: Fraction) -> Point:
    if s == 0:
        return ()
    return tuple(Fraction(M) if (i == j and j >= 1) else Fraction(0) for i in range(s + 1))


def lift(chi: ChromaticPointSet, M=1) -> LiftedPointSet:
    """Color lift ``A_j' = u_j + A_j``."""
    M = as_fraction(M)
    if M <= 0:
        raise GeometryError("lift scale must be positive")
    s = chi.s
    blocks = [color_block(j, s, M) for j in range(chi.sigma_size)]
    pts = tuple(blocks[c] + p for p, c in zip(chi.points, chi.colors))
    return LiftedPointSet(pts, chi.colors, M, s, chi.dim_d)
