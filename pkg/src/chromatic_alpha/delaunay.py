"""Chromatic Delaunay mosaics.

The mosaic of a colored point set is the ordinary Delaunay mosaic of its
color lift.  It is computed as the lower convex hull of the paraboloid lift
of the intrinsic (s+d)-dimensional coordinates, with integer arithmetic
throughout.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .geometry import ChromaticPointSet, GeneralPositionError, GeometryError, lift
from .hull import ConvexHull

Simplex = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ChromaticDelaunayMosaic:
    """Face-closed set of simplices over the points of ``point_set``.

    ``simplices[k]`` lists the ``k``-simplices as sorted vertex tuples, in
    lexicographic order.  ``degenerate`` is set when cospherical lifted
    subsets were triangulated through instead of rejected.  ``origin`` maps
    local vertex indices back to a parent point set after :func:`restrict`.
    """

    point_set: ChromaticPointSet
    simplices: tuple[tuple[Simplex, ...], ...]
    degenerate: bool = False
    origin: tuple[int, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def __iter__(self):
        for layer in self.simplices:
            yield from layer

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.simplices)

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplex_set

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChromaticDelaunayMosaic):
            return NotImplemented
        return self.simplices == other.simplices and self.point_set == other.point_set

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def simplex_set(self) -> frozenset[Simplex]:
        return frozenset(self)

    @cached_property
    def cofacets(self) -> dict[Simplex, list[Simplex]]:
        """Immediate cofaces of every simplex."""
        co: dict[Simplex, list[Simplex]] = {s: [] for s in self}
        for layer in self.simplices[1:]:
            for s in layer:
                for k in range(len(s)):
                    co[s[:k] + s[k + 1:]].append(s)
        return co

    def edges(self) -> tuple[Simplex, ...]:
        return self.simplices[1] if len(self.simplices) > 1 else ()

    def colors_of(self, simplex: Simplex) -> frozenset[int]:
        return frozenset(self.point_set.colors[v] for v in simplex)


def _closure(top: Iterable[Simplex]) -> tuple[tuple[Simplex, ...], ...]:
    layers: dict[int, set[Simplex]] = {}
    for s in top:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            layers.setdefault(k - 1, set()).update(combinations(s, k))
    if not layers:
        return ()
    return tuple(tuple(sorted(layers.get(k, ()))) for k in range(max(layers) + 1))


def from_simplices(chi: ChromaticPointSet, simplices: Iterable[Sequence[int]],
                   degenerate: bool = False) -> ChromaticDelaunayMosaic:
    """Mosaic given by the face closure of ``simplices`` (no geometry checked)."""
    return ChromaticDelaunayMosaic(chi, _closure(tuple(s) for s in simplices), degenerate)


# ---------------------------------------------------------------------------
# construction


def _integerize(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return [[int(x * den) for x in r] for r in rows]


def _affine_frame(pts: list[list[int]]) -> tuple[list[int], list[int]]:
    """Base index and indices of points whose differences span the affine hull."""
    base = pts[0]
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    chosen: list[int] = []
    for i, p in enumerate(pts[1:], start=1):
        v = [Fraction(a - b) for a, b in zip(p, base)]
        for row, piv in zip(basis, pivots):
            if v[piv]:
                f = v[piv] / row[piv]
                v = [x - f * y for x, y in zip(v, row)]
        nz = next((c for c, x in enumerate(v) if x), None)
        if nz is not None:
            basis.append(v)
            pivots.append(nz)
            chosen.append(i)
    return [0], chosen


def _local_coordinates(pts: list[list[int]], frame: list[int]) -> list[list[Fraction]]:
    """Coordinates of every point in the affine frame ``pts[0] + span(pts[frame] - pts[0])``."""
    base = pts[0]
    vecs = [[a - b for a, b in zip(pts[i], base)] for i in frame]
    k = len(vecs)
    gram = [[sum(a * b for a, b in zip(u, v)) for v in vecs] for u in vecs]
    # invert the Gram matrix once; lambda = G^{-1} V (p - base)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(k)]
           for i, row in enumerate(gram)]
    for c in range(k):
        piv = next(r for r in range(c, k) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(k):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    inv = [row[k:] for row in aug]
    out = []
    for p in pts:
        diff = [a - b for a, b in zip(p, base)]
        proj = [sum(a * b for a, b in zip(v, diff)) for v in vecs]
        out.append([sum(inv[i][j] * proj[j] for j in range(k)) for i in range(k)])
    return out


def _lower_facets(X: list[list[int]], seed: int) -> tuple[list[Simplex], list[tuple[int, ...]], bool]:
    """Lower facets of the paraboloid lift of integer points ``X`` (any affine rank).

    Returns ``(facets, cospherical_subsets, fallback_used)``.
    """
    n = len(X)
    if n == 1:
        return [(0,)], [], False
    _, frame = _affine_frame(X)
    k = len(frame)
    if n == k + 1:
        return [tuple(range(n))], [], False
    heights = [sum(x * x for x in p) for p in X]
    if k == len(X[0]):
        coords = X
    else:
        coords = _integerize(_local_coordinates(X, frame))
    lifted = [tuple(c) + (h,) for c, h in zip(coords, heights)]
    try:
        hull = ConvexHull(lifted, seed=seed)
    except ValueError:
        # every point on one sphere: any triangulation of the single cell will do
        rng = random.Random(seed)
        fake = [tuple(c) + (rng.randrange(1 << 30),) for c in coords]
        hull = ConvexHull(fake, seed=seed)
        facets = [v for f, v in hull.facets.items() if hull.planes[f][0][-1] < 0]
        return facets, [tuple(range(n))], True
    lower = [f for f, (normal, _) in hull.planes.items() if normal[-1] < 0]
    bad: list[tuple[int, ...]] = []
    for f in lower:
        verts = hull.facets[f]
        for ridge, g in hull.neighbors(f):
            if g < f and hull.planes[g][0][-1] < 0:
                continue  # pair already examined from the other side
            (v,) = set(hull.facets[g]) - set(ridge)
            if hull.side(f, v) == 0:
                bad.append(tuple(sorted(verts + (v,))))
    return [hull.facets[f] for f in lower], bad, False


def build_mosaic(chi: ChromaticPointSet, M=1, seed: int = 0) -> ChromaticDelaunayMosaic:
    """Chromatic Delaunay mosaic of ``chi`` using color-block scale ``M``.

    Raises :class:`GeneralPositionError` on a cospherical empty configuration
    when ``chi.general_position`` is set; otherwise degenerate cells are
    triangulated (placing order fixed by ``seed``) and the result is marked
    ``degenerate``.
    """
    n = len(chi)
    if n == 0:
        raise GeometryError("empty point set")
    lifted = lift(chi, M)
    X = _integerize(lifted.flat_coordinates())
    facets, bad, _ = _lower_facets(X, seed)
    if bad and chi.general_position:
        raise GeneralPositionError(
            f"cospherical lifted points {list(bad[0])}; pass general_position=False "
            "or jitter the input", bad[0])
    return ChromaticDelaunayMosaic(chi, _closure(facets), degenerate=bool(bad))


def restrict(mosaic: ChromaticDelaunayMosaic, tau: Iterable[int]) -> ChromaticDelaunayMosaic:
    """Subcomplex of simplices whose vertices all have colors in ``tau``.

    The result lives on the restricted (relabelled) point set; ``origin``
    records the original vertex indices.
    """
    tau = set(tau)
    if not tau:
        raise GeometryError("empty color subset")
    chi = mosaic.point_set
    sub, keep = chi.restricted(tau)
    local = {g: i for i, g in enumerate(keep)}
    layers = []
    for layer in mosaic.simplices:
        kept = tuple(tuple(local[v] for v in s) for s in layer if all(v in local for v in s))
        if not kept:
            break
        layers.append(kept)
    base = mosaic.origin
    origin = tuple(base[g] for g in keep) if base is not None else tuple(keep)
    return ChromaticDelaunayMosaic(sub, tuple(layers), mosaic.degenerate, origin)


# ---------------------------------------------------------------------------
# exact linear feasibility oracle

ORACLE_CAP = 40


def _nullspace_param(rows: list[list[Fraction]], rhs: list[Fraction], nvars: int):
    """Solve ``rows x = rhs``: particular solution and nullspace basis, or None."""
    a = [r[:] + [b] for r, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    if any(row[nvars] != 0 for row in a[r:]):
        return None
    x0 = [Fraction(0)] * nvars
    for i, c in enumerate(pivots):
        x0[c] = a[i][nvars]
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * nvars
        v[fcol] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][fcol]
        basis.append(v)
    return x0, basis


def _simplex_min(cost: list[Fraction], A: list[list[Fraction]], b: list[Fraction]) -> Fraction | None:
    """``min cost.y`` subject to ``A y = b, y >= 0`` (exact, two-phase, Bland's rule).

    Returns None when infeasible; the problems built here are never unbounded.
    """
    m, n = len(A), len(cost)
    rows = []
    for i in range(m):
        sgn = -1 if b[i] < 0 else 1
        rows.append([sgn * x for x in A[i]] + [Fraction(int(j == i)) for j in range(m)] + [sgn * b[i]])
    basis = [n + i for i in range(m)]
    width = n + m

    def run(obj: list[Fraction], allowed: int) -> None:
        while True:
            # reduced costs
            red = obj[:]
            for i, bv in enumerate(basis):
                cb = obj[bv]
                if cb:
                    row = rows[i]
                    for j in range(width):
                        if row[j]:
                            red[j] -= cb * row[j]
            enter = next((j for j in range(allowed) if red[j] < 0 and j not in basis), None)
            if enter is None:
                return
            best = None
            for i, row in enumerate(rows):
                if row[enter] > 0:
                    ratio = row[width] / row[enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise ArithmeticError("unbounded linear program")
            i = best[1]
            p = rows[i][enter]
            rows[i] = [x / p for x in rows[i]]
            for k in range(m):
                if k != i and rows[k][enter]:
                    f = rows[k][enter]
                    rows[k] = [x - f * y for x, y in zip(rows[k], rows[i])]
            basis[i] = enter

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    run(phase1, width)
    if sum(rows[i][width] for i, bv in enumerate(basis) if bv >= n) != 0:
        return None
    # drive remaining (zero-valued) artificials out of the basis where possible
    for i, bv in enumerate(basis):
        if bv >= n:
            j = next((j for j in range(n) if rows[i][j] != 0), None)
            if j is None:
                continue
            p = rows[i][j]
            rows[i] = [x / p for x in rows[i]]
            for k in range(m):
                if k != i and rows[k][j]:
                    f = rows[k][j]
                    rows[k] = [x - f * y for x, y in zip(rows[k], rows[i])]
            basis[i] = j
    # forbid artificials in phase 2
    obj = list(cost) + [Fraction(0)] * m + [Fraction(0)]
    run(obj, n)
    return sum(cost[bv] * rows[i][width] for i, bv in enumerate(basis) if bv < n)


def is_delaunay_oracle(chi: ChromaticPointSet, nu: Sequence[int]) -> bool:
    """Whether some sphere in the lift flat passes through the lifted ``nu``
    with every other lifted point outside or on it.

    With unknowns ``z`` (center) and ``w`` the condition on a point ``p`` is
    ``|p|^2 - 2 p.z + w >= 0`` (equality on ``nu``), a linear system solved
    exactly.  The maximal common slack is found by a small dual LP.
    """
    n = len(chi)
    if n > ORACLE_CAP:
        raise GeometryError(f"oracle limited to {ORACLE_CAP} points, got {n}")
    nu = sorted(set(nu))
    if not nu:
        raise GeometryError("empty simplex")
    pts = lift(chi, 1).flat_coordinates()
    D = len(pts[0])
    nvars = D + 1

    def coef(p):
        return [-2 * x for x in p] + [Fraction(1)]

    def const(p):
        return sum(x * x for x in p)

    param = _nullspace_param([coef(pts[i]) for i in nu], [-const(pts[i]) for i in nu], nvars)
    if param is None:
        return False
    x0, basis = param
    in_nu = set(nu)
    C, bvec = [], []
    for q in range(n):
        if q in in_nu:
            continue
        a = coef(pts[q])
        val0 = sum(u * v for u, v in zip(a, x0)) + const(pts[q])
        C.append([sum(u * v for u, v in zip(a, nvec)) for nvec in basis])
        bvec.append(-val0)  # need C t >= bvec
    if not C:
        return True
    r = len(basis)
    if r == 0:
        return all(bq <= 0 for bq in bvec)
    # primal: max e  s.t.  C t - e >= b,  e <= 1   (t free)
    # dual:   min sum(-b_q y_q) + y_top  s.t.  sum y_q C_q = 0,  sum y_q + y_top = 1,  y >= 0
    m_q = len(C)
    A = [[C[q][c] for q in range(m_q)] + [Fraction(0)] for c in range(r)]
    A.append([Fraction(1)] * m_q + [Fraction(1)])
    rhs = [Fraction(0)] * r + [Fraction(1)]
    cost = [-bq for bq in bvec] + [Fraction(1)]
    best = _simplex_min(cost, A, rhs)
    if best is None:  # cannot happen: y_top = 1 is feasible
        raise ArithmeticError("dual program infeasible")
    return best >= 0


def oracle_complex(chi: ChromaticPointSet, max_size: int | None = None) -> set[Simplex]:
    """All vertex subsets certified by :func:`is_delaunay_oracle`, level by level.

    A subset is tested only when all its facets passed, so the result is the
    largest face-closed family of certified subsets.
    """
    n = len(chi)
    if max_size is None:
        max_size = chi.s + chi.dim_d + 1
    good: set[Simplex] = set()
    level = [(i,) for i in range(n) if is_delaunay_oracle(chi, (i,))]
    good.update(level)
    for size in range(2, max_size + 1):
        nxt = []
        for s in level:
            for v in range(s[-1] + 1, n):
                cand = s + (v,)
                if all(cand[:k] + cand[k + 1:] in good for k in range(size - 1)):
                    if is_delaunay_oracle(chi, cand):
                        nxt.append(cand)
        good.update(nxt)
        level = nxt
        if not level:
            break
    return good


# ---------------------------------------------------------------------------
# size statistics


@dataclass(frozen=True)
class SizeStats:
    counts: tuple[int, ...]
    total: int
    n: int
    spread: float


def size_stats(mosaic: ChromaticDelaunayMosaic) -> SizeStats:
    counts = tuple(len(layer) for layer in mosaic.simplices)
    pts = np.array([[float(x) for x in p] for p in mosaic.point_set.points])
    n = len(pts)
    if n < 2:
        spread = 1.0
    else:
        from scipy.spatial.distance import pdist
        dist = pdist(pts)
        spread = float(dist.max() / dist.min())
    return SizeStats(counts, sum(counts), n, spread)
