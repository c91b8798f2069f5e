"""Randomized incremental convex hull over integer points, any small dimension.

The hull boundary is kept as a simplicial complex of facets.  A point that
is coplanar with a facet does not see it, so degenerate faces come out
triangulated (a placing triangulation) instead of breaking the algorithm.
"""
from __future__ import annotations

import random
from operator import mul
from typing import Sequence

from .geometry import _bareiss

IntPoint = tuple[int, ...]


def _hyperplane(pts: Sequence[IntPoint]) -> tuple[list[int], int]:
    """Normal and offset of the hyperplane through ``m`` points of ``Z^m``."""
    m = len(pts[0])
    v0 = pts[0]
    rows = [[a - b for a, b in zip(p, v0)] for p in pts[1:]]
    if m == 1:
        normal = [1]
    elif m == 2:
        normal = [rows[0][1], -rows[0][0]]
    elif m == 3:
        (a1, a2, a3), (b1, b2, b3) = rows
        normal = [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1]
    elif m == 4:
        (a0, a1, a2, a3), (b0, b1, b2, b3), (c0, c1, c2, c3) = rows
        # 2x2 minors of the last two rows, then cofactor expansion along the first
        m01, m02, m03 = b0 * c1 - b1 * c0, b0 * c2 - b2 * c0, b0 * c3 - b3 * c0
        m12, m13, m23 = b1 * c2 - b2 * c1, b1 * c3 - b3 * c1, b2 * c3 - b3 * c2
        normal = [a1 * m23 - a2 * m13 + a3 * m12, -(a0 * m23 - a2 * m03 + a3 * m02),
                  a0 * m13 - a1 * m03 + a3 * m01, -(a0 * m12 - a1 * m02 + a2 * m01)]
    else:
        normal = []
        for c in range(m):
            minor = [row[:c] + row[c + 1:] for row in rows]
            d = _bareiss(minor)
            normal.append(-d if c % 2 else d)
    off = -sum(n * x for n, x in zip(normal, v0))
    return normal, off


class ConvexHull:
    """Convex hull of integer points spanning all of ``Z^m``.

    ``facets`` maps facet id to its sorted vertex tuple; ``planes`` holds the
    outward normal and offset.  ``side(f, p) > 0`` means ``p`` is beyond ``f``.
    """

    def __init__(self, points: Sequence[IntPoint], seed: int = 0):
        self.points = [tuple(p) for p in points]
        n = len(self.points)
        self.m = m = len(self.points[0])
        if n < m + 1:
            raise ValueError("not enough points for a full-dimensional hull")
        rng = random.Random(seed)
        order = list(range(n))
        rng.shuffle(order)
        initial = self._initial_simplex(order)
        init_set = set(initial)
        rest = [i for i in order if i not in init_set]

        self.facets: dict[int, tuple[int, ...]] = {}
        self.planes: dict[int, tuple[list[int], int]] = {}
        self.outside: dict[int, list[int]] = {}
        self.ridges: dict[tuple[int, ...], list[int]] = {}
        self.conflicts: list[set[int]] = [set() for _ in range(n)]
        self._next = 0
        # interior reference scaled by (m+1): inside means side < 0
        self._ref = [sum(self.points[i][c] for i in initial) for c in range(m)]

        for drop in range(m + 1):
            verts = tuple(sorted(v for k, v in enumerate(initial) if k != drop))
            self._add_facet(verts, rest)
        for p in rest:
            self._insert(p)

    def _initial_simplex(self, order: list[int]) -> list[int]:
        from fractions import Fraction

        chosen = [order[0]]
        basis: list[list[Fraction]] = []  # echelon rows of differences
        pivots: list[int] = []
        base = self.points[order[0]]
        for i in order[1:]:
            v = [Fraction(a - b) for a, b in zip(self.points[i], base)]
            for row, piv in zip(basis, pivots):
                if v[piv]:
                    f = v[piv] / row[piv]
                    v = [x - f * y for x, y in zip(v, row)]
            nz = next((c for c, x in enumerate(v) if x), None)
            if nz is None:
                continue
            basis.append(v)
            pivots.append(nz)
            chosen.append(i)
            if len(chosen) == self.m + 1:
                return chosen
        raise ValueError("points do not span the ambient space")

    def side(self, fid: int, p: int) -> int:
        normal, off = self.planes[fid]
        return sum(a * b for a, b in zip(normal, self.points[p])) + off

    def _add_facet(self, verts: tuple[int, ...], candidates) -> int:
        normal, off = _hyperplane([self.points[v] for v in verts])
        ref = sum(a * b for a, b in zip(normal, self._ref)) + (self.m + 1) * off
        if ref > 0:
            normal = [-a for a in normal]
            off = -off
        fid = self._next
        self._next += 1
        self.facets[fid] = verts
        self.planes[fid] = (normal, off)
        pts = self.points
        neg = -off
        if self.m == 4:
            n0, n1, n2, n3 = normal
            out = [q for q in candidates
                   if n0 * pts[q][0] + n1 * pts[q][1] + n2 * pts[q][2] + n3 * pts[q][3] > neg]
        else:
            out = [q for q in candidates if sum(map(mul, normal, pts[q])) > neg]
        conflicts = self.conflicts
        for q in out:
            conflicts[q].add(fid)
        self.outside[fid] = out
        for k in range(len(verts)):
            ridge = verts[:k] + verts[k + 1:]
            self.ridges.setdefault(ridge, []).append(fid)
        return fid

    def _remove_facet(self, fid: int) -> None:
        verts = self.facets.pop(fid)
        del self.planes[fid]
        for q in self.outside.pop(fid):
            self.conflicts[q].discard(fid)
        for k in range(len(verts)):
            ridge = verts[:k] + verts[k + 1:]
            lst = self.ridges[ridge]
            lst.remove(fid)
            if not lst:
                del self.ridges[ridge]

    def _insert(self, p: int) -> None:
        visible = set(self.conflicts[p])
        if not visible:
            return  # inside or on the hull; cannot happen for points in convex position
        horizon = []
        for fid in visible:
            verts = self.facets[fid]
            for k in range(len(verts)):
                ridge = verts[:k] + verts[k + 1:]
                for g in self.ridges[ridge]:
                    if g != fid and g not in visible:
                        horizon.append((ridge, fid, g))
        pending = []
        for ridge, fid, g in horizon:
            cand = set(self.outside[fid])
            cand.update(self.outside[g])
            cand.discard(p)
            pending.append((tuple(sorted(ridge + (p,))), cand))
        for fid in visible:
            self._remove_facet(fid)
        for verts, cand in pending:
            self._add_facet(verts, sorted(cand))

    def neighbors(self, fid: int):
        """Yield ``(ridge, neighbor_id)`` for every ridge of facet ``fid``."""
        verts = self.facets[fid]
        for k in range(len(verts)):
            ridge = verts[:k] + verts[k + 1:]
            for g in self.ridges[ridge]:
                if g != fid:
                    yield ridge, g
