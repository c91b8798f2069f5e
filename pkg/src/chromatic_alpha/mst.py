"""Euclidean minimum spanning trees and MST-ratio statistics."""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import ChromaticPointSet, GeometryError, sqdist


class DisconnectedError(GeometryError):
    pass


@dataclass(frozen=True)
class SpanningTree:
    edges: tuple[tuple[int, int], ...]
    length_sq_terms: tuple[Fraction, ...]

    @property
    def total_length(self) -> float:
        return math.fsum(math.sqrt(x) for x in self.length_sq_terms)

    def half_edge_sq(self) -> Counter:
        """Multiset of ``(length / 2)^2`` over the edges."""
        return Counter(x / 4 for x in self.length_sq_terms)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def kruskal(n: int, weighted_edges: Iterable[tuple[object, int, int]]) -> tuple[list[tuple[int, int]], list]:
    """Kruskal on ``(weight, i, j)`` triples; ties broken by ``(i, j)``."""
    uf = UnionFind(n)
    edges, weights = [], []
    for w, i, j in sorted(weighted_edges):
        if uf.union(i, j):
            edges.append((i, j))
            weights.append(w)
            if len(edges) == n - 1:
                break
    if n > 0 and len(edges) != n - 1:
        raise DisconnectedError("candidate edges do not connect all points")
    return edges, weights


def delaunay_edges(points: Sequence[Sequence[Fraction]], seed: int = 0) -> list[tuple[int, int]]:
    """Edges of the (uncolored) exact Delaunay mosaic."""
    from .delaunay import build_mosaic

    chi = ChromaticPointSet(tuple(tuple(p) for p in points), (0,) * len(points), 1,
                            general_position=False)
    return list(build_mosaic(chi, seed=seed).edges())


def mst(points: Sequence[Sequence], candidate_edges: Iterable[tuple[int, int]] | None = None) -> SpanningTree:
    """Minimum spanning tree with exact squared lengths.

    Default candidates: Delaunay edges for ``d <= 2``, the complete graph
    otherwise.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n = len(pts)
    if n <= 1:
        return SpanningTree((), ())
    d = len(pts[0])
    if candidate_edges is None:
        if d <= 2:
            candidate_edges = delaunay_edges(pts)
        else:
            return _complete_mst(pts)
    weighted = ((sqdist(pts[i], pts[j]), min(i, j), max(i, j)) for i, j in candidate_edges)
    edges, weights = kruskal(n, weighted)
    return SpanningTree(tuple(edges), tuple(weights))


def _complete_mst(pts: list[tuple[Fraction, ...]]) -> SpanningTree:
    """Complete-graph MST: float pre-sort, exact tie resolution by sorting exact keys in blocks."""
    n = len(pts)
    arr = np.array([[float(x) for x in p] for p in pts])
    iu, ju = np.triu_indices(n, 1)
    d2 = ((arr[iu] - arr[ju]) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")
    uf = UnionFind(n)
    edges, weights = [], []
    k = 0
    m = len(order)
    while k < m and len(edges) < n - 1:
        # gather a block of nearly-equal float lengths and order it exactly
        start = k
        base = d2[order[k]]
        while k < m and d2[order[k]] <= base * (1 + 1e-9) + 1e-300:
            k += 1
        block = [(sqdist(pts[iu[e]], pts[ju[e]]), int(iu[e]), int(ju[e])) for e in order[start:k]]
        for w, i, j in sorted(block):
            if uf.union(i, j):
                edges.append((i, j))
                weights.append(w)
    return SpanningTree(tuple(edges), tuple(weights))


def brute_force_mst_length_sq(points: Sequence[Sequence]) -> float:
    """Minimum total length over all spanning trees (Prüfer enumeration, tiny n)."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n = len(pts)
    if n <= 1:
        return 0.0
    if n > 8:
        raise GeometryError("brute-force spanning-tree enumeration limited to 8 points")
    from itertools import product

    best = math.inf
    for code in product(range(n), repeat=n - 2):
        degree = [1] * n
        for c in code:
            degree[c] += 1
        edges = []
        seq = list(code)
        for c in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((leaf, c))
            degree[leaf] -= 1
            degree[c] -= 1
        u, v = [i for i in range(n) if degree[i] == 1]
        edges.append((u, v))
        total = math.fsum(math.sqrt(sqdist(pts[a], pts[b])) for a, b in edges)
        best = min(best, total)
    return best


# ---------------------------------------------------------------------------
# MST-ratio


@dataclass(frozen=True)
class MinglingReport:
    per_color_length: tuple[float, ...]
    union_length: float
    mst_ratio: float
    image_share: float
    kernel_share: float


def mst_ratio(chi: ChromaticPointSet, union_tree: SpanningTree | None = None) -> MinglingReport:
    """Combined per-color MST length over the MST length of all points."""
    lengths = []
    for j in range(chi.sigma_size):
        members = chi.color_class(j)
        if not members:
            raise GeometryError(f"color class {j} is empty")
        lengths.append(mst([chi.points[i] for i in members]).total_length)
    tree = union_tree or mst(chi.points)
    total = tree.total_length
    if total == 0:
        raise GeometryError("MST-ratio needs at least two points")
    ratio = math.fsum(lengths) / total
    image = 1.0 / ratio if ratio else math.inf
    return MinglingReport(tuple(lengths), total, ratio, image, 1.0 - image)


def deaths_equal_half_mst(dgm0, tree: SpanningTree) -> bool:
    """Finite dim-0 deaths^2 equal ``(edge length / 2)^2`` over the MST, as multisets."""
    deaths = Counter(x.death_sq for x in dgm0.points if x.p == 0 and not x.essential)
    return deaths == tree.half_edge_sq()


def _subset_mst_lengths(points: Sequence[Sequence[Fraction]]) -> tuple[np.ndarray, np.ndarray]:
    """MST length of every subset (bit mask) by Prim on the induced complete graph."""
    n = len(points)
    arr = np.array([[float(x) for x in p] for p in points])
    dist = np.sqrt(((arr[:, None, :] - arr[None, :, :]) ** 2).sum(axis=2))
    size = 1 << n
    out = np.zeros(size)
    for mask in range(1, size):
        members = [i for i in range(n) if mask >> i & 1]
        if len(members) <= 1:
            continue
        sub = dist[np.ix_(members, members)]
        k = len(members)
        in_tree = np.zeros(k, dtype=bool)
        in_tree[0] = True
        best = sub[0].copy()
        total = 0.0
        for _ in range(k - 1):
            cand = np.where(in_tree, np.inf, best)
            v = int(np.argmin(cand))
            total += cand[v]
            in_tree[v] = True
            best = np.minimum(best, sub[v])
        out[mask] = total
    return out, dist


def max_ratio_bruteforce(points: Sequence[Sequence], k: int = 2) -> tuple[tuple[int, ...], float]:
    """Maximum MST-ratio over all colorings with ``k`` nonempty classes.

    Colorings are enumerated up to relabelling of classes.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n = len(pts)
    if k == 2 and n > 16:
        raise GeometryError("two-color brute force limited to 16 points")
    if k == 3 and n > 10:
        raise GeometryError("three-color brute force limited to 10 points")
    if k not in (2, 3):
        raise GeometryError("brute force supports 2 or 3 colors")
    if n < k:
        raise GeometryError("fewer points than colors")
    lengths, _ = _subset_mst_lengths(pts)
    full = (1 << n) - 1
    total = lengths[full]
    best, best_col = -1.0, None
    if k == 2:
        # point n-1 always in the complement: each split counted once
        for B in range(1, 1 << (n - 1)):
            r = (lengths[B] + lengths[full ^ B]) / total
            if r > best + 1e-15:
                best, best_col = r, B
        coloring = tuple(1 - (best_col >> i & 1) for i in range(n))
        return coloring, float(best)
    for B in range(1, full):
        if not B & 1:
            continue  # point 0 in the first class
        rest = full ^ B
        low = rest & -rest
        sub = rest
        while sub:
            if sub & low:  # lowest remaining point fixes the second class
                C = sub
                D = rest ^ C
                if D:
                    r = (lengths[B] + lengths[C] + lengths[D]) / total
                    if r > best + 1e-15:
                        best, best_col = r, (B, C, D)
            sub = (sub - 1) & rest
    B, C, D = best_col
    coloring = tuple(0 if B >> i & 1 else (1 if C >> i & 1 else 2) for i in range(n))
    return coloring, float(best)


@dataclass(frozen=True)
class MonteCarloReport:
    n: int
    trials: int
    seed: int
    mean: float
    stderr: float
    ratios: tuple[float, ...]
    model: str = "uniform points in [0,1]^2, i.i.d. uniform 2-coloring"


def expected_ratio_montecarlo(n: int, trials: int, seed: int = 0) -> MonteCarloReport:
    """Mean MST-ratio of uniform random 2-colored points in the unit square."""
    from .generators import iid_coloring, uniform_square

    if n < 2:
        raise GeometryError("need at least two points")
    root = random.Random(seed)
    ratios = []
    for _ in range(trials):
        s = root.randrange(2**32)
        pts = uniform_square(n, s)
        cols = iid_coloring(len(pts), 1, s + 1, ensure_all=True)
        chi = ChromaticPointSet(pts, cols, 2)
        ratios.append(mst_ratio(chi).mst_ratio)
    mean = math.fsum(ratios) / trials
    var = math.fsum((r - mean) ** 2 for r in ratios) / (trials - 1) if trials > 1 else 0.0
    return MonteCarloReport(n, trials, seed, mean, math.sqrt(var / trials), tuple(ratios))
