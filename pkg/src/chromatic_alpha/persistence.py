"""Z/2 persistence: filtration order, column reduction, diagrams, bottleneck
distance, and an explicit rank-table oracle.

Boundary columns and chain vectors are Python ints used as bit sets, bit
``k`` standing for the ``k``-th simplex of the relevant ordering.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .delaunay import Simplex

ESSENTIAL = "essential"


class FiltrationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# filtration order


def value_ranks(values: Sequence) -> list[int]:
    """Dense rank of every entry of ``values`` (rationals), in input order.

    Float rounding is monotone, so a float sort is exact except inside runs
    of equal float images, which are re-sorted exactly.  Nothing is hashed:
    hashing a Fraction costs a modular inverse.
    """
    fl = [float(v) for v in values]
    idx = sorted(range(len(fl)), key=fl.__getitem__)
    ranks = [0] * len(fl)
    r = -1
    prev = None
    i = 0
    while i < len(idx):
        j = i + 1
        while j < len(idx) and fl[idx[j]] == fl[idx[i]]:
            j += 1
        run = idx[i:j]
        if len(run) > 1:
            run.sort(key=values.__getitem__)
        for k in run:
            v = values[k]
            if prev is None or v != prev:
                r += 1
                prev = v
            ranks[k] = r
        i = j
    return ranks


@dataclass(frozen=True)
class FiltrationOrder:
    """Simplices sorted by ``(value, dimension, vertices)``."""

    simplices: tuple[Simplex, ...]
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(zip(self.simplices, self.values))

    @property
    def index(self) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices)}

    def dims(self) -> list[int]:
        return [len(s) - 1 for s in self.simplices]


def filtration_order(rf) -> FiltrationOrder:
    """Total order of a monotone simplex -> value map (``RadiusFunction`` or dict)."""
    values: Mapping[Simplex, Fraction] = rf.value_sq if hasattr(rf, "value_sq") else rf
    # rank values once so the checks and the main sort compare ints
    items = list(values.items())
    rank = dict(zip((s for s, _ in items), value_ranks([v for _, v in items])))
    for s, r in rank.items():
        if len(s) > 1:
            for k in range(len(s)):
                face = s[:k] + s[k + 1:]
                if face not in rank:
                    raise FiltrationError(f"face {face} of {s} missing")
                if rank[face] > r:
                    raise FiltrationError(f"monotonicity violated: {face} > {s}")
    items.sort(key=lambda it: (rank[it[0]], len(it[0]), it[0]))
    return FiltrationOrder(tuple(s for s, _ in items), tuple(v for _, v in items))


def boundary_columns(order: FiltrationOrder) -> list[int]:
    idx = order.index
    cols = []
    for s in order.simplices:
        col = 0
        if len(s) > 1:
            for k in range(len(s)):
                col |= 1 << idx[s[:k] + s[k + 1:]]
        cols.append(col)
    return cols


# ---------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class Reduction:
    """Result of the column reduction of a filtered boundary matrix.

    ``pairs`` holds ``(birth_index, death_index)``; ``essential`` the
    unpaired positive indices.  ``reduced`` keeps the reduced columns.
    """

    order: FiltrationOrder
    pairs: tuple[tuple[int, int], ...]
    essential: tuple[int, ...]
    reduced: tuple[int, ...]

    def death_to_birth(self) -> dict[Simplex, Simplex]:
        s = self.order.simplices
        return {s[d]: s[b] for b, d in self.pairs}


def reduce_columns(cols: Sequence[int]) -> tuple[list[int], dict[int, int]]:
    """Standard left-to-right reduction; returns reduced columns and ``low -> column``."""
    R = list(cols)
    pivot: dict[int, int] = {}
    for j in range(len(R)):
        c = R[j]
        while c:
            low = c.bit_length() - 1
            k = pivot.get(low)
            if k is None:
                pivot[low] = j
                break
            c ^= R[k]
        R[j] = c
    return R, pivot


def reduce_boundary(order: FiltrationOrder) -> Reduction:
    R, pivot = reduce_columns(boundary_columns(order))
    pairs = tuple(sorted((low, j) for low, j in pivot.items()))
    paired = {b for b, _ in pairs}
    essential = tuple(j for j in range(len(R)) if R[j] == 0 and j not in paired)
    return Reduction(order, pairs, essential, tuple(R))


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True, order=True)
class DiagramPoint:
    p: int
    birth_sq: Fraction
    death_sq: Fraction
    essential: bool = False

    @property
    def collapsible(self) -> bool:
        return self.birth_sq == self.death_sq

    @property
    def birth(self) -> float:
        return math.sqrt(self.birth_sq)

    @property
    def death(self) -> float:
        return math.sqrt(self.death_sq)

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of points in squared units; essential classes closed at ``C_sq``."""

    points: tuple[DiagramPoint, ...]
    C_sq: Fraction

    def __post_init__(self):
        n = len(self.points)
        r = value_ranks([x.birth_sq for x in self.points] + [x.death_sq for x in self.points])
        order = sorted(range(n), key=lambda k: (self.points[k].p, r[k], r[n + k], self.points[k].essential))
        pts = [self.points[k] for k in order]
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def in_dim(self, p: int) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple(x for x in self.points if x.p == p), self.C_sq)

    def nonzero(self) -> "PersistenceDiagram":
        """Drop zero-persistence (collapsible) points."""
        return PersistenceDiagram(tuple(x for x in self.points if not x.collapsible), self.C_sq)

    def finite(self) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple(x for x in self.points if not x.essential), self.C_sq)

    def multiset(self) -> Counter:
        return Counter((x.p, x.birth_sq, x.death_sq, x.essential) for x in self.points)

    @property
    def dims(self) -> list[int]:
        return sorted({x.p for x in self.points})

    def above(self, threshold: float) -> "PersistenceDiagram":
        """Points whose persistence in radius units exceeds ``threshold``."""
        return PersistenceDiagram(tuple(x for x in self.points if x.persistence > threshold), self.C_sq)


def default_C_sq(values: Iterable[Fraction]) -> Fraction:
    """Smallest integer strictly above every value."""
    top = max(values, default=Fraction(0))
    return Fraction(math.floor(top) + 1)


def _check_C(C_sq, births: Iterable[Fraction]) -> Fraction:
    C_sq = Fraction(C_sq)
    for b in births:
        if C_sq <= b:
            raise FiltrationError(f"C_sq = {C_sq} does not exceed birth value {b}")
    return C_sq


def diagram(reduction: Reduction, values: Sequence[Fraction] | None = None,
            C_sq=None, p: int | None = None) -> PersistenceDiagram:
    """Diagram of a reduction (all dimensions, or only dimension ``p``)."""
    order = reduction.order
    values = order.values if values is None else values
    dims = order.dims()
    if C_sq is None:
        C_sq = default_C_sq(values)
    C_sq = _check_C(C_sq, (values[i] for i in reduction.essential))
    pts = [DiagramPoint(dims[b], values[b], values[d]) for b, d in reduction.pairs]
    pts += [DiagramPoint(dims[i], values[i], C_sq, True) for i in reduction.essential]
    if p is not None:
        pts = [x for x in pts if x.p == p]
    return PersistenceDiagram(tuple(pts), C_sq)


def persistence_diagram(values: Mapping[Simplex, Fraction], C_sq=None) -> PersistenceDiagram:
    """Convenience: order, reduce and read off the diagram of a filtered complex."""
    order = filtration_order(values)
    return diagram(reduce_boundary(order), C_sq=C_sq)


def betti_curve(dgm: PersistenceDiagram, r_sq, p: int | None = None) -> int:
    """Number of points with ``birth <= r_sq < death`` (essential classes never die)."""
    return sum(1 for x in dgm.points
               if (p is None or x.p == p) and x.birth_sq <= r_sq and (x.essential or r_sq < x.death_sq))


# ---------------------------------------------------------------------------
# bottleneck distance


def _bottleneck_points(pts: Sequence[tuple[float, float]], qts: Sequence[tuple[float, float]]) -> float:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    n, m = len(pts), len(qts)
    if n == 0 and m == 0:
        return 0.0
    P = np.array(pts, dtype=float).reshape(-1, 2)
    Q = np.array(qts, dtype=float).reshape(-1, 2)
    cross = np.maximum(np.abs(P[:, None, 0] - Q[None, :, 0]),
                       np.abs(P[:, None, 1] - Q[None, :, 1])) if n and m else np.zeros((n, m))
    diagP = (P[:, 1] - P[:, 0]) / 2 if n else np.zeros(0)
    diagQ = (Q[:, 1] - Q[:, 0]) / 2 if m else np.zeros(0)
    cands = np.unique(np.concatenate([cross.ravel(), diagP, diagQ, [0.0]]))

    def feasible(delta: float) -> bool:
        # left: P then diagonal copies of Q; right: Q then diagonal copies of P
        rows, cols = [], []
        pi, qj = np.nonzero(cross <= delta)
        rows += list(pi)
        cols += list(qj)
        for i in np.nonzero(diagP <= delta)[0]:
            rows.append(i)
            cols.append(m + i)
        for j in np.nonzero(diagQ <= delta)[0]:
            rows.append(n + j)
            cols.append(j)
        for j in range(m):
            for i in range(n):
                rows.append(n + j)
                cols.append(m + i)
        size = n + m
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
        match = maximum_bipartite_matching(graph, perm_type="column")
        return bool((match >= 0).all())

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck(D1: PersistenceDiagram, D2: PersistenceDiagram, p: int | None = None) -> float:
    """Bottleneck distance in radius units.

    Finite points may be matched to the diagonal; essential classes are
    matched among themselves by birth (infinite distance if their counts
    differ).
    """
    def split(D):
        fin, ess = [], []
        for x in D.points:
            if p is not None and x.p != p:
                continue
            if x.essential:
                ess.append((x.p, x.birth))
            elif not x.collapsible:
                fin.append((x.p, (x.birth, x.death)))
        return fin, ess

    f1, e1 = split(D1)
    f2, e2 = split(D2)
    dims = sorted({q for q, _ in f1 + f2 + e1 + e2})
    worst = 0.0
    for q in dims:
        a = sorted(b for r, b in e1 if r == q)
        b = sorted(b for r, b in e2 if r == q)
        if len(a) != len(b):
            return math.inf
        for x, y in zip(a, b):
            worst = max(worst, abs(x - y))
        worst = max(worst, _bottleneck_points([t for r, t in f1 if r == q], [t for r, t in f2 if r == q]))
    return worst


# ---------------------------------------------------------------------------
# GF(2) linear algebra for the explicit oracle (pivot = lowest set bit)


class GF2Span:
    """Echelon basis of a subspace of GF(2)^N, keyed by the lowest set bit."""

    __slots__ = ("basis",)

    def __init__(self, vectors: Iterable[int] = ()):
        self.basis: dict[int, int] = {}
        for v in vectors:
            self.add(v)

    def copy(self) -> "GF2Span":
        c = GF2Span()
        c.basis = dict(self.basis)
        return c

    def reduce(self, v: int) -> int:
        while v:
            low = v & -v
            b = self.basis.get(low)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.basis[v & -v] = v
            return True
        return False

    def __len__(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[int]:
        return list(self.basis.values())


def gf2_nullspace(columns: Sequence[int]) -> list[int]:
    """Basis of ``{x : sum x_k columns[k] = 0}`` as bit sets over column indices."""
    basis: dict[int, tuple[int, int]] = {}  # lowest bit -> (vector, combination)
    null = []
    for k, col in enumerate(columns):
        v, comb = col, 1 << k
        while v:
            low = v & -v
            if low not in basis:
                basis[low] = (v, comb)
                break
            bv, bc = basis[low]
            v ^= bv
            comb ^= bc
        if not v:
            null.append(comb)
    return null


def gf2_intersection(A: Sequence[int], B: Sequence[int], nbits: int) -> list[int]:
    """Basis of ``span(A) ∩ span(B)`` by the Zassenhaus construction."""
    # rows (a, a) and (b, 0); the low block is eliminated first, so rows
    # with a vanishing low block carry a basis of the intersection
    span = GF2Span()
    shift = nbits
    for a in A:
        span.add(a | (a << shift))
    for b in B:
        span.add(b)
    mask = (1 << shift) - 1
    return [v >> shift for v in span.vectors() if v & mask == 0]


@dataclass
class ChainSpaces:
    """Cycle and boundary spaces of one filtration in a common chain coordinate system.

    ``coords[p]`` maps each ``p``-simplex to its bit position.
    """

    simplices: list[Simplex]
    level: dict[Simplex, int]
    coords: dict[int, dict[Simplex, int]]

    @classmethod
    def build(cls, values: Mapping[Simplex, Fraction], levels: Sequence[Fraction]):
        lvl = {v: i for i, v in enumerate(levels)}
        level = {s: lvl[v] for s, v in values.items()}
        coords: dict[int, dict[Simplex, int]] = {}
        for s in sorted(values, key=lambda s: (len(s), s)):
            c = coords.setdefault(len(s) - 1, {})
            c[s] = len(c)
        return cls(sorted(values), level, coords)

    def chain(self, simplices: Iterable[Simplex], p: int) -> int:
        c = self.coords[p]
        v = 0
        for s in simplices:
            v ^= 1 << c[s]
        return v

    def boundary(self, s: Simplex) -> int:
        if len(s) == 1:
            return 0
        return self.chain((s[:k] + s[k + 1:] for k in range(len(s))), len(s) - 2)

    def simplices_of(self, p: int, upto: int, members: set[Simplex] | None = None) -> list[Simplex]:
        return [s for s in self.coords.get(p, {}) if self.level[s] <= upto
                and (members is None or s in members)]

    def cycles(self, p: int, upto: int, members: set[Simplex] | None = None) -> list[int]:
        simp = self.simplices_of(p, upto, members)
        null = gf2_nullspace([self.boundary(s) for s in simp])
        out = []
        for comb in null:
            out.append(self.chain((simp[k] for k in range(len(simp)) if comb >> k & 1), p))
        return out

    def relative_cycles(self, p: int, upto: int, sub: set[Simplex]) -> list[int]:
        """Chains of ``K_i`` whose boundary lies in ``L_i`` (including ``C_p(L_i)``)."""
        simp = self.simplices_of(p, upto)
        below = self.coords.get(p - 1, {})
        mask = 0
        for s, k in below.items():
            if s not in sub:
                mask |= 1 << k
        cols = [self.boundary(s) & mask for s in simp]
        null = gf2_nullspace(cols)
        return [self.chain((simp[k] for k in range(len(simp)) if comb >> k & 1), p) for comb in null]

    def boundaries(self, p: int, upto: int, members: set[Simplex] | None = None) -> list[int]:
        return [self.boundary(s) for s in self.simplices_of(p + 1, upto, members)]

    def chains(self, p: int, upto: int, members: set[Simplex]) -> list[int]:
        return [1 << self.coords[p][s] for s in self.simplices_of(p, upto, members)]


@dataclass(frozen=True)
class PersistentBettiTable:
    """``beta[p][i, j]``: rank of the map from level ``i`` to level ``j``."""

    levels: tuple[Fraction, ...]
    beta: dict[int, np.ndarray]

    def betti(self, p: int, i: int) -> int:
        return int(self.beta[p][i, i])

    def diagram(self, C_sq=None) -> PersistenceDiagram:
        """Multiplicities by inclusion-exclusion (positive-persistence points only)."""
        return table_to_diagram(self, C_sq)


def table_to_diagram(table: PersistentBettiTable, C_sq=None) -> PersistenceDiagram:
    levels = table.levels
    L = len(levels)
    if C_sq is None:
        C_sq = default_C_sq(levels)
    pts = []
    for p, B in table.beta.items():
        def b(i, j):
            if i < 0 or j < 0:
                return 0
            return int(B[i, j])
        for i in range(L):
            for j in range(i + 1, L):
                mu = b(i, j - 1) - b(i, j) - b(i - 1, j - 1) + b(i - 1, j)
                if mu < 0:
                    raise FiltrationError(f"negative multiplicity at ({i}, {j}) in dimension {p}")
                pts += [DiagramPoint(p, levels[i], levels[j])] * mu
            mu = b(i, L - 1) - b(i - 1, L - 1)
            if mu < 0:
                raise FiltrationError(f"negative essential multiplicity at {i} in dimension {p}")
            if mu:
                _check_C(C_sq, [levels[i]])
            pts += [DiagramPoint(p, levels[i], Fraction(C_sq), True)] * mu
    return PersistenceDiagram(tuple(pts), Fraction(C_sq))


def persistent_rank_table(levels: Sequence[Fraction], numerator, growing, dims: Iterable[int]) -> PersistentBettiTable:
    """Generic table ``dim(X_i + Y_j) - dim(Y_j)`` for ``i <= j``.

    ``numerator(p, i)`` returns the vectors spanning ``X_i``.  ``growing(p)``
    returns ``(level, vector)`` pairs; ``Y_j`` is spanned by those with
    level at most ``j``.
    """
    L = len(levels)
    beta = {}
    for p in dims:
        B = np.zeros((L, L), dtype=np.int64)
        byl: list[list[int]] = [[] for _ in range(L)]
        for lev, v in growing(p):
            byl[lev].append(v)
        dimY = []
        Y = GF2Span()
        for j in range(L):
            for v in byl[j]:
                Y.add(v)
            dimY.append(len(Y))
        for i in range(L):
            span = GF2Span()
            for j in range(i + 1):
                for v in byl[j]:
                    span.add(v)
            for v in numerator(p, i):
                span.add(v)
            B[i, i] = len(span) - dimY[i]
            for j in range(i + 1, L):
                for v in byl[j]:
                    span.add(v)
                B[i, j] = len(span) - dimY[j]
        beta[p] = B
    return PersistentBettiTable(tuple(levels), beta)


def homology_oracle(values: Mapping[Simplex, Fraction] | object, cap: int = 300) -> PersistentBettiTable:
    """Persistent Betti numbers of a filtered complex by explicit rank computations.

    Levels are the distinct filtration values; ``beta[p][i, j]`` is the rank
    of ``H_p(K_i) -> H_p(K_j)``.
    """
    values = values.value_sq if hasattr(values, "value_sq") else values
    if len(values) > cap:
        raise FiltrationError(f"oracle limited to {cap} simplices, got {len(values)}")
    levels = sorted(set(values.values()))
    sp = ChainSpaces.build(values, levels)
    top = max(sp.coords)
    return persistent_rank_table(
        levels,
        lambda p, i: sp.cycles(p, i),
        lambda p: [(sp.level[s], sp.boundary(s)) for s in sp.simplices_of(p + 1, len(levels))],
        range(top + 1),
    )
