"""Smallest empty stacks, the chromatic radius function and its GDM structure."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from operator import mul
from typing import Iterable, Sequence

import numpy as np

from .delaunay import ChromaticDelaunayMosaic, Simplex, build_mosaic
from .geometry import ChromaticPointSet, GeneralPositionError, GeometryError, det, sqdist


@dataclass(frozen=True)
class Stack:
    """Concentric spheres, one per color, given by squared radii."""

    center: tuple[Fraction, ...]
    radius_sq_per_color: dict[int, Fraction]

    @property
    def stack_radius_sq(self) -> Fraction:
        return max(self.radius_sq_per_color.values(), default=Fraction(0))


def _reduce_gcd(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return [x // g for x in v] if g > 1 else v


def _project_int(rows: list[list[int]], rhs: list[int], a: Sequence[int]):
    """Closest point to ``a`` on ``{z : rows z = rhs}`` over the integers.

    Returns ``(numerators, den)`` with ``z = numerators / den``, or None when
    the system is inconsistent.
    """
    d = len(a)
    basis: list[tuple[list[int], int]] = []
    E, bs = [], []
    for r, b in zip(rows, rhs):
        v = list(r) + [b]
        for bv, c in basis:
            if v[c]:
                f, g = bv[c], v[c]
                v = _reduce_gcd([f * x - g * y for x, y in zip(v, bv)])
        piv = next((c for c in range(d) if v[c]), None)
        if piv is None:
            if v[d]:
                return None
            continue
        basis.append((v, piv))
        E.append(r)
        bs.append(b)
    if not E:
        return tuple(a), 1
    m = len(E)
    # z = a + E^T y  with  (E E^T) y = b - E a, solved by Cramer's rule
    resid = [b - sum(map(mul, row, a)) for row, b in zip(E, bs)]
    G = [[sum(map(mul, E[i], E[j])) for j in range(m)] for i in range(m)]
    if m == 1:
        den, ynum = G[0][0], resid
    elif m == 2:
        (a00, a01), (a10, a11) = G
        den = a00 * a11 - a01 * a10
        ynum = [resid[0] * a11 - a01 * resid[1], a00 * resid[1] - resid[0] * a10]
    else:
        den = det(G)
        ynum = []
        for i in range(m):
            Gi = [row[:i] + [resid[k]] + row[i + 1:] for k, row in enumerate(G)]
            ynum.append(det(Gi))
    if den < 0:
        den, ynum = -den, [-y for y in ynum]
    z = tuple(den * a[k] + sum(ynum[i] * E[i][k] for i in range(m)) for k in range(d))
    return z, den


def _equidistance_rows(group: Sequence[Sequence[int]]):
    """Linear equations for ``|z - p| = |z - p0|`` over the points of ``group``."""
    p0 = group[0]
    n0 = sum(map(mul, p0, p0))
    rows, rhs = [], []
    for p in group[1:]:
        rows.append([2 * (x - y) for x, y in zip(p, p0)])
        rhs.append(sum(map(mul, p, p)) - n0)
    return rows, rhs


def _integer_frame(points: Sequence[Sequence[Fraction]]) -> tuple[list[tuple[int, ...]], int]:
    """Scale rational points to integers by the lcm of their denominators."""
    L = 1
    for p in points:
        for x in p:
            q = x.denominator if isinstance(x, Fraction) else 1
            L = L * q // math.gcd(L, q)
    return [tuple(int(x * L) for x in p) for p in points], L


def smallest_stack_through(chi: ChromaticPointSet, nu: Iterable[int],
                           frame: tuple[list[tuple[int, ...]], int] | None = None) -> Stack:
    """Stack through ``nu`` minimizing the largest radius, ignoring emptiness.

    The optimal center has an active set ``S`` of colors whose radii tie at
    the maximum; it is then the point of the flat (equidistance constraints
    with the classes of ``S`` merged) closest to the points of ``S``.  Every
    such candidate is feasible, so the optimum is the best candidate.
    A singleton ``S = {j}`` whose candidate keeps every other radius at most
    ``r_j`` is optimal outright: no center does better for color ``j``.
    ``frame`` optionally supplies integer coordinates of all points and the
    common scale, as returned by :func:`_integer_frame`.
    """
    nu = sorted(set(nu))
    if not nu:
        raise GeometryError("empty simplex")
    if frame is None:
        ipts, L = _integer_frame([chi.points[v] for v in nu])
        pts = dict(zip(nu, ipts))
    else:
        L = frame[1]
        pts = {v: frame[0][v] for v in nu}
    classes: dict[int, list[int]] = {}
    for v in nu:
        classes.setdefault(chi.colors[v], []).append(v)
    used = sorted(classes)
    best = None
    for size in range(1, len(used) + 1):
        for S in combinations(used, size):
            rows, rhs = [], []
            merged = [pts[v] for j in S for v in classes[j]]
            r, b = _equidistance_rows(merged)
            rows += r
            rhs += b
            for j in used:
                if j not in S:
                    r, b = _equidistance_rows([pts[v] for v in classes[j]])
                    rows += r
                    rhs += b
            sol = _project_int(rows, rhs, merged[0])
            if sol is None:
                continue
            z, den = sol
            # squared radii scaled by den^2
            radii = {}
            for j in used:
                diff = [x - den * y for x, y in zip(z, pts[classes[j][0]])]
                radii[j] = sum(map(mul, diff, diff))
            top = max(radii.values())
            val = Fraction(top, den * den)
            if best is None or val < best[0]:
                best = (val, z, den, radii)
            if size == 1 and radii[S[0]] == top:
                break
        else:
            continue
        break
    if best is None:
        raise GeneralPositionError(f"no common equidistance flat for simplex {nu}", nu)
    _, z, den, radii = best
    scale = den * L
    per_color = {j: Fraction(radii[j], scale * scale) if j in radii else Fraction(0)
                 for j in range(chi.sigma_size)}
    return Stack(tuple(Fraction(x, scale) for x in z), per_color)


def is_empty_stack(chi: ChromaticPointSet, stack: Stack) -> bool:
    """No point of color ``j`` strictly inside the color-``j`` sphere."""
    z = stack.center
    for p, c in zip(chi.points, chi.colors):
        r = stack.radius_sq_per_color.get(c, 0)
        if r and sqdist(p, z) < r:
            return False
    return True


class _EmptinessChecker:
    """Exact emptiness test with a floating-point prefilter."""

    def __init__(self, chi: ChromaticPointSet):
        self.chi = chi
        arr = np.array([[float(x) for x in p] for p in chi.points])
        self.by_color = {}
        for j in range(chi.sigma_size):
            idx = np.array(chi.color_class(j), dtype=int)
            self.by_color[j] = (idx, arr[idx] if len(idx) else np.zeros((0, chi.dim_d)))

    def __call__(self, stack: Stack, on_sphere: Iterable[int] = ()) -> bool:
        """``on_sphere`` lists points known to lie on their own color's sphere."""
        zf = np.array([float(x) for x in stack.center])
        pts = self.chi.points
        skip = set(on_sphere)
        for j, r in stack.radius_sq_per_color.items():
            if not r:
                continue
            idx, arr = self.by_color[j]
            if not len(idx):
                continue
            d2 = ((arr - zf) ** 2).sum(axis=1)
            rf = float(r)
            margin = 1e-7 * (1.0 + rf + float(zf @ zf))
            if (d2 < rf - margin).any():
                return False
            for i in idx[np.abs(d2 - rf) <= margin]:
                if int(i) in skip:
                    continue
                if sqdist(pts[i], stack.center) < r:
                    return False
        return True


@dataclass(frozen=True, eq=False)
class RadiusFunction:
    """Exact squared radius of the smallest empty stack for every simplex."""

    mosaic: ChromaticDelaunayMosaic
    value_sq: dict[Simplex, Fraction]

    def __getitem__(self, simplex) -> Fraction:
        return self.value_sq[tuple(simplex)]

    def __len__(self) -> int:
        return len(self.value_sq)

    def items(self):
        return self.value_sq.items()

    def values(self) -> list[Fraction]:
        return sorted(set(self.value_sq.values()))

    @property
    def max_value(self) -> Fraction:
        return max(self.value_sq.values())

    def restricted_to(self, simplices: Iterable[Simplex]) -> dict[Simplex, Fraction]:
        return {s: self.value_sq[s] for s in simplices}


def radius_function(mosaic: ChromaticDelaunayMosaic, chi: ChromaticPointSet | None = None) -> RadiusFunction:
    """Smallest-empty-stack radius of every simplex.

    Simplices are processed by decreasing dimension: a simplex whose smallest
    stack is empty gets that stack's radius, and otherwise the minimum over
    its (already processed) immediate cofaces.
    """
    chi = chi if chi is not None else mosaic.point_set
    empty = _EmptinessChecker(chi)
    frame = _integer_frame(chi.points)
    cof = mosaic.cofacets
    value: dict[Simplex, Fraction] = {}
    for layer in reversed(mosaic.simplices):
        for s in layer:
            if len(s) == 1:
                value[s] = Fraction(0)
                continue
            st = smallest_stack_through(chi, s, frame)
            cofaces = cof[s]
            if cofaces:
                low = min(value[c] for c in cofaces)
                if st.stack_radius_sq <= low and empty(st, s):
                    value[s] = st.stack_radius_sq
                else:
                    value[s] = low
            else:
                if not empty(st, s):
                    raise GeometryError(f"maximal simplex {s} has no empty stack")
                value[s] = st.stack_radius_sq
    return RadiusFunction(mosaic, value)


def mono_radius_function(mosaic: ChromaticDelaunayMosaic) -> RadiusFunction:
    """Radius function of a single-color mosaic (smallest empty circumsphere)."""
    if mosaic.point_set.sigma_size != 1:
        raise GeometryError("mono_radius_function expects a single-color mosaic")
    return radius_function(mosaic)


def alpha_complex(rf: RadiusFunction, r_sq) -> ChromaticDelaunayMosaic:
    """Sublevel set ``{value <= r_sq}`` as a complex on the same points."""
    layers = []
    for layer in rf.mosaic.simplices:
        kept = tuple(s for s in layer if rf.value_sq[s] <= r_sq)
        if not kept:
            break
        layers.append(kept)
    return ChromaticDelaunayMosaic(rf.mosaic.point_set, tuple(layers), rf.mosaic.degenerate,
                                   rf.mosaic.origin)


# ---------------------------------------------------------------------------
# generalized discrete Morse structure


class GDMViolation(GeometryError):
    def __init__(self, message: str, simplex: Simplex = ()):
        super().__init__(message)
        self.simplex = simplex


@dataclass(frozen=True)
class Interval:
    lower: Simplex
    upper: Simplex
    value_sq: Fraction

    @property
    def is_singleton(self) -> bool:
        return self.lower == self.upper

    def members(self) -> list[Simplex]:
        extra = [v for v in self.upper if v not in self.lower]
        out = []
        for k in range(len(extra) + 1):
            for add in combinations(extra, k):
                out.append(tuple(sorted(self.lower + add)))
        return out


@dataclass(frozen=True)
class IntervalPartition:
    intervals: tuple[Interval, ...]

    def critical(self) -> dict[Simplex, Fraction]:
        return {iv.lower: iv.value_sq for iv in self.intervals if iv.is_singleton}

    def __len__(self) -> int:
        return len(self.intervals)


def verify_gdm(rf: RadiusFunction) -> IntervalPartition:
    """Partition every level set into maximal intervals ``[P, R]``.

    Lower ends are taken greedily in order of dimension; the interval of
    ``P`` is spanned by the vertices ``v`` with ``P + v`` in the same level
    set.  Raises :class:`GDMViolation` if an interval is incomplete.
    """
    levels: dict[Fraction, set[Simplex]] = {}
    for s, v in rf.value_sq.items():
        levels.setdefault(v, set()).add(s)
    intervals = []
    for val in sorted(levels):
        level = levels[val]
        covered: set[Simplex] = set()
        for P in sorted(level, key=lambda s: (len(s), s)):
            if P in covered:
                continue
            pset = set(P)
            verts = set()
            for Q in level:
                if len(Q) == len(P) + 1 and pset.issubset(Q) and Q not in covered:
                    verts.update(set(Q) - pset)
            R = tuple(sorted(pset | verts))
            iv = Interval(P, R, val)
            for Q in iv.members():
                if Q not in level or Q in covered:
                    raise GDMViolation(
                        f"level set {val} is not a union of intervals: [{P}, {R}] misses {Q}", Q)
            covered.update(iv.members())
            intervals.append(iv)
    return IntervalPartition(tuple(intervals))


def critical_agreement(chi: ChromaticPointSet, rf: RadiusFunction | None = None,
                       seed: int = 0) -> tuple[bool, dict, dict]:
    """Compare critical simplices (with values) of the chromatic and plain radius functions."""
    if rf is None:
        rf = radius_function(build_mosaic(chi, seed=seed), chi)
    mono_chi = chi.uncolored()
    mono = mono_radius_function(build_mosaic(mono_chi, seed=seed))
    a = verify_gdm(rf).critical()
    b = verify_gdm(mono).critical()
    return a == b, a, b


# ---------------------------------------------------------------------------
# independent floating-point oracle


class OracleNonConvergence(RuntimeError):
    pass


def grid_stack_oracle(chi: ChromaticPointSet, nu: Iterable[int], tol: float = 1e-6,
                      max_iter: int = 4000) -> float:
    """Smallest empty-stack radius through ``nu`` by nested grid search.

    Works in floating point on a least-squares parametrization of the
    equidistance flat; emptiness is enforced with a tiny slack.  Returns the
    radius (not squared), ``inf`` if no empty stack was found.
    """
    nu = sorted(set(nu))
    pts = np.array([[float(x) for x in p] for p in chi.points])
    colors = np.array(chi.colors)
    d = pts.shape[1]
    if len(nu) == 1:
        return 0.0
    classes: dict[int, list[int]] = {}
    for v in nu:
        classes.setdefault(chi.colors[v], []).append(v)
    rows, rhs = [], []
    for members in classes.values():
        p0 = pts[members[0]]
        for v in members[1:]:
            rows.append(2 * (pts[v] - p0))
            rhs.append(pts[v] @ pts[v] - p0 @ p0)
    if rows:
        E = np.array(rows)
        e = np.array(rhs)
        z0, *_ = np.linalg.lstsq(E, e, rcond=None)
        _, sv, vt = np.linalg.svd(E)
        rank = int((sv > 1e-12 * max(1.0, sv[0])).sum())
        basis = vt[rank:]
    else:
        z0 = pts[nu[0]].copy()
        basis = np.eye(d)
    reps = {j: pts[m[0]] for j, m in classes.items()}
    others = {j: np.array([i for i in np.nonzero(colors == j)[0] if i not in nu], dtype=int)
              for j in classes}
    scale = float(np.ptp(pts, axis=0).max()) or 1.0
    slack = 1e-13 * scale * scale

    def evaluate(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Objective (squared radius) and emptiness violation at centers ``Z``."""
        val = np.zeros(len(Z))
        viol = np.zeros(len(Z))
        for j, a in reps.items():
            r2 = ((Z - a) ** 2).sum(axis=1)
            val = np.maximum(val, r2)
            idx = others[j]
            if len(idx):
                q = pts[idx]
                d2 = ((Z[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
                viol = np.maximum(viol, (r2[:, None] - d2).max(axis=1))
        return val, viol

    k = basis.shape[0]
    if k == 0:
        val, viol = evaluate(z0[None, :])
        return float(np.sqrt(val[0])) if viol[0] <= slack else float("inf")
    if k > 2:
        raise GeometryError("grid oracle supports flats of dimension at most 2")
    t0 = basis @ (pts[nu[0]] - z0)
    m = 21
    lin = np.linspace(-1.0, 1.0, m)
    stop = tol * 1e-3 * max(1.0, scale)

    def pick(val, viol):
        """Per-row lexicographic minimum: feasible value first, else least violation."""
        feas = viol <= slack
        any_feas = feas.any(axis=1)
        score = np.where(any_feas[:, None], np.where(feas, val, np.inf), viol)
        idx = np.argmin(score, axis=1)
        rows = np.arange(len(idx))
        return idx, any_feas, score[rows, idx]

    def search(func, c, w):
        """Batched 1-D grid refinement of a convex merit around centers ``c``."""
        c = c.astype(float).copy()
        w = w.astype(float).copy()
        best_feas = np.zeros(len(c), dtype=bool)
        best_score = np.full(len(c), np.inf)
        for _ in range(max_iter):
            T = c[:, None] + w[:, None] * lin[None, :]
            val, viol = func(T)
            idx, feas, score = pick(val, viol)
            c = T[np.arange(len(c)), idx]
            best_feas, best_score = feas, score
            at_edge = (idx == 0) | (idx == m - 1)
            w = np.where(at_edge, w, w * 4.0 / (m - 1))
            if (w < stop).all():
                return c, best_feas, best_score
        raise OracleNonConvergence(f"grid oracle did not converge for simplex {nu}")

    width0 = 4.0 * scale
    if k == 1:
        def f1(T):
            Z = z0 + T.reshape(-1, 1) @ basis
            val, viol = evaluate(Z)
            return val.reshape(T.shape), viol.reshape(T.shape)
        _, feas, score = search(f1, np.array([t0[0]]), np.array([width0]))
    else:
        def inner(t1):
            def f2(T):
                B = np.stack([np.repeat(t1, T.shape[1]), T.reshape(-1)], axis=1)
                val, viol = evaluate(z0 + B @ basis)
                return val.reshape(T.shape), viol.reshape(T.shape)
            return search(f2, np.full(len(t1), t0[1]), np.full(len(t1), width0))

        def f_outer(T):
            _, feas, score = inner(T.reshape(-1))
            val = np.where(feas, score, np.inf).reshape(T.shape)
            viol = np.where(feas, 0.0, score).reshape(T.shape)
            return val, viol
        _, feas, score = search(f_outer, np.array([t0[0]]), np.array([width0]))
    return float(np.sqrt(score[0])) if feas[0] else float("inf")
