"""Kernel, image, cokernel and relative persistence of a filtered inclusion.

For ``L ⊆ K`` with the filtration of ``K`` restricted to ``L``, the six
diagrams are computed from four column reductions:

* ``D_f`` (codomain) and ``D_g`` (domain) as usual;
* ``D_im``: the matrix of ``K`` with rows of ``L`` moved first.  A reduced
  column whose lowest entry lies in ``L`` is an ``L``-cycle that bounds in
  ``K``; these columns give the image pairs and a filtered basis of
  ``Z(L_i) ∩ B(K_i)``;
* kernel and cokernel are quotients of filtered spaces, reduced in the
  coordinates of a filtered basis (elder rule on the youngest generator).

An independent oracle builds every persistent rank from explicit cycle and
boundary spaces and recovers multiplicities by inclusion-exclusion.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .delaunay import ChromaticDelaunayMosaic, Simplex
from .persistence import (ChainSpaces, DiagramPoint, FiltrationError,
                          PersistenceDiagram, PersistentBettiTable, _check_C,
                          default_C_sq, filtration_order, gf2_intersection,
                          persistent_rank_table, reduce_columns, table_to_diagram)

LABELS = ("kernel", "relative", "cokernel", "domain", "image", "codomain")


# ---------------------------------------------------------------------------
# subcomplex selection


def t_chromatic(mosaic: ChromaticDelaunayMosaic, t: int) -> set[Simplex]:
    """Simplices whose vertices carry at most ``t`` distinct colors."""
    s1 = mosaic.point_set.sigma_size
    if not 1 <= t <= s1:
        raise ValueError(f"t must lie in 1..{s1}, got {t}")
    colors = mosaic.point_set.colors
    return {s for s in mosaic if len({colors[v] for v in s}) <= t}


def color_subcomplex(mosaic: ChromaticDelaunayMosaic, colors_in: Iterable[int]) -> set[Simplex]:
    """Simplices all of whose vertices have a color in ``colors_in``."""
    keep = set(colors_in)
    colors = mosaic.point_set.colors
    return {s for s in mosaic if all(colors[v] in keep for v in s)}


@dataclass(frozen=True)
class InclusionSpec:
    """Which ``L ⊆ K`` to use.

    ``mode`` is ``"color"`` (``L`` = simplices of color ``j``, ``K`` = all),
    ``"chromatic"`` (``L`` = ``t1``-chromatic, ``K`` = ``t2``-chromatic),
    ``"identity"`` (``L = K``) or ``"explicit"`` (``L`` given).
    """

    mode: str
    color: int | None = None
    t1: int | None = None
    t2: int | None = None
    explicit: frozenset | None = None

    def describe(self) -> str:
        if self.mode == "color":
            return f"color {self.color} into full"
        if self.mode == "chromatic":
            return f"{self.t1}-chromatic into {self.t2}-chromatic"
        return self.mode

    def select(self, mosaic: ChromaticDelaunayMosaic) -> tuple[set[Simplex], set[Simplex]]:
        """Return ``(K, L)``."""
        full = set(mosaic)
        if self.mode == "color":
            return full, color_subcomplex(mosaic, [self.color])
        if self.mode == "chromatic":
            if not (self.t1 is not None and self.t2 is not None and self.t1 < self.t2):
                raise ValueError("chromatic inclusion needs t1 < t2")
            return t_chromatic(mosaic, self.t2), t_chromatic(mosaic, self.t1)
        if self.mode == "identity":
            return full, set(full)
        if self.mode == "explicit":
            return full, set(self.explicit or ())
        raise ValueError(f"unknown inclusion mode {self.mode!r}")


def check_subcomplex(K: set[Simplex], L: set[Simplex]) -> None:
    for s in L:
        if s not in K:
            raise FiltrationError(f"{s} is in L but not in K")
        if len(s) > 1:
            for k in range(len(s)):
                if s[:k] + s[k + 1:] not in L:
                    raise FiltrationError(f"L is not closed under faces at {s}")


# ---------------------------------------------------------------------------
# the 6-pack


@dataclass(frozen=True)
class SixPack:
    kernel: PersistenceDiagram
    relative: PersistenceDiagram
    cokernel: PersistenceDiagram
    domain: PersistenceDiagram
    image: PersistenceDiagram
    codomain: PersistenceDiagram
    C_sq: Fraction
    inclusion: str = ""

    def __getitem__(self, label: str) -> PersistenceDiagram:
        if label not in LABELS:
            raise KeyError(label)
        return getattr(self, label)

    def items(self):
        return [(label, self[label]) for label in LABELS]

    def nonzero(self) -> "SixPack":
        return SixPack(*(self[l].nonzero() for l in LABELS), self.C_sq, self.inclusion)

    def same_as(self, other: "SixPack") -> dict[str, bool]:
        return {l: self[l].nonzero().multiset() == other[l].nonzero().multiset() for l in LABELS}


def _values_of(rf) -> Mapping[Simplex, Fraction]:
    return rf.value_sq if hasattr(rf, "value_sq") else rf


def _bits(xs: Iterable[int]) -> int:
    v = 0
    for x in xs:
        v ^= 1 << x
    return v


def _iter_bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def _quotient_pairs(num_rows: int, relations: Sequence[tuple[int, int]]) -> tuple[list[tuple[int, int]], list[int]]:
    """Persistence of a filtered quotient.

    Rows ``0..num_rows-1`` are basis vectors ordered by entry time;
    ``relations`` lists ``(time, coordinate bit set)`` in time order.  Each
    surviving relation kills its youngest row.  Returns ``(row, relation)``
    pairs and the unkilled rows.
    """
    pivot: dict[int, int] = {}
    reduced: list[int] = []
    pairs = []
    for r, (_, vec) in enumerate(relations):
        while vec:
            low = vec.bit_length() - 1
            k = pivot.get(low)
            if k is None:
                pivot[low] = r
                pairs.append((low, r))
                break
            vec ^= reduced[k]
        reduced.append(vec)
    killed = set(pivot)
    return pairs, [k for k in range(num_rows) if k not in killed]


def sixpack(K: Iterable[Simplex], L: Iterable[Simplex], rf, C_sq=None, inclusion: str = "") -> SixPack:
    """Fast-path 6-pack of the inclusion ``L ⊆ K`` filtered by ``rf``."""
    values = dict(_values_of(rf))
    K = set(K)
    L = set(L)
    check_subcomplex(K, L)
    fK = {s: values[s] for s in K}
    order = filtration_order(fK)
    simp, vals = order.simplices, order.values
    n = len(simp)
    idx = order.index
    dims = [len(s) - 1 for s in simp]
    inL = [s in L for s in simp]
    if C_sq is None:
        C_sq = default_C_sq(vals)
    C_sq = Fraction(C_sq)

    faces = [[idx[s[:k] + s[k + 1:]] for k in range(len(s))] if len(s) > 1 else [] for s in simp]

    # codomain: reduction of K, keeping V for the cycle basis
    D = [_bits(f) for f in faces]
    Rf = list(D)
    Vf = [1 << j for j in range(n)]
    piv_f: dict[int, int] = {}
    for j in range(n):
        c, v = Rf[j], Vf[j]
        while c:
            low = c.bit_length() - 1
            k = piv_f.get(low)
            if k is None:
                piv_f[low] = j
                break
            c ^= Rf[k]
            v ^= Vf[k]
        Rf[j], Vf[j] = c, v
    pos_K = [Rf[j] == 0 for j in range(n)]

    # domain: reduction of L in the induced order, keeping V
    Lidx = [j for j in range(n) if inL[j]]
    lpos = {j: k for k, j in enumerate(Lidx)}
    Dg = [_bits(lpos[f] for f in faces[j]) for j in Lidx]
    Rg = list(Dg)
    Vg = [1 << k for k in range(len(Lidx))]
    piv_g: dict[int, int] = {}
    for k in range(len(Lidx)):
        c, v = Rg[k], Vg[k]
        while c:
            low = c.bit_length() - 1
            q = piv_g.get(low)
            if q is None:
                piv_g[low] = k
                break
            c ^= Rg[q]
            v ^= Vg[q]
        Rg[k], Vg[k] = c, v
    pos_L = {Lidx[k]: Rg[k] == 0 for k in range(len(Lidx))}

    # image: rows re-ordered with L first
    row_order = Lidx + [j for j in range(n) if not inL[j]]
    rpos = {j: r for r, j in enumerate(row_order)}
    nL = len(Lidx)
    Dim = [_bits(rpos[f] for f in faces[j]) for j in range(n)]
    Rim, piv_im = reduce_columns(Dim)

    def pt(p, b, d, ess=False):
        return DiagramPoint(p, vals[b], vals[d] if not ess else C_sq, ess)

    def keep(b, d):  # drop same-index pairs, they never exist at any index
        return b != d

    codomain = [pt(dims[b], b, d) for b, d in ((low, j) for low, j in piv_f.items())]
    paired_f = set(piv_f)
    codomain += [pt(dims[j], j, j, True) for j in range(n) if pos_K[j] and j not in paired_f]

    domain = [pt(dims[Lidx[b]], Lidx[b], Lidx[d]) for b, d in piv_g.items()]
    paired_g = set(piv_g)
    domain += [pt(dims[Lidx[k]], Lidx[k], Lidx[k], True) for k in range(nL)
               if Rg[k] == 0 and k not in paired_g]

    # image pairs: lowest (row-order) entry in L
    image = []
    img_born = set()
    for low, j in piv_im.items():
        if low < nL:
            b = row_order[low]
            image.append(pt(dims[b], b, j))
            img_born.add(b)
    image += [pt(dims[j], j, j, True) for j in Lidx if pos_L[j] and j not in img_born]

    # kernel: W = span of image-reduced columns lying in L, entering at their column
    w_cols = sorted(j for low, j in piv_im.items() if low < nL)
    # coordinates follow entry time (column index), not pivot order
    entry_rank = {j: r for r, j in enumerate(w_cols)}
    col_of_low = {low: j for low, j in piv_im.items() if low < nL}

    def w_coords(vec_rows: int) -> int:
        out = 0
        while vec_rows:
            low = vec_rows.bit_length() - 1
            j = col_of_low[low]
            vec_rows ^= Rim[j]
            out ^= 1 << entry_rank[j]
        return out

    relations = []
    for j in Lidx:
        if dims[j] == 0:
            continue
        relations.append((j, w_coords(Dim[j])))
    kpairs, kfree = _quotient_pairs(len(w_cols), relations)
    kernel = []
    for row, r in kpairs:
        b, d = w_cols[row], relations[r][0]
        if keep(b, d):
            kernel.append(pt(dims[b] - 1, b, d))
    kernel += [pt(dims[w_cols[row]] - 1, w_cols[row], w_cols[row], True) for row in kfree]

    # cokernel: Z(K) with basis c_s (positive s) modulo Z(L) + B(K)
    cpos = [j for j in range(n) if pos_K[j]]
    crank = {j: r for r, j in enumerate(cpos)}
    cyc = {j: Vf[j] for j in cpos}

    def c_coords(z: int) -> int:
        out = 0
        while z:
            top = z.bit_length() - 1
            z ^= cyc[top]
            out ^= 1 << crank[top]
        return out

    rels = []
    for j in range(n):
        if inL[j] and pos_L[j]:
            k = lpos[j]
            zl = 0
            for q in _iter_bits(Vg[k]):
                zl ^= 1 << Lidx[q]
            rels.append((j, c_coords(zl)))
        elif not pos_K[j]:
            rels.append((j, c_coords(Rf[j])))
    cpairs, cfree = _quotient_pairs(len(cpos), rels)
    cokernel = []
    for row, r in cpairs:
        b, d = cpos[row], rels[r][0]
        if keep(b, d):
            cokernel.append(pt(dims[b], b, d))
    cokernel += [pt(dims[cpos[row]], cpos[row], cpos[row], True) for row in cfree]

    # relative: purge L rows and columns
    rel_idx = [j for j in range(n) if not inL[j]]
    rp = {j: k for k, j in enumerate(rel_idx)}
    Drel = [_bits(rp[f] for f in faces[j] if not inL[f]) for j in rel_idx]
    Rrel, piv_rel = reduce_columns(Drel)
    relative = [pt(dims[rel_idx[b]], rel_idx[b], rel_idx[d]) for b, d in piv_rel.items()]
    paired_rel = set(piv_rel)
    relative += [pt(dims[rel_idx[k]], rel_idx[k], rel_idx[k], True) for k in range(len(rel_idx))
                 if Rrel[k] == 0 and k not in paired_rel]

    essential_births = [x.birth_sq for group in (codomain, domain, image, kernel, cokernel, relative)
                        for x in group if x.essential]
    _check_C(C_sq, essential_births)
    diagrams = [PersistenceDiagram(tuple(g), C_sq) for g in (kernel, relative, cokernel, domain, image, codomain)]
    return SixPack(*diagrams, C_sq, inclusion)


def sixpack_of(mosaic: ChromaticDelaunayMosaic, rf, spec: InclusionSpec, C_sq=None) -> SixPack:
    K, L = spec.select(mosaic)
    return sixpack(K, L, rf, C_sq, spec.describe())


# ---------------------------------------------------------------------------
# explicit oracle


ORACLE_CAP = 300


@dataclass(frozen=True)
class SixPackTables:
    """Persistent rank tables of the six functors over common levels."""

    levels: tuple[Fraction, ...]
    tables: dict[str, PersistentBettiTable]

    def rank(self, label: str, p: int, i: int) -> int:
        t = self.tables[label]
        if p not in t.beta:
            return 0
        return int(t.beta[p][i, i])


def sixpack_tables(K: Iterable[Simplex], L: Iterable[Simplex], rf, cap: int = ORACLE_CAP) -> SixPackTables:
    values = dict(_values_of(rf))
    K = set(K)
    L = set(L)
    check_subcomplex(K, L)
    if len(K) > cap:
        raise FiltrationError(f"oracle limited to {cap} simplices, got {len(K)}")
    fK = {s: values[s] for s in K}
    levels = sorted(set(fK.values()))
    nlev = len(levels)
    sp = ChainSpaces.build(fK, levels)
    top = max(sp.coords)
    dims = range(top + 1)
    nbits = {p: len(sp.coords.get(p, {})) for p in range(top + 2)}

    def ZL(p, i):
        return sp.cycles(p, i, L)

    def ZK(p, i):
        return sp.cycles(p, i)

    def BK(p, j):
        return sp.boundaries(p, j)

    def tagged(fn, p):
        """``(level, vector)`` pairs whose prefix spans equal ``fn(p, j)``."""
        out = []
        for j in range(nlev):
            out += [(j, v) for v in fn(p, j)]
        return out

    def B_grow(p, members=None):
        return [(sp.level[s], sp.boundary(s)) for s in sp.simplices_of(p + 1, nlev, members)]

    def C_grow(p, members):
        return [(sp.level[s], 1 << sp.coords[p][s]) for s in sp.simplices_of(p, nlev, members)]

    tables = {
        "codomain": persistent_rank_table(levels, ZK, lambda p: B_grow(p), dims),
        "domain": persistent_rank_table(levels, ZL, lambda p: B_grow(p, L), dims),
        "image": persistent_rank_table(levels, ZL, lambda p: B_grow(p), dims),
        "kernel": persistent_rank_table(
            levels, lambda p, i: gf2_intersection(ZL(p, i), BK(p, i), nbits[p]),
            lambda p: B_grow(p, L), dims),
        "cokernel": persistent_rank_table(
            levels, ZK, lambda p: B_grow(p) + tagged(ZL, p), dims),
        "relative": persistent_rank_table(
            levels, lambda p, i: sp.relative_cycles(p, i, L),
            lambda p: B_grow(p) + C_grow(p, L), dims),
    }
    return SixPackTables(tuple(levels), tables)


def sixpack_oracle(K, L, rf, C_sq=None, inclusion: str = "", cap: int = ORACLE_CAP) -> SixPack:
    """6-pack from explicit rank tables (positive-persistence points only)."""
    T = sixpack_tables(K, L, rf, cap)
    if C_sq is None:
        C_sq = default_C_sq(T.levels)
    diagrams = [table_to_diagram(T.tables[l], C_sq) for l in LABELS]
    return SixPack(*diagrams, Fraction(C_sq), inclusion)


def compare_with_oracle(pack: SixPack, oracle: SixPack) -> dict[str, bool]:
    return pack.same_as(oracle)


# ---------------------------------------------------------------------------
# exactness and norm relations


@dataclass(frozen=True)
class ExactnessReport:
    """Residuals of the three rank identities per level and dimension."""

    residuals: dict[tuple[str, int, int], int]  # (identity, p, level) -> residual

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.residuals.values())

    @property
    def max_abs(self) -> int:
        return max((abs(v) for v in self.residuals.values()), default=0)


def _rank_at(dgm: PersistenceDiagram, p: int, r_sq) -> int:
    return sum(1 for x in dgm.points if x.p == p and x.birth_sq <= r_sq
               and (x.essential or r_sq < x.death_sq))


def verify_exactness(K, L, rf, pack: SixPack | None = None, cap: int = ORACLE_CAP) -> ExactnessReport:
    """Check ``ker + im = H(L)``, ``im + cok = H(K)`` and ``cok_p + ker_{p-1} = H_p(K, L)``
    at every level, from the oracle's rank tables and (if given, else computed)
    from the fast-path diagrams."""
    T = sixpack_tables(K, L, rf, cap)
    if pack is None:
        pack = sixpack(K, L, rf)
    top = max(T.tables["codomain"].beta)
    res = {}
    for i, lev in enumerate(T.levels):
        for p in range(top + 2):
            def rk(label, q):
                return T.rank(label, q, i) if q >= 0 else 0

            res[("ker+im=dom", p, i)] = rk("kernel", p) + rk("image", p) - rk("domain", p)
            res[("im+cok=cod", p, i)] = rk("image", p) + rk("cokernel", p) - rk("codomain", p)
            res[("cok+ker=rel", p, i)] = rk("cokernel", p) + rk("kernel", p - 1) - rk("relative", p)

            def fr(label, q):
                return _rank_at(pack[label], q, lev) if q >= 0 else 0

            res[("fast ker+im=dom", p, i)] = fr("kernel", p) + fr("image", p) - fr("domain", p)
            res[("fast im+cok=cod", p, i)] = fr("image", p) + fr("cokernel", p) - fr("codomain", p)
            res[("fast cok+ker=rel", p, i)] = fr("cokernel", p) + fr("kernel", p - 1) - fr("relative", p)
            for label in LABELS:
                res[(f"fast-vs-oracle {label}", p, i)] = fr(label, p) - rk(label, p)
    return ExactnessReport(res)


def norm1(dgm: PersistenceDiagram, p: int | None = None) -> float:
    """Sum of ``death - birth`` in radius units (essential classes closed at ``C``)."""
    return math.fsum(math.sqrt(x.death_sq) - math.sqrt(x.birth_sq)
                     for x in dgm.points if p is None or x.p == p)


def norm1_exact(dgm: PersistenceDiagram, p: int | None = None) -> Counter:
    """Signed multiset of values: ``+1`` per death, ``-1`` per birth (zeros dropped)."""
    c: Counter = Counter()
    for x in dgm.points:
        if p is None or x.p == p:
            c[x.death_sq] += 1
            c[x.birth_sq] -= 1
    return Counter({k: v for k, v in c.items() if v})


def _signed_sum(*cs: Counter) -> Counter:
    out: Counter = Counter()
    for c in cs:
        for k, v in c.items():
            out[k] += v
    return Counter({k: v for k, v in out.items() if v})


@dataclass(frozen=True)
class NormReport:
    residuals: dict[tuple[str, int], float]
    exact: dict[tuple[str, int], bool]

    @property
    def max_residual(self) -> float:
        return max((abs(v) for v in self.residuals.values()), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_residual <= 1e-9 and all(self.exact.values())


def verify_norm_relations(pack: SixPack) -> NormReport:
    dims = set()
    for _, d in pack.items():
        dims.update(d.dims)
    top = max(dims, default=0)
    res, ex = {}, {}
    for p in range(top + 1):
        dom, ker, im = norm1(pack.domain, p), norm1(pack.kernel, p), norm1(pack.image, p)
        cod, cok, rel = norm1(pack.codomain, p), norm1(pack.cokernel, p), norm1(pack.relative, p)
        kprev = norm1(pack.kernel, p - 1) if p else 0.0
        res[("dom=ker+im", p)] = dom - ker - im
        res[("cod=im+cok", p)] = cod - im - cok
        res[("rel=cok+ker", p)] = rel - cok - kprev
        E = {l: norm1_exact(pack[l], p) for l in LABELS}
        kprev_e = norm1_exact(pack.kernel, p - 1) if p else Counter()
        ex[("dom=ker+im", p)] = E["domain"] == _signed_sum(E["kernel"], E["image"])
        ex[("cod=im+cok", p)] = E["codomain"] == _signed_sum(E["image"], E["cokernel"])
        ex[("rel=cok+ker", p)] = E["relative"] == _signed_sum(E["cokernel"], kprev_e)
    return NormReport(res, ex)
