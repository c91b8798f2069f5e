"""Randomized validation suites shared by the CLI and the test-suite.

Every suite draws its instances from per-trial seeds derived from one root
seed, so a report is reproducible from ``(suite, seed, trials)``.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .delaunay import build_mosaic, oracle_complex
from .geometry import ChromaticPointSet, GeneralPositionError
from .mst import deaths_equal_half_mst, mst
from .persistence import betti_curve, bottleneck, homology_oracle, persistence_diagram
from .radius import (GDMViolation, OracleNonConvergence, critical_agreement, grid_stack_oracle,
                     mono_radius_function, radius_function, verify_gdm)
from .sixpack import LABELS, InclusionSpec, sixpack_of, verify_exactness, verify_norm_relations

SUITES = ("oracle", "gdm", "homotopy", "exactness", "norms", "stability", "mst-link")


def trial_seed(root: int, k: int) -> int:
    return random.Random(f"{root}:{k}").getrandbits(32)


def random_instance(seed: int, n: tuple[int, int], dims=(1, 2), colors=(2, 3),
                    bits: int = 16, general_position: bool = True) -> ChromaticPointSet:
    """Dyadic points in ``[0,1)^d`` with i.i.d. colors, every color used."""
    rng = random.Random(seed)
    d = rng.choice(dims)
    k = rng.choice(colors)
    size = rng.randint(*n)
    size = max(size, k)
    seen: set = set()
    pts = []
    while len(pts) < size:
        p = tuple(Fraction(rng.getrandbits(bits), 1 << bits) for _ in range(d))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    cols = list(range(k)) + [rng.randrange(k) for _ in range(size - k)]
    rng.shuffle(cols)
    return ChromaticPointSet(tuple(pts), tuple(cols), k, general_position=general_position)


def _mosaic(chi: ChromaticPointSet, seed: int):
    """Mosaic of ``chi``; retried on a jittered copy if ``chi`` is degenerate."""
    try:
        return chi, build_mosaic(chi)
    except GeneralPositionError:
        chi = chi.jittered(seed)
        return chi, build_mosaic(chi)


@dataclass
class SuiteResult:
    suite: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)
    max_residual: float = 0.0
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self, timing: bool = True) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"{status} {self.suite}: {self.trials} trials, {len(self.failures)} failures, "
                f"max residual {self.max_residual:.3e}")
        return text + f", {self.seconds:.1f}s" if timing else text


def _run(name: str, seed: int, trials: int, body: Callable[[int, int, SuiteResult], None]) -> SuiteResult:
    res = SuiteResult(name)
    t0 = time.perf_counter()
    for k in range(trials):
        body(k, trial_seed(seed, k), res)
        res.trials += 1
    res.seconds = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# suites


def suite_oracle_mosaic(seed: int = 0, trials: int = 20) -> SuiteResult:
    """Mosaic against the LP emptiness oracle on all vertex subsets (n <= 15)."""
    def body(k, s, res):
        chi, m = _mosaic(random_instance(s, (6, 15)), s)
        orc = oracle_complex(chi)
        if set(m) != orc:
            res.failures.append(f"trial {k}: {len(set(m) ^ orc)} simplices differ")
    return _run("oracle-mosaic", seed, trials, body)


def suite_oracle_radius(seed: int = 0, trials: int = 20, tol: float = 1e-6) -> SuiteResult:
    """Exact radius function against the floating-point grid search."""
    def body(k, s, res):
        chi, m = _mosaic(random_instance(s, (6, 10)), s)
        rf = radius_function(m, chi)
        for simplex, v in rf.items():
            try:
                o = grid_stack_oracle(chi, simplex, tol=tol)
            except OracleNonConvergence as exc:
                res.failures.append(f"trial {k}: oracle did not converge on {simplex}: {exc}")
                continue
            err = abs(o - math.sqrt(v))
            res.max_residual = max(res.max_residual, err)
            if err > tol:
                res.failures.append(f"trial {k}: simplex {simplex} exact {math.sqrt(v)} oracle {o}")
    return _run("oracle-radius", seed, trials, body)


def suite_oracle_reduction(seed: int = 0, trials: int = 20, cap: int = 300) -> SuiteResult:
    """Matrix-reduction diagrams against inclusion-exclusion over rank tables."""
    def body(k, s, res):
        n_hi = 40
        while True:
            chi, m = _mosaic(random_instance(s, (5, n_hi)), s)
            if len(m) <= cap:
                break
            n_hi = max(5, n_hi // 2)
            s += 1
        rf = radius_function(m, chi)
        dgm = persistence_diagram(rf.value_sq)
        orc = homology_oracle(rf, cap=cap).diagram(dgm.C_sq)
        if dgm.nonzero().multiset() != orc.multiset():
            res.failures.append(f"trial {k}: diagrams differ")
    return _run("oracle-reduction", seed, trials, body)


def suite_gdm(seed: int = 0, trials: int = 50) -> SuiteResult:
    """Interval partition exists and critical simplices match the plain mosaic."""
    def body(k, s, res):
        chi, m = _mosaic(random_instance(s, (10, 40)), s)
        rf = radius_function(m, chi)
        try:
            verify_gdm(rf)
            ok, a, b = critical_agreement(chi, rf)
        except GDMViolation as exc:
            res.failures.append(f"trial {k}: {exc}")
            return
        if not ok:
            diff = set(a.items()) ^ set(b.items())
            res.failures.append(f"trial {k}: {len(diff)} critical simplices disagree")
    return _run("gdm", seed, trials, body)


def suite_homotopy(seed: int = 0, trials: int = 50) -> SuiteResult:
    """Betti numbers of chromatic and plain alpha complexes agree at every value."""
    def body(k, s, res):
        chi, m = _mosaic(random_instance(s, (10, 40)), s)
        rf = radius_function(m, chi)
        plain = mono_radius_function(build_mosaic(chi.uncolored()))
        d1 = persistence_diagram(rf.value_sq)
        d2 = persistence_diagram(plain.value_sq)
        levels = sorted(set(rf.value_sq.values()) | set(plain.value_sq.values()))
        for p in range(chi.dim_d + 1):
            for r in levels:
                if betti_curve(d1, r, p) != betti_curve(d2, r, p):
                    res.failures.append(f"trial {k}: beta_{p} differs at r^2 = {r}")
                    return
    return _run("homotopy", seed, trials, body)


def _inclusions(chi: ChromaticPointSet, rng: random.Random) -> list[InclusionSpec]:
    k = chi.sigma_size
    t1 = rng.randrange(1, k)
    return [InclusionSpec("color", color=rng.randrange(k)), InclusionSpec("chromatic", t1=t1, t2=k)]


def suite_exactness(seed: int = 0, trials: int = 30, cap: int = 300) -> SuiteResult:
    """Per-index rank identities of the kernel/image/cokernel sequences."""
    def body(k, s, res):
        rng = random.Random(s)
        n_hi = 25
        while True:
            chi, m = _mosaic(random_instance(s, (5, n_hi)), s)
            if len(m) <= cap:
                break
            n_hi = max(5, n_hi - 5)
            s += 1
        rf = radius_function(m, chi)
        spec = rng.choice(_inclusions(chi, rng))
        K, L = spec.select(m)
        rep = verify_exactness(K, L, rf, cap=cap)
        res.max_residual = max(res.max_residual, rep.max_abs)
        if not rep.ok:
            bad = [key for key, v in rep.residuals.items() if v][:3]
            res.failures.append(f"trial {k} ({spec.describe()}): {bad}")
    return _run("exactness", seed, trials, body)


def suite_norms(seed: int = 0, trials: int = 100, tol: float = 1e-9) -> SuiteResult:
    """Norm relations of the 6-pack, numerically and as signed multisets."""
    def body(k, s, res):
        rng = random.Random(s)
        chi, m = _mosaic(random_instance(s, (8, 60)), s)
        rf = radius_function(m, chi)
        for spec in _inclusions(chi, rng):
            rep = verify_norm_relations(sixpack_of(m, rf, spec))
            res.max_residual = max(res.max_residual, rep.max_residual)
            if rep.max_residual > tol or not all(rep.exact.values()):
                res.failures.append(f"trial {k} ({spec.describe()}): residual {rep.max_residual:.3e}")
    return _run("norms", seed, trials, body)


def perturb(chi: ChromaticPointSet, eps: Fraction, seed: int) -> ChromaticPointSet:
    """Move every point by at most ``eps`` (a dyadic displacement per coordinate)."""
    rng = random.Random(seed)
    d = chi.dim_d
    # per-coordinate bound eps / ceil(sqrt(d)) keeps the Euclidean shift <= eps
    step = Fraction(eps) / math.ceil(math.sqrt(d))
    grid = 1 << 20
    pts = tuple(tuple(x + step * Fraction(rng.randint(-grid, grid), grid) for x in p) for p in chi.points)
    return ChromaticPointSet(pts, chi.colors, chi.sigma_size, general_position=chi.general_position)


def suite_stability(seed: int = 0, trials: int = 50, eps: Fraction = Fraction(1, 100)) -> SuiteResult:
    """Bottleneck distance of all six diagrams under an ``eps``-perturbation."""
    def body(k, s, res):
        rng = random.Random(s)
        chi, m = _mosaic(random_instance(s, (10, 40)), s)
        chi2, m2 = _mosaic(perturb(chi, eps, s + 1), s + 1)
        h = max(math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q))) for p, q in zip(chi.points, chi2.points))
        spec = _inclusions(chi, rng)[0]
        p1 = sixpack_of(m, radius_function(m, chi), spec)
        p2 = sixpack_of(m2, radius_function(m2, chi2), spec)
        for label in LABELS:
            for p in range(chi.dim_d + 1):
                dist = bottleneck(p1[label], p2[label], p)
                res.max_residual = max(res.max_residual, dist)
                if dist > h + 1e-9 or dist > float(eps) + 1e-9:
                    res.failures.append(f"trial {k}: {label} dim {p} bottleneck {dist:.3e} > {h:.3e}")
    return _run("stability", seed, trials, body)


def suite_mst_link(seed: int = 0, trials: int = 100) -> SuiteResult:
    """Finite dim-0 deaths equal half the MST edge lengths (squared, exact)."""
    def body(k, s, res):
        chi, m = _mosaic(random_instance(s, (5, 60)), s)
        rf = radius_function(m, chi)
        dgm = persistence_diagram(rf.value_sq).in_dim(0)
        if not deaths_equal_half_mst(dgm, mst(chi.points)):
            res.failures.append(f"trial {k}: dim-0 deaths differ from MST half-edges")
    return _run("mst-link", seed, trials, body)


def run_suite(name: str, seed: int = 0, trials: int | None = None) -> list[SuiteResult]:
    if name == "oracle":
        kw = {} if trials is None else {"trials": trials}
        return [suite_oracle_mosaic(seed, **kw), suite_oracle_radius(seed, **kw),
                suite_oracle_reduction(seed, **kw)]
    table = {"gdm": suite_gdm, "homotopy": suite_homotopy, "exactness": suite_exactness,
             "norms": suite_norms, "stability": suite_stability, "mst-link": suite_mst_link}
    if name not in table:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = table[name]
    return [fn(seed) if trials is None else fn(seed, trials)]
