"""Checkers and measurement harnesses for the orbit and expansion results.

The centrepiece is :func:`detect_subfield_iterate`: given many orbit hits in a
subfield, find a gap ``k`` that occurs more than ``deg(f)^k`` times and certify
that ``f^(k)`` has all coefficients in the subfield.  :func:`verify_thm_subfield`
runs it exhaustively wherever the hit-frequency hypothesis is met.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .elemset import ElemSet
from .errors import InputError, InvariantViolation, WorkCapExceeded
from .exponents import exponents_for, freq_threshold, meets_threshold, min_hits
from .fpoly import (
    DEFAULT_DEGREE_CAP,
    OrbitSummary,
    Poly,
    eval_table,
    format_poly,
    image_set,
    orbit,
    poly_eval_many,
    poly_iterate_symbolic,
    poly_over_subfield,
)
from .gf_tower import FieldCtx, encode, subfield_mask
from .klinalg import (
    AffineSubspace,
    ConditionReport,
    affine_hull,
    enumerate_affine,
    linear_part,
    subfield_condition_check,
)
from .setcalc import diffset, ratio_set, signed_sumset

# --------------------------------------------------------------------------
# subfield hits along an orbit


@dataclass(frozen=True)
class GapHistogram:
    hits: tuple[int, ...]
    counts: dict[int, int]
    N: int

    @classmethod
    def from_hits(cls, hits, N: int) -> "GapHistogram":
        hits = tuple(int(h) for h in hits)
        counts = dict(sorted(Counter(b - a for a, b in zip(hits, hits[1:])).items()))
        hist = cls(hits, counts, N)
        hist.check()
        return hist

    @property
    def M(self) -> int:
        return len(self.hits)

    def A(self, h: int) -> int:
        return self.counts.get(h, 0)

    def check(self) -> None:
        M = self.M
        total = sum(self.counts.values())
        span = sum(h * a for h, a in self.counts.items())
        if total != max(M - 1, 0):
            raise InvariantViolation(f"gap counts sum to {total}, expected {M - 1}")
        if M and span != self.hits[-1] - self.hits[0]:
            raise InvariantViolation("weighted gap sum differs from the hit span")
        if span > self.N:
            raise InvariantViolation("hit span exceeds N")


@dataclass(frozen=True)
class DetectionResult:
    hits_count: int
    N: int
    orbit_size: int
    threshold: float
    threshold_met: bool
    found_k: int | None
    verification_method: str | None
    histogram: GapHistogram
    rejected: tuple[int, ...] = ()

    @property
    def within_orbit(self) -> bool:
        """Whether ``N <= T_u``, the range where the hit theorem applies."""
        return self.N <= self.orbit_size


class IterateCertifier:
    """Caches whether ``f^(k)`` is defined over ``F_{p^d_sub}``."""

    def __init__(self, ctx: FieldCtx, d_sub: int, degree_cap: int = DEFAULT_DEGREE_CAP):
        self.ctx = ctx
        self.d_sub = d_sub
        self.degree_cap = degree_cap
        self.sub = np.flatnonzero(subfield_mask(ctx, d_sub))
        self._cache: dict[tuple[Poly, int], tuple[bool, str | None]] = {}

    def __call__(self, f: Poly, k: int) -> tuple[bool, str | None]:
        key = (f, k)
        if key not in self._cache:
            self._cache[key] = self._certify(f, k)
        return self._cache[key]

    def symbolic(self, f: Poly, k: int) -> bool:
        g = poly_iterate_symbolic(self.ctx, f, k, self.degree_cap)
        return poly_over_subfield(self.ctx, g, self.d_sub)

    def _certify(self, f: Poly, k: int) -> tuple[bool, str | None]:
        d = f.degree
        deg_k = d**k
        if deg_k <= self.degree_cap:
            return self.symbolic(f, k), "symbolic"
        if len(self.sub) <= deg_k:
            # too few subfield points to pin down a polynomial of degree d^k
            return False, None
        pts = self.sub[: deg_k + 1]
        vals = pts
        for _ in range(k):
            vals = poly_eval_many(self.ctx, f, vals)
        mask = subfield_mask(self.ctx, self.d_sub)
        return bool(mask[vals].all()), "evaluation"


def _check_dsub(ctx: FieldCtx, d_sub: int) -> None:
    if d_sub < 1 or ctx.degree % d_sub:
        raise InputError(f"{d_sub} does not divide {ctx.degree}")
    if d_sub == ctx.degree and d_sub != ctx.m:
        raise InputError("the target subfield must be proper")


def detect_subfield_iterate(ctx: FieldCtx, f: Poly, u: int, d_sub: int, N: int,
                            degree_cap: int = DEFAULT_DEGREE_CAP, *,
                            table: np.ndarray | None = None,
                            orb: OrbitSummary | None = None,
                            certifier: IterateCertifier | None = None) -> DetectionResult:
    """Look for an iterate of ``f`` defined over ``F_{p^d_sub}`` from the hits of ``u``.

    Hits are collected over ``0 <= n < N``; past the orbit size the sequence is
    continued periodically.  Candidate gaps are tried by decreasing ``A(k)``,
    smaller ``k`` first on ties, and only when ``A(k) > deg(f)^k``.
    """
    if N < 2:
        raise InputError("N must be at least 2")
    _check_dsub(ctx, d_sub)
    d = f.degree
    if d < 1:
        raise InputError("f must have degree at least 1")
    if orb is None:
        orb = orbit(ctx, f, u, table)
    mask = subfield_mask(ctx, d_sub)
    hits = np.flatnonzero(mask[orb.sequence(N)])
    hist = GapHistogram.from_hits(hits, N)
    M = hist.M
    cert = certifier or IterateCertifier(ctx, d_sub, degree_cap)
    candidates = sorted((k for k, a in hist.counts.items() if a > d**k),
                        key=lambda k: (-hist.counts[k], k))
    found, method, rejected = None, None, []
    for k in candidates:
        ok, how = cert(f, k)
        if ok:
            found, method = k, how
            break
        rejected.append(k)
    return DetectionResult(
        hits_count=M,
        N=N,
        orbit_size=orb.orbit_size,
        threshold=freq_threshold(d, N),
        threshold_met=meets_threshold(M, d, N),
        found_k=found,
        verification_method=method,
        histogram=hist,
        rejected=tuple(rejected),
    )


# exhaustive verification -------------------------------------------------


@dataclass
class CounterexampleReport:
    field_spec: str
    degree: int
    d_sub: int
    leading: str
    n_polys: int = 0
    n_starts: int = 0
    n_instances: int = 0
    n_vacuous: int = 0
    n_met: int = 0
    n_certified: int = 0
    n_histograms_checked: int = 0
    certified_k: Counter = field(default_factory=Counter)
    counterexamples: list[tuple[str, str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "field": self.field_spec,
            "degree": self.degree,
            "d_sub": self.d_sub,
            "leading": self.leading,
            "polys": self.n_polys,
            "starts": self.n_starts,
            "instances": self.n_instances,
            "vacuous": self.n_vacuous,
            "threshold_met": self.n_met,
            "certified": self.n_certified,
            "histograms_checked": self.n_histograms_checked,
            "certified_k": {str(k): v for k, v in sorted(self.certified_k.items())},
            "counterexamples": len(self.counterexamples),
            "counterexample_list": [list(c) for c in self.counterexamples],
        }


def _coefficient_rows(ctx: FieldCtx, degree: int, coeff_set, leading: str) -> np.ndarray:
    coeffs = list(range(ctx.order)) if coeff_set is None else sorted(set(int(c) for c in coeff_set))
    if leading == "monic":
        lead = [1]
    elif leading == "all":
        lead = [c for c in coeffs if c]
    else:
        raise InputError(f"leading must be 'monic' or 'all', got {leading!r}")
    rows = [low + (lc,) for lc in lead for low in product(coeffs, repeat=degree)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), degree + 1)


def _tables(ctx: FieldCtx, rows: np.ndarray) -> np.ndarray:
    xs = ctx.elements()[None, :]
    acc = np.zeros((len(rows), ctx.order), dtype=np.int64)
    for j in range(rows.shape[1] - 1, -1, -1):
        acc = ctx.vadd(ctx.vmul(acc, xs), rows[:, j : j + 1])
    return acc


def orbit_profiles(tables: np.ndarray, starts: np.ndarray, mask: np.ndarray):
    """Vectorized orbit sizes and cumulative subfield-hit counts.

    Returns ``T`` of shape ``(P, U)`` and ``cum`` of shape ``(P, U, n)`` with
    ``cum[..., j]`` the number of hits among ``f^(0)(u), ..., f^(j)(u)``.
    """
    P, n = tables.shape
    U = len(starts)
    flat_tables = tables.ravel()
    poly_off = (np.arange(P, dtype=np.int64) * n)[:, None]
    visit_off = (np.arange(P * U, dtype=np.int64) * n).reshape(P, U)
    visited = np.zeros(P * U * n, dtype=bool)
    T = np.full((P, U), n, dtype=np.int64)
    alive = np.ones((P, U), dtype=bool)
    hit = np.zeros((P, U, n), dtype=np.int32)
    x = np.broadcast_to(starts[None, :], (P, U)).astype(np.int64)
    for j in range(n):
        slot = visit_off + x
        seen = visited[slot]
        stop = seen & alive
        T[stop] = j
        alive &= ~seen
        if not alive.any():
            break
        visited[slot] = True
        hit[:, :, j] = mask[x] & alive
        x = flat_tables[poly_off + x]
    return T, np.cumsum(hit, axis=2)


def verify_thm_subfield(ctx: FieldCtx, degree: int, *, coeff_set=None, leading: str = "monic",
                        starts=None, d_sub: int | None = None,
                        degree_cap: int = DEFAULT_DEGREE_CAP,
                        work_cap: int = 1 << 34, chunk_cells: int = 1 << 24) -> CounterexampleReport:
    """Search all ``(f, u, N)`` with ``2 <= N <= T_u`` for a counterexample.

    Every instance whose hit count meets the frequency threshold is handed to
    :func:`detect_subfield_iterate`, which must certify some ``k``.
    """
    if degree < 1:
        raise InputError("degree must be at least 1")
    d_sub = ctx.m if d_sub is None else d_sub
    _check_dsub(ctx, d_sub)
    rows = _coefficient_rows(ctx, degree, coeff_set, leading)
    starts = ctx.elements() if starts is None else np.asarray(sorted(set(starts)), dtype=np.int64)
    n = ctx.order
    if len(rows) * len(starts) * n > work_cap:
        raise WorkCapExceeded(f"search of {len(rows)} x {len(starts)} orbits exceeds the cap")
    mask = np.asarray(subfield_mask(ctx, d_sub))
    need = np.array([0, 0] + [min_hits(degree, N) for N in range(2, n + 1)], dtype=np.int64)
    Ns = np.arange(n + 1)
    vacuous_N = need > Ns
    vacuous_N[:2] = False

    report = CounterexampleReport(ctx.spec, degree, d_sub, leading,
                                  n_polys=len(rows), n_starts=len(starts))
    certifier = IterateCertifier(ctx, d_sub, degree_cap)
    step = max(1, chunk_cells // (len(starts) * n))
    for lo in range(0, len(rows), step):
        block = rows[lo : lo + step]
        tables = _tables(ctx, block)
        T, cum = orbit_profiles(tables, starts, mask)
        report.n_instances += int(np.clip(T - 1, 0, None).sum())
        # instances with N <= T_u for which the threshold exceeds N
        vac_cum = np.cumsum(vacuous_N)
        report.n_vacuous += int(vac_cum[T].sum())
        counts = cum[:, :, 1:]  # counts[..., N-2] = hits among the first N terms
        met = (counts >= need[None, None, 2:]) & (Ns[None, None, 2:] <= T[:, :, None])
        for pi, ui, Ni in zip(*np.nonzero(met)):
            N = int(Ni) + 2
            f = Poly(tuple(int(c) for c in block[pi]))
            u = int(starts[ui])
            res = detect_subfield_iterate(ctx, f, u, d_sub, N, degree_cap,
                                          table=tables[pi], certifier=certifier)
            report.n_met += 1
            report.n_histograms_checked += 1
            if not res.threshold_met or res.hits_count != int(cum[pi, ui, N - 1]):
                raise InvariantViolation("vectorized hit count disagrees with the detector")
            if res.found_k is None:
                report.counterexamples.append((format_poly(ctx, f), encode(ctx, u), N))
            else:
                report.n_certified += 1
                report.certified_k[res.found_k] += 1
    return report


# expansion experiments ---------------------------------------------------


def _require_char(ctx: FieldCtx, f: Poly) -> int:
    d = f.degree
    if not ctx.p > d >= 2:
        raise InputError(f"need p > deg f >= 2, got p={ctx.p}, deg f={d}")
    return d


@dataclass(frozen=True)
class ExpansionReport:
    M: int
    gamma_M: int
    xi_M: int
    measured_exponent: float | None
    no_growth: bool
    condition: ConditionReport


def expansion_experiment(ctx: FieldCtx, A: ElemSet, f: Poly) -> ExpansionReport:
    """Measure ``max(#(4A - 4A), #(f(A) - f(A)))`` against ``#A``."""
    d = _require_char(ctx, f)
    M = A.card
    if M < 1:
        raise InputError("expansion needs a nonempty set")
    eight = signed_sumset(ctx, A, 4, 4)
    fA = image_set(ctx, f, A)
    xi = diffset(ctx, fA, fA)
    big = max(eight.card, xi.card)
    if M >= 2:
        exponent = 1.0 if big == M else math.log(big) / math.log(M)
    else:
        exponent = None
    condition = subfield_condition_check(ctx, diffset(ctx, A, A), exponents_for(d).theta,
                                         mode="set", size=M)
    return ExpansionReport(M, eight.card, xi.card, exponent, big == M, condition)


@dataclass(frozen=True)
class PolyDimReport:
    s: int
    dim_fA: int
    ratio: Fraction | None
    degenerate: bool
    hypotheses_hold: bool
    condition: ConditionReport


def polydim_experiment(ctx: FieldCtx, A: AffineSubspace, f: Poly, *,
                       strict: bool = True) -> PolyDimReport:
    """``dim f(A)`` for an affine subspace ``A``; ratio undefined when ``dim A = 0``.

    ``strict=False`` admits any nonconstant ``f`` (e.g. additive maps in
    characteristic 2) and only records whether ``p > deg f >= 2``.
    """
    d = f.degree
    hyp = ctx.p > d >= 2
    if strict and not hyp:
        raise InputError(f"need p > deg f >= 2, got p={ctx.p}, deg f={d}")
    if d < 1:
        raise InputError("f must be nonconstant")
    pts = enumerate_affine(ctx, A)
    dim_fA = affine_hull(ctx, image_set(ctx, f, pts)).dim
    s = A.dim
    ratio = Fraction(dim_fA, s) if s else None
    condition = subfield_condition_check(ctx, linear_part(ctx, A), exponents_for(max(d, 2)).theta,
                                         "subspace")
    return PolyDimReport(s, dim_fA, ratio, s == 0, hyp, condition)


@dataclass(frozen=True)
class IntersectionReport:
    card_intersection: int
    s: int
    bound_exponent: Fraction
    log_ratio: float | None
    preimage: ElemSet
    inclusions_hold: bool
    hypotheses_hold: bool
    condition: ConditionReport


def preimage_set(ctx: FieldCtx, A: ElemSet, f: Poly, S: ElemSet) -> ElemSet:
    """One point of ``A`` over each element of ``S``, the least index each time."""
    idx = A.indices()
    vals = poly_eval_many(ctx, f, idx)
    keep = S.bits[vals]
    vals, idx = vals[keep], idx[keep]
    # idx is ascending, so the first occurrence of each value is its least preimage
    _, first = np.unique(vals, return_index=True)
    return ElemSet.from_indices(ctx.order, idx[first])


def intersection_experiment(ctx: FieldCtx, A: AffineSubspace, f: Poly, *,
                            strict: bool = True) -> IntersectionReport:
    """``#(A cap f(A))`` plus the inclusions the bound's argument relies on.

    With ``strict=False`` the ``p > deg f >= 2`` hypothesis is reported rather
    than enforced; the inclusions hold regardless of it.
    """
    d = f.degree
    hyp = ctx.p > d >= 2
    if strict and not hyp:
        raise InputError(f"need p > deg f >= 2, got p={ctx.p}, deg f={d}")
    if d < 1:
        raise InputError("f must be nonconstant")
    pts = enumerate_affine(ctx, A)
    L = linear_part(ctx, A)
    S = pts & image_set(ctx, f, pts)
    pre = preimage_set(ctx, pts, f, S)
    if pre.card != S.card:
        raise InvariantViolation("preimage set has the wrong size")
    fpre = image_set(ctx, f, pre)
    inclusions = (signed_sumset(ctx, pre, 4, 4).issubset(L) if pre.card else True) and (
        diffset(ctx, fpre, fpre).issubset(diffset(ctx, S, S)) if pre.card else True) and (
        diffset(ctx, S, S).issubset(L) if S.card else True)
    if not inclusions:
        raise InvariantViolation("preimage-set inclusions failed")
    row = exponents_for(max(d, 2))
    s = A.dim
    log_ratio = math.log(S.card, ctx.q) / s if s and S.card else None
    condition = subfield_condition_check(ctx, L, row.rho, "subspace")
    return IntersectionReport(S.card, s, s * (1 - row.kappa), log_ratio, pre, inclusions, hyp, condition)


@dataclass(frozen=True)
class OrbitRunReport:
    run_from_zero: int
    longest_run: int
    orbit_size: int
    subspace_size: int
    exponent: float | None


def orbit_run_experiment(ctx: FieldCtx, f: Poly, u: int, A: AffineSubspace) -> OrbitRunReport:
    """Length of the run of orbit points inside ``A``, from ``n = 0`` and anywhere."""
    pts = enumerate_affine(ctx, A)
    orb = orbit(ctx, f, u)
    T = orb.orbit_size
    inside = pts.bits[orb.sequence(orb.tail_len + 2 * orb.cycle_len)]
    run0 = 0
    while run0 < T and inside[run0]:
        run0 += 1
    longest = cur = 0
    for flag in inside:
        cur = cur + 1 if flag else 0
        longest = max(longest, cur)
    longest = min(longest, T)
    size = ctx.q**A.dim
    exponent = math.log(size) / math.log(run0) if run0 >= 2 else None
    return OrbitRunReport(run0, longest, T, size, exponent)


@dataclass(frozen=True)
class SPGenReport:
    M: int
    ratio_card: int
    quad_card: int
    lhs1: int
    lhs2: int
    rhs: int
    zero_skipped: bool
    condition: ConditionReport


def sp_gen_measure(ctx: FieldCtx, A: ElemSet) -> SPGenReport:
    """Exact sizes in the ratio/four-fold-sum dichotomy, with its subfield condition."""
    if A.card < 1:
        raise InputError("measurement needs a nonempty set")
    R = ratio_set(ctx, A, A).card
    Q = signed_sumset(ctx, A, 4, 0).card
    M = A.card
    condition = subfield_condition_check(ctx, A, Fraction(0), "set", size=M)
    return SPGenReport(M, R, Q, R**4 * Q**5, R**5 * Q**4, M**10, 0 in A, condition)
