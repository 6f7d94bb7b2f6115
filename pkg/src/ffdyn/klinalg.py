"""K-linear algebra inside F and the subfield-intersection condition."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .elemset import ElemSet
from .errors import InputError, WorkCapExceeded
from .gf_tower import FieldCtx, decode, divisors, encode
from .rng import SplitMix64

DEFAULT_WORK_CAP = 1 << 24
_EXACT_DENOMINATOR_LIMIT = 200_000


@dataclass(frozen=True)
class AffineSubspace:
    """``base + span_K(basis)``; the basis is K-linearly independent."""

    base: int
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_json(self, ctx: FieldCtx) -> dict:
        return {"base": encode(ctx, self.base), "basis": [encode(ctx, v) for v in self.basis]}

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj: dict) -> "AffineSubspace":
        sub = cls(decode(ctx, obj["base"]), tuple(decode(ctx, v) for v in obj["basis"]))
        if rank(ctx, list(sub.basis)) != sub.dim:
            raise InputError("basis vectors are not K-linearly independent")
        return sub


def coords(ctx: FieldCtx, a: int) -> list[int]:
    """K-coordinates of ``a`` in the basis ``1, y, ..., y^(r-1)``."""
    return ctx.coords(a)


def coord_matrix(ctx: FieldCtx, elems) -> np.ndarray:
    elems = np.asarray(elems, dtype=np.int64)
    q = ctx.q
    return np.stack([(elems // q**j) % q for j in range(ctx.r)], axis=-1)


def _rows_to_elems(ctx: FieldCtx, rows: np.ndarray) -> np.ndarray:
    weights = np.array([ctx.q**j for j in range(ctx.r)], dtype=np.int64)
    return rows @ weights


def echelon(ctx: FieldCtx, vectors) -> list[int]:
    """Reduced row-echelon basis over K of the span of ``vectors``.

    Columns are processed left to right; the pivot is the first remaining row
    with a nonzero entry in the column.
    """
    mat = coord_matrix(ctx, np.asarray(vectors, dtype=np.int64).reshape(-1))
    if mat.size == 0:
        return []
    mat = mat.copy()
    pivots: list[int] = []
    used = np.zeros(len(mat), dtype=bool)
    for col in range(ctx.r):
        cand = np.flatnonzero((mat[:, col] != 0) & ~used)
        if len(cand) == 0:
            continue
        piv = int(cand[0])
        used[piv] = True
        mat[piv] = ctx.vmul(ctx.inv(int(mat[piv, col])), mat[piv])
        factors = mat[:, col].copy()
        factors[piv] = 0
        rows = np.flatnonzero(factors)
        if len(rows):
            mat[rows] = ctx.vsub(mat[rows], ctx.vmul(factors[rows, None], mat[piv][None, :]))
        pivots.append(piv)
        if len(pivots) == ctx.r:
            break
    return [int(x) for x in _rows_to_elems(ctx, mat[pivots])]


def rank(ctx: FieldCtx, vectors) -> int:
    return len(echelon(ctx, vectors))


def affine_hull(ctx: FieldCtx, S: ElemSet) -> AffineSubspace:
    """Smallest K-affine subspace containing ``S``, based at its least element."""
    if S.card == 0:
        raise InputError("affine hull of the empty set")
    base = S.min()
    diffs = ctx.vsub(S.indices(), base)
    return AffineSubspace(base, tuple(echelon(ctx, diffs[diffs != 0])))


def set_dimension(ctx: FieldCtx, S: ElemSet) -> int:
    return affine_hull(ctx, S).dim


def span_points(ctx: FieldCtx, basis, base: int = 0, work_cap: int = DEFAULT_WORK_CAP) -> np.ndarray:
    size = ctx.q ** len(basis)
    if size > work_cap:
        raise WorkCapExceeded(f"subspace of {size} points exceeds cap {work_cap}")
    K = np.arange(ctx.q, dtype=np.int64)
    pts = np.array([base], dtype=np.int64)
    for v in basis:
        pts = ctx.vadd(pts[:, None], ctx.vmul(K, v)[None, :]).ravel()
    return pts


def enumerate_affine(ctx: FieldCtx, A: AffineSubspace, work_cap: int = DEFAULT_WORK_CAP) -> ElemSet:
    pts = span_points(ctx, A.basis, A.base, work_cap)
    out = ElemSet.from_indices(ctx.order, pts)
    if out.card != ctx.q**A.dim:
        raise AssertionError("affine subspace basis is not independent")
    return out


def linear_part(ctx: FieldCtx, A: AffineSubspace, work_cap: int = DEFAULT_WORK_CAP) -> ElemSet:
    return enumerate_affine(ctx, AffineSubspace(0, A.basis), work_cap)


def random_affine(ctx: FieldCtx, s: int, seed: int) -> AffineSubspace:
    """Deterministic pseudo-random affine subspace of dimension ``s``."""
    if not 0 <= s <= ctx.r:
        raise InputError(f"dimension must lie in [0, {ctx.r}]")
    rng = SplitMix64(seed)
    base = rng.below(ctx.order)
    chosen: list[int] = []
    while len(chosen) < s:
        v = rng.below(ctx.order)
        if v and rank(ctx, chosen + [v]) > len(chosen):
            chosen.append(v)
    return AffineSubspace(base, tuple(echelon(ctx, chosen)))


def all_linear_subspaces(ctx: FieldCtx, s: int):
    """Every K-linear subspace of dimension ``s``, as reduced echelon bases."""
    from itertools import combinations, product

    r, q = ctx.r, ctx.q
    for piv in combinations(range(r), s):
        free = [(i, j) for i, pc in enumerate(piv) for j in range(pc + 1, r) if j not in piv]
        for vals in product(range(q), repeat=len(free)):
            rows = np.zeros((s, r), dtype=np.int64)
            for i, pc in enumerate(piv):
                rows[i, pc] = 1
            for (i, j), v in zip(free, vals):
                rows[i, j] = v
            yield tuple(int(x) for x in _rows_to_elems(ctx, rows))


# subfield-intersection condition ---------------------------------------


def power_le(count8: int, base: int, exponent: Fraction) -> bool:
    """Decide ``count8 <= base ** exponent`` exactly for rational ``exponent >= 0``."""
    if count8 <= 0:
        return True
    if exponent == 0 or base == 1:
        return count8 <= 1
    u, v = exponent.numerator, exponent.denominator
    if v <= _EXACT_DENOMINATOR_LIMIT and u * base.bit_length() <= 1 << 26:
        return count8**v <= base**u
    with mpmath.workdps(80):
        lhs = mpmath.log(count8)
        rhs = mpmath.mpf(u) / v * mpmath.log(base)
        return bool(lhs <= rhs)


@dataclass(frozen=True)
class DegreeVerdict:
    d: int
    max_count: int
    argmax_a: int
    satisfied: bool


@dataclass(frozen=True)
class ConditionReport:
    worst_d: int
    worst_a: int
    worst_count: int
    threshold: float
    satisfied: bool
    exponent: Fraction
    size: int
    sampled: bool = False
    per_degree: tuple[DegreeVerdict, ...] = field(default=())

    def to_json(self, ctx: FieldCtx) -> dict:
        return {
            "worst_d": self.worst_d,
            "worst_a": encode(ctx, self.worst_a),
            "worst_count": self.worst_count,
            "threshold": round(self.threshold, 6),
            "satisfied": self.satisfied,
            "exponent": str(self.exponent),
            "sampled": self.sampled,
        }


def _threshold_float(subfield_size: int, size: int, exponent: Fraction) -> float:
    return max(math.sqrt(subfield_size), size ** float(exponent) / 8)


def intersection_ok(count: int, subfield_size: int, size: int, exponent: Fraction) -> bool:
    """``count <= max(sqrt(#G), size^exponent / 8)``, decided in integers."""
    return count * count <= subfield_size or power_le(8 * count, size, exponent)


def dilate_count(ctx: FieldCtx, L: ElemSet, d: int, a: int) -> int:
    """``#(L cap aG)`` for ``G = F_{p^d}``, by testing ``x / a in G`` directly."""
    from .gf_tower import subfield_mask

    if a == 0:
        raise InputError("dilating element must be nonzero")
    mask = subfield_mask(ctx, d)
    idx = L.indices()
    return int(np.count_nonzero(mask[ctx.vmul(idx, ctx.inv(a))]))


def subfield_condition_check(ctx: FieldCtx, L: ElemSet, exponent: Fraction, mode: str = "subspace",
                             size: int | None = None, work_cap: int = DEFAULT_WORK_CAP * 16,
                             samples: int = 4096, seed: int = 0) -> ConditionReport:
    """Maximize ``#(L cap aG)`` over every subfield ``G`` and every ``a != 0``.

    ``mode="subspace"`` compares with ``max(sqrt(#G), (#L)^(1-exponent)/8)``;
    ``mode="set"`` uses ``size`` (the cardinality of the underlying set A) in
    place of ``#L``.  For fields without log tables the maximization is over
    ``samples`` seeded dilates and ``worst_count`` is only a lower bound.
    """
    if mode == "subspace":
        base_size = L.card
    elif mode == "set":
        if size is None:
            raise InputError("set mode needs the size of the underlying set")
        base_size = size
    else:
        raise InputError(f"unknown condition mode {mode!r}")
    power = 1 - Fraction(exponent)
    n = ctx.order
    if n * max(L.card, 1) > work_cap * max(1, n.bit_length()):
        raise WorkCapExceeded("subfield condition check exceeds its work budget")

    zero_in = int(L.bits[0])
    nz = L.indices()
    nz = nz[nz != 0]
    verdicts = []
    if ctx.tabled:
        logs = ctx.log[nz]
        all_logs = ctx.log[1:]
        all_idx = np.arange(1, n, dtype=np.int64)
        for d in divisors(ctx.degree):
            e = (n - 1) // (ctx.p**d - 1)
            counts = np.bincount(logs % e, minlength=e) + zero_in
            least = np.full(e, n, dtype=np.int64)
            np.minimum.at(least, all_logs % e, all_idx)
            best = int(counts.max())
            a = int(least[counts == best].min())
            verdicts.append(DegreeVerdict(d, best, a,
                                          intersection_ok(best, ctx.p**d, base_size, power)))
        sampled = False
    else:
        rng = SplitMix64(seed)
        cands = sorted({1 + rng.below(n - 1) for _ in range(samples)} | {1})
        for d in divisors(ctx.degree):
            best, a = -1, 1
            for cand in cands:
                c = dilate_count(ctx, L, d, cand)
                if c > best:
                    best, a = c, cand
            verdicts.append(DegreeVerdict(d, best, a,
                                          intersection_ok(best, ctx.p**d, base_size, power)))
        sampled = True
    worst = max(verdicts, key=lambda v: (v.max_count, -v.d, -v.argmax_a))
    return ConditionReport(
        worst_d=worst.d,
        worst_a=worst.argmax_a,
        worst_count=worst.max_count,
        threshold=_threshold_float(ctx.p**worst.d, base_size, power),
        satisfied=all(v.satisfied for v in verdicts),
        exponent=Fraction(exponent),
        size=base_size,
        sampled=sampled,
        per_degree=tuple(verdicts),
    )
