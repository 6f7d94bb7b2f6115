"""Dense set calculus over F: signed sumsets, ratio sets, restricted pair sets.

Sumsets are supports of group convolutions of membership tables.  The additive
group of F is ``(Z/p)^(m r)`` in the dense index digits, so a table reshaped to
``(p,) * (m r)`` convolves with an n-dimensional FFT; small operands use the
direct pairwise route instead.  Ratio sets convolve discrete-log tables on the
cyclic group F*.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elemset import ElemSet
from .errors import InputError, WorkCapExceeded
from .fpoly import Poly, image_set
from .gf_tower import FieldCtx

DEFAULT_WORK_CAP = 1 << 28
_DIRECT_PAIRS = 1 << 20


@dataclass(frozen=True)
class PairRelation:
    """A set of pairs ``E`` inside ``U x V``."""

    left: np.ndarray
    right: np.ndarray
    U: ElemSet
    V: ElemSet

    def __post_init__(self):
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        if left.shape != right.shape or left.ndim != 1:
            raise InputError("pair arrays must be one-dimensional and equally long")
        if len(left):
            if not (self.U.bits[left].all() and self.V.bits[right].all()):
                raise InputError("pair relation leaves its ambient U x V")
            keys = left * self.V.order + right
            if len(np.unique(keys)) != len(keys):
                raise InputError("pair relation has duplicate pairs")
        left.flags.writeable = False
        right.flags.writeable = False
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __len__(self) -> int:
        return len(self.left)

    @classmethod
    def full(cls, U: ElemSet, V: ElemSet) -> "PairRelation":
        a, b = np.meshgrid(U.indices(), V.indices(), indexing="ij")
        return cls(a.ravel(), b.ravel(), U, V)


@dataclass(frozen=True)
class SetStats:
    M: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    xi: Fraction


@dataclass(frozen=True)
class PRReport:
    lhs: int
    rhs: Fraction
    holds: bool
    variant: str


# sumsets ----------------------------------------------------------------


def _conv_support_fft(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = (ctx.p,) * ctx.degree
    fa = np.fft.fftn(a.astype(float).reshape(shape))
    fb = np.fft.fftn(b.astype(float).reshape(shape))
    # index digits are little-endian while reshape is big-endian; the group
    # convolution is digit-wise so the axis order does not matter
    counts = np.fft.ifftn(fa * fb).real.reshape(-1)
    return counts > 0.5


def _sum_tables(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ia, ib = np.flatnonzero(a), np.flatnonzero(b)
    out = np.zeros(ctx.order, dtype=bool)
    if len(ia) == 0 or len(ib) == 0:
        return out
    if len(ia) * len(ib) <= _DIRECT_PAIRS:
        out[ctx.vadd(ia[:, None], ib[None, :]).ravel()] = True
        return out
    return _conv_support_fft(ctx, a, b)


def negate(ctx: FieldCtx, A: ElemSet) -> ElemSet:
    out = np.zeros(ctx.order, dtype=bool)
    out[ctx.vneg(A.indices())] = True
    return ElemSet(out)


def sumset(ctx: FieldCtx, A: ElemSet, B: ElemSet) -> ElemSet:
    return ElemSet(_sum_tables(ctx, A.bits, B.bits))


def diffset(ctx: FieldCtx, A: ElemSet, B: ElemSet) -> ElemSet:
    return ElemSet(_sum_tables(ctx, A.bits, negate(ctx, B).bits))


def signed_sumset(ctx: FieldCtx, A: ElemSet, k_plus: int, k_minus: int,
                  work_cap: int = DEFAULT_WORK_CAP) -> ElemSet:
    """``A + ... + A - A - ... - A`` with ``k_plus`` and ``k_minus`` copies."""
    if k_plus < 0 or k_minus < 0 or k_plus + k_minus < 1:
        raise InputError("need k_plus + k_minus >= 1 with both nonnegative")
    steps = k_plus + k_minus - 1
    if steps * ctx.order * max(ctx.degree, 1) > work_cap:
        raise WorkCapExceeded(f"signed sumset needs ~{steps * ctx.order} table operations")
    neg = negate(ctx, A).bits
    parts = [A.bits] * k_plus + [neg] * k_minus
    acc = parts[0]
    for part in parts[1:]:
        if acc.all():
            break
        acc = _sum_tables(ctx, acc, part)
    return ElemSet(acc)


# ratio sets -------------------------------------------------------------


def _ratio_tables(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Support of ``{x / y : x in a, y in b}`` with ``0 not in b``."""
    out = np.zeros(ctx.order, dtype=bool)
    ia, ib = np.flatnonzero(a), np.flatnonzero(b)
    if len(ib) == 0 or len(ia) == 0:
        return out
    if a[0]:
        out[0] = True
    ia = ia[ia != 0]
    if len(ia) == 0:
        return out
    if len(ia) * len(ib) <= _DIRECT_PAIRS or not ctx.tabled:
        out[ctx.vmul(ia[:, None], ctx.vinv(ib)[None, :]).ravel()] = True
        return out
    n1 = ctx.order - 1
    la = np.zeros(n1)
    lb = np.zeros(n1)
    la[ctx.log[ia]] = 1.0
    lb[(-ctx.log[ib]) % n1] = 1.0
    counts = np.fft.ifft(np.fft.fft(la) * np.fft.fft(lb)).real
    out[ctx.exp[np.flatnonzero(counts > 0.5)]] = True
    return out


def ratio_set(ctx: FieldCtx, A: ElemSet, B: ElemSet) -> ElemSet:
    """``A : B`` over the nonzero elements of ``B``; zero denominators are skipped."""
    denom = B.bits.copy()
    denom[0] = False
    if not denom.any():
        raise InputError("ratio set needs a nonzero denominator")
    return ElemSet(_ratio_tables(ctx, A.bits, denom))


def inverse_set(ctx: FieldCtx, A: ElemSet) -> ElemSet:
    """``{a^-1 : a in A, a != 0}``."""
    idx = A.indices()
    idx = idx[idx != 0]
    out = np.zeros(ctx.order, dtype=bool)
    if len(idx):
        out[ctx.vinv(idx)] = True
    return ElemSet(out)


def dilate(ctx: FieldCtx, a: int, G: ElemSet) -> ElemSet:
    out = np.zeros(ctx.order, dtype=bool)
    idx = G.indices()
    if len(idx):
        out[ctx.vmul(a, idx)] = True
    return ElemSet(out)


# restricted pair sets ---------------------------------------------------


def restricted_pairs(ctx: FieldCtx, E: PairRelation, op: str) -> ElemSet:
    """Image of the relation under ``(a, b) -> a - b`` (``diff``) or ``a / b`` (``ratio``)."""
    out = np.zeros(ctx.order, dtype=bool)
    if len(E) == 0:
        if op not in ("diff", "ratio"):
            raise InputError(f"unknown restricted operation {op!r}")
        return ElemSet(out)
    if op == "diff":
        out[ctx.vsub(E.left, E.right)] = True
    elif op == "ratio":
        if np.any(E.right == 0):
            raise ZeroDivisionError("restricted ratio set has a zero denominator")
        out[ctx.vmul(E.left, ctx.vinv(E.right))] = True
    else:
        raise InputError(f"unknown restricted operation {op!r}")
    return ElemSet(out)


def bsg_pair_relation(ctx: FieldCtx, A: ElemSet, b: int, *, strict: bool = True) -> PairRelation:
    """``E = {(x - y, (x + y + b)^-1) : x, y in A, x + y + b != 0}``.

    The ambient is ``U = A - A`` and ``V = (A + A + b)^-1``.  In characteristic 2
    distinct pairs ``(x, y)`` can collide, which breaks the size bound; that case
    is refused unless ``strict=False``.
    """
    if strict and ctx.p == 2:
        raise InputError("pair relation distinctness needs odd characteristic")
    idx = A.indices()
    x, y = np.meshgrid(idx, idx, indexing="ij")
    x, y = x.ravel(), y.ravel()
    s = ctx.vadd(ctx.vadd(x, y), b)
    keep = s != 0
    left = ctx.vsub(x[keep], y[keep])
    right = ctx.vinv(s[keep]) if keep.any() else np.zeros(0, dtype=np.int64)
    keys = np.unique(left * ctx.order + right)
    left, right = keys // ctx.order, keys % ctx.order
    U = diffset(ctx, A, A)
    V = inverse_set(ctx, ElemSet.from_indices(ctx.order, s[keep]) if keep.any() else ElemSet.empty(ctx.order))
    return PairRelation(left, right, U, V)


# statistics -------------------------------------------------------------


def set_stats(ctx: FieldCtx, A: ElemSet, f: Poly, work_cap: int = DEFAULT_WORK_CAP) -> SetStats:
    """Exact expansion ratios of ``A + A``, ``A - A``, the 8-fold set and ``f(A) - f(A)``."""
    M = A.card
    if M < 1:
        raise InputError("statistics need a nonempty set")
    fA = image_set(ctx, f, A)
    return SetStats(
        M=M,
        alpha=Fraction(signed_sumset(ctx, A, 2, 0, work_cap).card, M),
        beta=Fraction(signed_sumset(ctx, A, 1, 1, work_cap).card, M),
        gamma=Fraction(signed_sumset(ctx, A, 4, 4, work_cap).card, M),
        xi=Fraction(diffset(ctx, fA, fA).card, M),
    )


def difference_counts(ctx: FieldCtx, A: ElemSet) -> np.ndarray:
    """``r(t) = #{(x, y) in A x A : x - y = t}`` for every ``t``."""
    idx = A.indices()
    diffs = ctx.vsub(idx[:, None], idx[None, :]).ravel()
    return np.bincount(diffs, minlength=ctx.order)


def popular_difference(ctx: FieldCtx, A: ElemSet) -> tuple[int, int]:
    """Nonzero ``t`` with the most representations, least index on ties."""
    if A.card < 2:
        raise InputError("popular difference needs #A >= 2")
    r = difference_counts(ctx, A)
    r[0] = 0
    t = int(np.argmax(r))
    return t, int(r[t])


def plunnecke_check(ctx: FieldCtx, U: ElemSet, variant: str = "standard",
                    work_cap: int = DEFAULT_WORK_CAP) -> PRReport:
    """Compare ``#(U+U-U-U)`` against ``(#(U-U)/#U)^4 #U``.

    ``variant="displayed"`` raises the left-hand side to the fourth power as in
    the literal printed form of the inequality.
    """
    if U.card < 1:
        raise InputError("Plunnecke check needs a nonempty set")
    lhs = signed_sumset(ctx, U, 2, 2, work_cap).card
    rhs = Fraction(signed_sumset(ctx, U, 1, 1, work_cap).card, U.card) ** 4 * U.card
    if variant == "standard":
        holds = lhs <= rhs
    elif variant == "displayed":
        holds = lhs**4 <= rhs
    else:
        raise InputError(f"unknown Plunnecke variant {variant!r}")
    return PRReport(lhs, rhs, holds, variant)
