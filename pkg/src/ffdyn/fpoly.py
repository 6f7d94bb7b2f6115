"""Univariate polynomials over F: evaluation, composition, iteration and orbits."""
from __future__ import annotations

import re

from dataclasses import dataclass
from itertools import product

import numpy as np

from .elemset import ElemSet
from .errors import InputError, WorkCapExceeded
from .gf_tower import FieldCtx, decode, encode, subfield_mask

DEFAULT_DEGREE_CAP = 1 << 12
DEFAULT_WORK_CAP = 1 << 24


@dataclass(frozen=True)
class Poly:
    """Dense coefficients (field indices), low degree first, no trailing zeros."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def of(cls, *coeffs: int) -> "Poly":
        return cls(tuple(coeffs))

    @classmethod
    def identity(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)


@dataclass(frozen=True)
class OrbitSummary:
    tail_len: int
    cycle_len: int
    elements: tuple[int, ...]

    @property
    def orbit_size(self) -> int:
        return self.tail_len + self.cycle_len

    def at(self, n: int) -> int:
        """``f^(n)(u)`` for any ``n >= 0``, continuing periodically past the orbit."""
        if n < len(self.elements):
            return self.elements[n]
        return self.elements[self.tail_len + (n - self.tail_len) % self.cycle_len]

    def sequence(self, length: int) -> np.ndarray:
        n = np.arange(length, dtype=np.int64)
        idx = np.where(n < self.orbit_size, n,
                       self.tail_len + (n - self.tail_len) % self.cycle_len)
        return np.asarray(self.elements, dtype=np.int64)[idx]


# literals ---------------------------------------------------------------


def parse_poly(ctx: FieldCtx, text: str) -> Poly:
    """Element literals separated by commas or whitespace, low degree first."""
    parts = re.split(r"\s*,\s*|\s+", text.strip())
    if not parts or any(not s for s in parts):
        raise InputError(f"malformed polynomial literal {text!r}")
    return Poly(tuple(decode(ctx, s) for s in parts))


def format_poly(ctx: FieldCtx, f: Poly) -> str:
    coeffs = f.coeffs or (0,)
    return ",".join(encode(ctx, c) for c in coeffs)


# arithmetic -------------------------------------------------------------


def poly_add(ctx: FieldCtx, f: Poly, g: Poly) -> Poly:
    n = max(len(f.coeffs), len(g.coeffs))
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[: len(f.coeffs)] = f.coeffs
    b[: len(g.coeffs)] = g.coeffs
    return Poly(tuple(ctx.vadd(a, b).tolist()))


def poly_sub(ctx: FieldCtx, f: Poly, g: Poly) -> Poly:
    if not g.coeffs:
        return f
    return poly_add(ctx, f, Poly(tuple(ctx.vneg(g.array()).tolist())))


def _mul_arrays(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, c in enumerate(a.tolist()):
        if c:
            seg = out[i : i + len(b)]
            out[i : i + len(b)] = ctx.vadd(seg, ctx.vmul(c, b))
    return out


def _square_array(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    if ctx.p == 2 and len(a):
        # char 2: (sum a_i X^i)^2 = sum a_i^2 X^(2i)
        out = np.zeros(2 * len(a) - 1, dtype=np.int64)
        out[::2] = ctx.vmul(a, a)
        return out
    return _mul_arrays(ctx, a, a)


def poly_mul(ctx: FieldCtx, f: Poly, g: Poly) -> Poly:
    if f is g or f == g:
        return Poly(tuple(_square_array(ctx, f.array()).tolist()))
    return Poly(tuple(_mul_arrays(ctx, f.array(), g.array()).tolist()))


def poly_eval(ctx: FieldCtx, f: Poly, x: int) -> int:
    """Horner evaluation."""
    acc = 0
    for c in reversed(f.coeffs):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def poly_eval_many(ctx: FieldCtx, f: Poly, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(f.coeffs):
        acc = ctx.vadd(ctx.vmul(acc, xs), c)
    return acc


def eval_table(ctx: FieldCtx, f: Poly) -> np.ndarray:
    """``f(x)`` for every element ``x`` of F, indexed by ``x``."""
    return poly_eval_many(ctx, f, ctx.elements())


def _powers(ctx: FieldCtx, g: np.ndarray, top: int) -> list[np.ndarray]:
    pw = [np.array([1], dtype=np.int64), g]
    for i in range(2, top + 1):
        pw.append(_square_array(ctx, pw[i // 2]) if i % 2 == 0 else _mul_arrays(ctx, pw[i - 1], g))
    return pw[: top + 1]


def poly_compose(ctx: FieldCtx, f: Poly, g: Poly, degree_cap: int = DEFAULT_DEGREE_CAP) -> Poly:
    """Coefficients of ``f(g(X))``; raises :class:`WorkCapExceeded` past ``degree_cap``."""
    if max(f.degree, 0) * max(g.degree, 0) > degree_cap:
        raise WorkCapExceeded(f"composition degree {f.degree * g.degree} exceeds cap {degree_cap}")
    if not f.coeffs:
        return f
    pw = _powers(ctx, g.array(), f.degree)
    out = np.zeros(max(len(x) for x in pw), dtype=np.int64)
    for c, gi in zip(f.coeffs, pw):
        if c and len(gi):
            out[: len(gi)] = ctx.vadd(out[: len(gi)], ctx.vmul(c, gi))
    return Poly(tuple(out.tolist()))


def poly_iterate_symbolic(ctx: FieldCtx, f: Poly, k: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> Poly:
    """``f^(k)`` as a polynomial, by repeated composition ``f(f^(j))``."""
    if k < 0:
        raise InputError("iterate index must be nonnegative")
    out = Poly.identity()
    for _ in range(k):
        out = poly_compose(ctx, f, out, degree_cap)
    return out


def iterate(ctx: FieldCtx, f: Poly, u: int, n: int) -> int:
    if n < 0:
        raise InputError("iterate index must be nonnegative")
    for _ in range(n):
        u = poly_eval(ctx, f, u)
    return u


def orbit(ctx: FieldCtx, f: Poly, u: int, table: np.ndarray | None = None) -> OrbitSummary:
    """Tail and cycle of ``u`` under ``f``, found through first-visit times."""
    first_seen: dict[int, int] = {}
    seq = []
    x = u
    while x not in first_seen:
        first_seen[x] = len(seq)
        seq.append(x)
        x = int(table[x]) if table is not None else poly_eval(ctx, f, x)
    tail = first_seen[x]
    return OrbitSummary(tail, len(seq) - tail, tuple(seq))


def poly_shift(ctx: FieldCtx, f: Poly, t: int) -> Poly:
    """``f(X + t)``."""
    return poly_compose(ctx, f, Poly((t, 1)), degree_cap=max(f.degree, 1))


def difference_poly(ctx: FieldCtx, f: Poly, t: int) -> Poly:
    """``g(X) = f(X + t) - f(X)``, of degree ``deg f - 1`` when ``deg f < p``."""
    d = f.degree
    if d < 2:
        raise InputError("difference polynomial needs deg f >= 2")
    if d >= ctx.p:
        raise InputError(f"deg f = {d} >= p = {ctx.p}: the degree may collapse")
    if t == 0:
        raise InputError("shift t must be nonzero")
    g = poly_sub(ctx, poly_shift(ctx, f, t), f)
    if g.degree != d - 1:
        raise AssertionError("difference polynomial lost its expected degree")
    return g


def poly_over_subfield(ctx: FieldCtx, f: Poly, d: int) -> bool:
    """True iff every coefficient of ``f`` lies in ``F_{p^d}``."""
    mask = subfield_mask(ctx, d)
    return all(bool(mask[c]) for c in f.coeffs)


def image_set(ctx: FieldCtx, f: Poly, A: ElemSet) -> ElemSet:
    """The value set ``f(A)``."""
    out = np.zeros(ctx.order, dtype=bool)
    idx = A.indices()
    if len(idx):
        out[poly_eval_many(ctx, f, idx)] = True
    image = ElemSet(out)
    if f.degree >= 1 and image.card * f.degree < A.card:
        raise AssertionError("value set smaller than #A / deg f")
    return image


# multivariate -----------------------------------------------------------


def _eval_multi(ctx: FieldCtx, terms: dict[tuple[int, ...], int], args: list[np.ndarray]) -> np.ndarray:
    acc = np.zeros_like(args[0])
    for mono, coeff in terms.items():
        term = np.full_like(args[0], coeff)
        for var, e in enumerate(mono):
            if e:
                term = ctx.vmul(term, ctx.vpow(args[var], e))
        acc = ctx.vadd(acc, term)
    return acc


def image_multi(ctx: FieldCtx, terms: dict[tuple[int, ...], int], sets: list[ElemSet],
                work_cap: int = DEFAULT_WORK_CAP) -> ElemSet:
    """Image of a polynomial in up to three variables over ``A_1 x ... x A_k``.

    ``terms`` maps exponent tuples (one entry per variable) to coefficients.
    """
    arity = len(sets)
    if not 1 <= arity <= 3:
        raise InputError("image_multi supports one to three variables")
    if any(len(mono) != arity for mono in terms):
        raise InputError("monomial arity does not match the number of sets")
    work = 1
    for S in sets:
        work *= S.card
    if work > work_cap:
        raise WorkCapExceeded(f"cartesian product of size {work} exceeds cap {work_cap}")
    out = np.zeros(ctx.order, dtype=bool)
    if work == 0:
        return ElemSet(out)
    grids = np.meshgrid(*[S.indices() for S in sets], indexing="ij")
    out[_eval_multi(ctx, terms, [g.ravel() for g in grids])] = True
    return ElemSet(out)


def all_polys(ctx: FieldCtx, degree: int, coeff_set=None, leading: str = "monic"):
    """Every polynomial of exactly ``degree`` with coefficients from ``coeff_set``.

    ``leading`` is ``"monic"`` or ``"all"`` (any nonzero leading coefficient).
    """
    coeffs = list(range(ctx.order)) if coeff_set is None else sorted(set(coeff_set))
    lead = [1] if leading == "monic" else [c for c in coeffs if c]
    for low in product(coeffs, repeat=degree):
        for lc in lead:
            yield Poly(low + (lc,))
