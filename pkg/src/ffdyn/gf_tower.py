"""Finite-field towers F_p <= K = F_q <= F = F_{q^r} with dense element indexing.

An element of F is stored as an integer ``index`` in ``[0, p**(m*r))``.  Writing
``q = p**m``, the K-coordinates of an element are the base-q digits of its index
(coordinate j multiplies ``y**j``, where y is the root of ``h``), and each K
coordinate is in turn the base-p digit expansion of a polynomial in ``x``
reduced modulo ``g``.  So K sits inside F as the indices ``0 .. q-1`` and the
prime field as ``0 .. p-1``.

Small fields (``order <= TABLE_LIMIT``) get discrete-log tables and vectorized
numpy arithmetic.  Larger ones fall back to coordinate arithmetic.
"""
from __future__ import annotations

import functools
import os
import re
from dataclasses import dataclass

import numpy as np

from .elemset import ElemSet
from .errors import InputError, WorkCapExceeded

DEFAULT_MAX_ORDER = 1 << 24
TABLE_LIMIT = 1 << 16
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

Elem = int


def max_field_order() -> int:
    """Field-size cap, overridable through ``FFDYN_MAX_FIELD``."""
    raw = os.environ.get("FFDYN_MAX_FIELD")
    if raw is None:
        return DEFAULT_MAX_ORDER
    try:
        value = int(raw, 0)
    except ValueError as exc:
        raise InputError(f"FFDYN_MAX_FIELD is not an integer: {raw!r}") from exc
    if value < 2:
        raise InputError("FFDYN_MAX_FIELD must be at least 2")
    return value


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# --------------------------------------------------------------------------
# slow coordinate arithmetic, used to build tables and for large fields


class _PrimeField:
    def __init__(self, p: int):
        self.p = p
        self.size = p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)


def _rem_monic(a: list[int], b: tuple[int, ...], field) -> list[int]:
    a = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            for j in range(db + 1):
                a[i - db + j] = field.sub(a[i - db + j], field.mul(c, b[j]))
    return a[:db]


def _monic_polys(field, deg: int):
    size = field.size
    for v in range(size**deg):
        low = []
        for _ in range(deg):
            v, c = divmod(v, size)
            low.append(c)
        yield tuple(low) + (1,)


def _is_irreducible(poly: tuple[int, ...], field) -> bool:
    deg = len(poly) - 1
    if deg <= 1:
        return deg == 1
    for k in range(1, deg // 2 + 1):
        for div in _monic_polys(field, k):
            if not any(_rem_monic(list(poly), div, field)):
                return False
    return True


def least_monic_irreducible(field, deg: int) -> tuple[int, ...]:
    """Least monic irreducible of degree ``deg`` over ``field``.

    Candidates are ordered by the integer whose base-``field.size`` digits,
    low degree first, are the non-leading coefficients.
    """
    for cand in _monic_polys(field, deg):
        if _is_irreducible(cand, field):
            return cand
    raise AssertionError("irreducible polynomials exist in every degree")


class _Extension:
    """``base[t] / (modulus)`` with elements encoded as base-``base.size`` integers."""

    def __init__(self, base, modulus: tuple[int, ...]):
        self.base = base
        self.modulus = modulus
        self.k = len(modulus) - 1
        self.size = base.size**self.k
        self._exp: list[int] | None = None
        self._log: list[int] | None = None

    def to_vec(self, a: int) -> list[int]:
        bs = self.base.size
        out = []
        for _ in range(self.k):
            a, c = divmod(a, bs)
            out.append(c)
        return out

    def from_vec(self, v) -> int:
        bs = self.base.size
        out = 0
        for c in reversed(v):
            out = out * bs + c
        return out

    def add(self, a: int, b: int) -> int:
        B = self.base
        return self.from_vec([B.add(x, y) for x, y in zip(self.to_vec(a), self.to_vec(b))])

    def neg(self, a: int) -> int:
        B = self.base
        return self.from_vec([B.neg(x) for x in self.to_vec(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            n1 = self.size - 1
            return self._exp[(self._log[a] + self._log[b]) % n1]
        return self._mul_coords(a, b)

    def _mul_coords(self, a: int, b: int) -> int:
        B = self.base
        va, vb = self.to_vec(a), self.to_vec(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    if y:
                        prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        return self.from_vec(_rem_monic(prod, self.modulus, B))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return self._exp[(-self._log[a]) % (self.size - 1)]
        return self.pow(a, self.size - 2)

    def primitive_element(self) -> int:
        n1 = self.size - 1
        if n1 == 1:
            return 1
        cofactors = [n1 // ell for ell in prime_factors(n1)]
        for cand in range(2, self.size):
            if all(self.pow(cand, c) != 1 for c in cofactors):
                return cand
        raise AssertionError("multiplicative group of a finite field is cyclic")

    def build_tables(self) -> tuple[list[int], list[int]]:
        gen = self.primitive_element()
        n1 = self.size - 1
        exp = [0] * n1
        log = [0] * self.size
        x = 1
        for i in range(n1):
            exp[i] = x
            log[x] = i
            x = self._mul_coords(x, gen)
        if x != 1:
            raise AssertionError("generator order mismatch")
        self._exp, self._log = exp, log
        return exp, log


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SubfieldDesc:
    d: int
    size: int
    contains_K: bool
    contained_in_K: bool


class FieldCtx:
    """Immutable description of the tower F_p <= F_q <= F_{q^r}.

    Construct through :func:`build_field`.  ``g`` holds the F_p coefficients of
    the modulus of K, ``h`` the K-coefficients (as dense indices) of the
    modulus of F; both are low degree first and monic.
    """

    def __init__(self, p: int, m: int, r: int, g: tuple[int, ...], h: tuple[int, ...],
                 K: _Extension, F: _Extension):
        self.p = p
        self.m = m
        self.r = r
        self.g = g
        self.h = h
        self.q = p**m
        self.degree = m * r
        self.order = p ** (m * r)
        self._K = K
        self._F = F
        self._pw = [p**i for i in range(self.degree)]
        if F._exp is not None:
            n1 = self.order - 1
            exp = np.array(F._exp, dtype=np.int64)
            self.exp = np.concatenate([exp, exp])
            self.log = np.array(F._log, dtype=np.int64)
            self.log.flags.writeable = False
            self.exp.flags.writeable = False
            self._n1 = n1
        else:
            self.exp = None
            self.log = None
            self._n1 = self.order - 1
        self._neg_table = None
        if self.order <= TABLE_LIMIT:
            self._neg_table = self._vneg_digits(np.arange(self.order, dtype=np.int64))
            self._neg_table.flags.writeable = False

    @property
    def spec(self) -> str:
        return f"{self.p}^{self.m}^{self.r}"

    @property
    def tabled(self) -> bool:
        return self.exp is not None

    def __repr__(self) -> str:
        return f"FieldCtx({self.spec}, order={self.order}, g={self.g}, h={self.h})"

    def __reduce__(self):
        return (_make, (self.p, self.m, self.r))

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise InputError(f"element index {a} out of range for {self.spec}")
        return a

    # scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        for pw in self._pw:
            out += ((a // pw + b // pw) % p) * pw
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self._neg_table is not None:
            return int(self._neg_table[a])
        p = self.p
        out = 0
        for pw in self._pw:
            out += ((-(a // pw)) % p) * pw
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.exp is not None:
            return int(self.exp[self.log[a] + self.log[b]])
        return self._F.mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("division by zero in finite field")
        if self.exp is not None:
            return int(self.exp[(self._n1 - self.log[a]) % self._n1])
        return self._F.inv(a)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        if self.exp is not None:
            return int(self.exp[(int(self.log[a]) * e) % self._n1])
        return self._F.pow(a, e)

    def mul_slow(self, a: int, b: int) -> int:
        """Coordinate multiplication that never touches the log tables."""
        return self._F._mul_coords(a, b) if a and b else 0

    # vector arithmetic --------------------------------------------------

    def _vneg_digits(self, a: np.ndarray) -> np.ndarray:
        p = self.p
        out = np.zeros_like(a)
        for pw in self._pw:
            out += ((-(a // pw)) % p) * pw
        return out

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pw in self._pw:
            out += ((a // pw + b // pw) % p) * pw
        return out

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self._neg_table is not None:
            return self._neg_table[a]
        return self._vneg_digits(a)

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.exp is None:
            if self._K._exp is not None:
                return self._vmul_coords(a, b)
            fn = np.frompyfunc(self._F.mul, 2, 1)
            return fn(a, b).astype(np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def _vmul_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Schoolbook product over K then reduction by ``h``, vectorized over elements."""
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        a, b = a.reshape(-1), b.reshape(-1)
        q, r = self.q, self.r
        kexp = np.array(self._K._exp + self._K._exp, dtype=np.int64)
        klog = np.array(self._K._log, dtype=np.int64)

        def kmul(x, y):
            return np.where((x == 0) | (y == 0), 0, kexp[klog[x] + klog[y]])

        da = [(a // q**i) % q for i in range(r)]
        db = [(b // q**i) % q for i in range(r)]
        prod = [np.zeros_like(a) for _ in range(2 * r - 1)]
        for i in range(r):
            for j in range(r):
                prod[i + j] = self.vadd(prod[i + j], kmul(da[i], db[j]))
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[k]
            for j, hj in enumerate(self.h[:-1]):
                if hj:
                    prod[k - r + j] = self.vsub(prod[k - r + j], kmul(c, np.full_like(c, hj)))
        out = np.zeros_like(a)
        for i in range(r):
            out += prod[i] * q**i
        return out.reshape(shape)

    def _vpow_square(self, a: np.ndarray, e: int) -> np.ndarray:
        result = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                result = self.vmul(result, base)
            e >>= 1
            if e:
                base = self.vmul(base, base)
        return result

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("division by zero in finite field")
        if self.exp is None:
            return self._vpow_square(a, self.order - 2)
        return self.exp[(self._n1 - self.log[a]) % self._n1]

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.exp is None:
            if e < 0:
                return self._vpow_square(self.vinv(a), -e)
            return self._vpow_square(a, e)
        if e < 0 and np.any(a == 0):
            raise ZeroDivisionError("zero to a negative power")
        out = self.exp[(self.log[a] * (e % self._n1)) % self._n1]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def vfrob(self, a, e: int) -> np.ndarray:
        out = np.asarray(a, dtype=np.int64)
        for _ in range(e):
            out = self.vpow(out, self.p)
        return out

    # tower structure ----------------------------------------------------

    def coords(self, a: int) -> list[int]:
        """K-coordinates of ``a`` in the basis 1, y, ..., y^(r-1)."""
        return self._F.to_vec(a)

    def from_coords(self, v) -> int:
        return self._F.from_vec(list(v))

    def subfields(self) -> list[SubfieldDesc]:
        return [SubfieldDesc(d, self.p**d, d % self.m == 0, self.m % d == 0)
                for d in divisors(self.degree)]

    def generator(self) -> int:
        """The element ``y`` adjoined to K (index q)."""
        return self.q if self.r > 1 else 0


# --------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _make(p: int, m: int, r: int) -> FieldCtx:
    Fp = _PrimeField(p)
    g = least_monic_irreducible(Fp, m)
    K = _Extension(Fp, g)
    if K.size <= TABLE_LIMIT:
        K.build_tables()
    h = least_monic_irreducible(K, r)
    F = _Extension(K, h)
    if F.size <= TABLE_LIMIT:
        F.build_tables()
    return FieldCtx(p, m, r, g, h, K, F)


def build_field(p: int, m: int, r: int, *, allow_r1: bool = False, max_order: int | None = None) -> FieldCtx:
    """Build the tower ``F_p <= F_{p^m} <= F_{p^(m r)}``.

    Moduli are the least monic irreducibles in the candidate order of
    :func:`least_monic_irreducible`.  ``r == 1`` is only accepted with
    ``allow_r1=True`` (prime-field oracle mode).  Contexts are cached; the size
    cap is checked on every call.
    """
    if r < 2 and not allow_r1:
        raise InputError("r must be at least 2 (pass allow_r1=True for oracle fields)")
    if not is_prime(p):
        raise InputError(f"characteristic {p} is not prime")
    if m < 1 or r < 1:
        raise InputError("extension degrees must be positive")
    cap = max_field_order() if max_order is None else max_order
    if p ** (m * r) > cap:
        raise WorkCapExceeded(f"field of order {p}^{m * r} exceeds the cap {cap}")
    return _make(p, m, r)


_SPEC_RE = re.compile(r"^\s*(\d+)\^(\d+)\^(\d+)\s*$")


def parse_field_spec(text: str) -> tuple[int, int, int]:
    match = _SPEC_RE.match(text)
    if not match:
        raise InputError(f"field spec must look like 'p^m^r', got {text!r}")
    return tuple(int(x) for x in match.groups())  # type: ignore[return-value]


def field_from_spec(text: str, *, allow_r1: bool = False, max_order: int | None = None) -> FieldCtx:
    p, m, r = parse_field_spec(text)
    return build_field(p, m, r, allow_r1=allow_r1, max_order=max_order)


def field_arith(ctx: FieldCtx, op: str, a: int, b: int) -> int:
    """Dispatch one of ``add, sub, mul, div, pow`` (``b`` is the exponent for pow)."""
    if op == "add":
        return ctx.add(a, b)
    if op == "sub":
        return ctx.sub(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    if op == "div":
        return ctx.div(a, b)
    if op == "pow":
        return ctx.pow(a, b)
    raise InputError(f"unknown field operation {op!r}")


def frobenius(ctx: FieldCtx, a: int, e: int) -> int:
    """``a ** (p ** e)`` by ``e`` successive p-th powers."""
    for _ in range(e):
        a = ctx.pow(a, ctx.p)
    return a


def _check_divisor(ctx: FieldCtx, d: int) -> None:
    if d < 1 or ctx.degree % d:
        raise InputError(f"{d} does not divide the absolute degree {ctx.degree}")


def subfield_membership(ctx: FieldCtx, a: int, d: int) -> bool:
    _check_divisor(ctx, d)
    return frobenius(ctx, a, d) == a


def _nullspace_mod_p(mat: list[list[int]], p: int) -> list[list[int]]:
    """Basis of ``{x : mat x = 0}`` over F_p by Gauss-Jordan elimination."""
    rows, cols = len(mat), len(mat[0])
    a = [row[:] for row in mat]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i][fc]) % p
        basis.append(v)
    return basis


def _fixed_space(ctx: FieldCtx, d: int) -> np.ndarray:
    """Indices fixed by ``x -> x^(p^d)``, found as the kernel of an F_p-linear map.

    Dense digits are F_p-coordinates, so only the ``m r`` basis images are needed.
    """
    n, p = ctx.degree, ctx.p
    images = [frobenius(ctx, p**i, d) for i in range(n)]
    digits = [[(img // p**j) % p for j in range(n)] for img in images]
    mat = [[(digits[i][j] - (i == j)) % p for i in range(n)] for j in range(n)]
    basis = np.array(_nullspace_mod_p(mat, p), dtype=np.int64).reshape(-1, n)
    if len(basis) != d:
        raise AssertionError("fixed space of the Frobenius has the wrong dimension")
    combos = np.array(np.meshgrid(*[np.arange(p)] * d, indexing="ij")).reshape(d, -1).T
    coords = (combos @ basis) % p
    return coords @ np.array([p**j for j in range(n)], dtype=np.int64)


@functools.lru_cache(maxsize=256)
def subfield_mask(ctx: FieldCtx, d: int) -> np.ndarray:
    """Read-only boolean table of ``F_{p^d}`` inside F."""
    _check_divisor(ctx, d)
    if d == ctx.degree:
        mask = np.ones(ctx.order, dtype=bool)
    elif ctx.tabled:
        elems = ctx.elements()
        mask = ctx.vfrob(elems, d) == elems
    else:
        mask = np.zeros(ctx.order, dtype=bool)
        mask[_fixed_space(ctx, d)] = True
    mask.flags.writeable = False
    return mask


@functools.lru_cache(maxsize=256)
def enumerate_subfield(ctx: FieldCtx, d: int) -> ElemSet:
    """All ``a`` with ``a**(p**d) == a``; exactly ``p**d`` elements."""
    found = ElemSet(subfield_mask(ctx, d))
    if found.card != ctx.p**d:
        raise AssertionError("subfield enumeration has the wrong size")
    return found


# element literals -------------------------------------------------------


def encode(ctx: FieldCtx, a: int) -> str:
    """Base-p digit string of length m*r, most significant first.

    Fields with p > 36 have no single-character digits and use the decimal index.
    """
    ctx.check(a)
    if ctx.p > len(_DIGITS):
        return str(a)
    out = []
    for _ in range(ctx.degree):
        a, c = divmod(a, ctx.p)
        out.append(_DIGITS[c])
    return "".join(reversed(out))


def decode(ctx: FieldCtx, text: str) -> int:
    """Inverse of :func:`encode`; strings of another length are decimal indices."""
    text = text.strip()
    if not text:
        raise InputError("empty element literal")
    if ctx.p <= len(_DIGITS) and len(text) == ctx.degree:
        value = 0
        for ch in text.lower():
            digit = _DIGITS.find(ch)
            if digit < 0 or digit >= ctx.p:
                raise InputError(f"digit {ch!r} is not valid in characteristic {ctx.p}")
            value = value * ctx.p + digit
        return value
    if not text.isdigit():
        raise InputError(f"malformed element literal {text!r}")
    value = int(text)
    if value >= ctx.order:
        raise InputError(f"element index {value} out of range for {ctx.spec}")
    return value
