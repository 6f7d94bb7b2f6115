"""Exact expansion exponents and the orbit-frequency threshold.

``eta``/``theta`` start at 1/69 for quadratics and follow

    eta_d   = eta_{d-1} / (5 + eta_{d-1})
    theta_d = theta_{d-1} + eta_d - theta_{d-1} eta_d
    log c_d = (log c_{d-1} - 3 log d) / (5 + eta_{d-1})

with ``kappa_d = eta_d / (1 + eta_d)`` and ``rho_d = eta_d + theta_d - eta_d theta_d``.
``c_2`` is an unknown absolute constant, so ``log_c`` is parametric in it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InputError

ETA_2 = Fraction(1, 69)


@dataclass(frozen=True)
class ExponentRow:
    d: int
    eta: Fraction
    theta: Fraction
    kappa: Fraction
    rho: Fraction
    log_c: float


@lru_cache(maxsize=None)
def _rows(d_max: int, c2: float) -> tuple[ExponentRow, ...]:
    eta = theta = ETA_2
    log_c = math.log(c2)
    rows = []
    for d in range(2, d_max + 1):
        if d > 2:
            prev_eta = eta
            eta = prev_eta / (5 + prev_eta)
            theta = theta + eta - theta * eta
            log_c = (log_c - 3 * math.log(d)) / (5 + float(prev_eta))
        rows.append(ExponentRow(d, eta, theta, eta / (1 + eta), eta + theta - eta * theta, log_c))
    return tuple(rows)


def exponent_table(d_max: int, c2: float = 1.0) -> list[ExponentRow]:
    if d_max < 2:
        raise InputError("d_max must be at least 2")
    if c2 <= 0:
        raise InputError("c2 must be positive")
    return list(_rows(d_max, float(c2)))


def exponents_for(d: int) -> ExponentRow:
    if d < 2:
        raise InputError("exponents are defined for degree >= 2")
    return _rows(d, 1.0)[-1]


def c_of_d(d: int, log_base: float = math.e) -> float:
    """``2 log(4 d)`` in the requested base (natural by default)."""
    if d < 1:
        raise InputError("degree must be positive")
    return 2 * math.log(4 * d) / math.log(log_base)


def freq_threshold(d: int, N: int, log_base: float = math.e) -> float:
    """``c(d) N / ln N + 1``; only the constant ``c(d)`` follows ``log_base``."""
    if N < 2:
        raise InputError("frequency threshold needs N >= 2")
    return c_of_d(d, log_base) * N / math.log(N) + 1


def meets_threshold(count: int, d: int, N: int, log_base: float = math.e) -> bool:
    """``count >= c(d) N / ln N + 1``, exact for the natural-log constant.

    With natural logs the inequality is ``N^(count-1) >= (4d)^(2N)``.
    """
    if N < 2:
        raise InputError("frequency threshold needs N >= 2")
    if count < 1:
        return False
    if log_base == math.e:
        margin = (count - 1) * math.log(N) - 2 * N * math.log(4 * d)
        if abs(margin) > 1e-9 * (count + N):
            return margin > 0
        return N ** (count - 1) >= (4 * d) ** (2 * N)
    return count >= freq_threshold(d, N, log_base)


def min_hits(d: int, N: int, log_base: float = math.e) -> int:
    """Least hit count meeting the threshold at ``N`` (may exceed ``N``)."""
    c = max(1, math.floor(freq_threshold(d, N, log_base)) - 1)
    while not meets_threshold(c, d, N, log_base):
        c += 1
    while c > 1 and meets_threshold(c - 1, d, N, log_base):
        c -= 1
    return c


def eta_limit_report(d_max: int) -> list[tuple[int, float]]:
    """``(d, log(eta_d) / d)`` for ``2 <= d <= d_max``; tends to ``-log 5``."""
    if d_max < 3:
        raise InputError("d_max must be at least 3")
    out = []
    for row in exponent_table(d_max):
        log_eta = math.log(row.eta.numerator) - math.log(row.eta.denominator)
        out.append((row.d, log_eta / row.d))
    return out


def log_c_ratio_report(d_max: int, c2: float = 1.0) -> list[tuple[int, float]]:
    """Diagnostic ``log c_d / log d``; parametric in ``c2``, no claimed limit check."""
    return [(row.d, row.log_c / math.log(row.d)) for row in exponent_table(d_max, c2)]
