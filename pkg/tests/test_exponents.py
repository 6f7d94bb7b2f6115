import math
from fractions import Fraction

import pytest

from ffdyn import InputError
from ffdyn.exponents import (
    c_of_d,
    eta_limit_report,
    exponent_table,
    exponents_for,
    freq_threshold,
    log_c_ratio_report,
    meets_threshold,
    min_hits,
)


def denominator(d: int) -> Fraction:
    # closed form of a_d = 1 / eta_d
    return Fraction(277, 4) * 5 ** (d - 2) - Fraction(1, 4)


def theta_oracle(d: int) -> Fraction:
    # 1 - theta_d = prod (1 - eta_j), j = 2..d
    rest = Fraction(1)
    for j in range(2, d + 1):
        rest *= 1 - 1 / denominator(j)
    return 1 - rest


def test_stated_values():
    r2, r3, r4 = exponents_for(2), exponents_for(3), exponents_for(4)
    assert r2.eta == r2.theta == Fraction(1, 69)
    assert r3.eta == Fraction(1, 346) and r4.eta == Fraction(1, 1731)
    assert r3.theta == Fraction(3, 173)
    assert r2.kappa == Fraction(1, 70)
    assert r2.rho == Fraction(137, 4761)


def test_against_closed_forms():
    for row in exponent_table(60):
        a = denominator(row.d)
        assert a.denominator == 1
        assert row.eta == 1 / a
        assert row.kappa == 1 / (a + 1)
        assert row.theta == theta_oracle(row.d)
        assert row.rho == 1 - (1 - row.eta) * (1 - row.theta)
        assert row.rho < row.eta + row.theta and row.kappa < row.eta


def test_log_c_decreasing():
    rows = exponent_table(30, c2=0.5)
    assert all(a.log_c > b.log_c for a, b in zip(rows, rows[1:]))
    assert exponent_table(5, c2=1.0)[0].log_c == 0.0
    assert len(log_c_ratio_report(10)) == 9


def test_limit_diagnostic():
    rep = dict(eta_limit_report(40))
    assert rep[2] == pytest.approx(math.log(1 / 69) / 2, abs=1e-12)
    assert abs(rep[40] + math.log(5)) < 0.05
    values = [rep[d] for d in range(3, 41)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(v < -math.log(5) for v in values)


def test_threshold_examples():
    assert c_of_d(2) == pytest.approx(4.15888, abs=1e-5)
    assert c_of_d(2, 2.0) == pytest.approx(6.0)
    assert freq_threshold(2, 64) == pytest.approx(65.0, abs=1e-9)
    for N in (10, 100, 1000):
        assert freq_threshold(2, N) < freq_threshold(3, N) < freq_threshold(7, N)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_min_hits_is_exact(d):
    for N in range(2, 400, 7):
        m = min_hits(d, N)
        assert meets_threshold(m, d, N) and not meets_threshold(m - 1, d, N)
        # exact integer form of the inequality
        assert N ** (m - 1) >= (4 * d) ** (2 * N)
        assert m == 1 or N ** (m - 2) < (4 * d) ** (2 * N)


def test_errors():
    with pytest.raises(InputError):
        exponent_table(1)
    with pytest.raises(InputError):
        exponent_table(5, c2=0)
    with pytest.raises(InputError):
        exponents_for(1)
    with pytest.raises(InputError):
        freq_threshold(2, 1)
