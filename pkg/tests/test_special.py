"""Special-function checks against independent quadrature oracles.

The oracles integrate the textbook densities (written from math.lgamma)
with scipy's adaptive quadrature; the implementation under test uses
continued fractions and series, so the two routes share nothing.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from edakit.special import betainc_reg, chi2_sf, f_cdf, f_sf, gammainc_lower_reg


def f_pdf(x, d1, d2):
    if x <= 0:
        return 0.0
    log_num = (
        0.5 * d1 * math.log(d1) + 0.5 * d2 * math.log(d2)
        + (0.5 * d1 - 1.0) * math.log(x)
        - 0.5 * (d1 + d2) * math.log(d2 + d1 * x)
    )
    log_b = math.lgamma(0.5 * d1) + math.lgamma(0.5 * d2) - math.lgamma(0.5 * (d1 + d2))
    return math.exp(log_num - log_b)


def chi2_pdf(x, df):
    if x <= 0:
        return 0.0
    return math.exp(
        (0.5 * df - 1.0) * math.log(x) - 0.5 * x - 0.5 * df * math.log(2.0)
        - math.lgamma(0.5 * df)
    )


def beta_pdf(t, a, b):
    if t <= 0 or t >= 1:
        return 0.0
    log_b = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return math.exp((a - 1) * math.log(t) + (b - 1) * math.log1p(-t) - log_b)


def quad_f_cdf(x, d1, d2):
    val, _ = integrate.quad(f_pdf, 0.0, x, args=(d1, d2), limit=200)
    return val


class TestIncompleteBeta:
    def test_bounds(self):
        assert betainc_reg(2.0, 3.0, 0.0) == 0.0
        assert betainc_reg(2.0, 3.0, 1.0) == 1.0

    def test_symmetry(self):
        for a, b, x in [(2.0, 5.0, 0.3), (0.5, 0.5, 0.7), (10.0, 1.5, 0.9)]:
            assert betainc_reg(a, b, x) == pytest.approx(
                1.0 - betainc_reg(b, a, 1.0 - x), abs=1e-12
            )

    def test_against_quadrature(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = float(rng.uniform(0.5, 20))
            b = float(rng.uniform(0.5, 20))
            x = float(rng.uniform(0.01, 0.99))
            want, _ = integrate.quad(beta_pdf, 0.0, x, args=(a, b), limit=200)
            assert betainc_reg(a, b, x) == pytest.approx(want, abs=1e-9)

    def test_uniform_special_case(self):
        # I_x(1, 1) is the identity
        for x in np.linspace(0, 1, 11):
            assert betainc_reg(1.0, 1.0, float(x)) == pytest.approx(x, abs=1e-12)


class TestIncompleteGamma:
    def test_bounds(self):
        assert gammainc_lower_reg(3.0, 0.0) == 0.0
        assert gammainc_lower_reg(3.0, 1e9) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_special_case(self):
        # P(1, x) = 1 - exp(-x)
        for x in [0.1, 1.0, 2.5, 10.0]:
            assert gammainc_lower_reg(1.0, x) == pytest.approx(
                1.0 - math.exp(-x), abs=1e-12
            )

    def test_against_quadrature(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = float(rng.uniform(0.5, 30))
            x = float(rng.uniform(0.1, 60))
            want, _ = integrate.quad(
                lambda t: math.exp((a - 1) * math.log(t) - t - math.lgamma(a)),
                0.0,
                x,
                limit=200,
            )
            assert gammainc_lower_reg(a, x) == pytest.approx(want, abs=1e-9)


class TestFDistribution:
    def test_sf_at_zero_is_one(self):
        assert f_sf(0.0, 3, 10) == 1.0
        assert f_sf(-1.0, 3, 10) == 1.0

    def test_monotone_non_increasing(self):
        xs = np.linspace(0, 50, 200)
        vals = [f_sf(float(x), 4, 17) for x in xs]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_cdf_matches_quadrature_20_random_triples(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d1 = float(rng.integers(1, 30))
            d2 = float(rng.integers(3, 40))
            x = float(rng.uniform(0.05, 8.0))
            assert f_cdf(x, d1, d2) == pytest.approx(quad_f_cdf(x, d1, d2), abs=1e-8)

    def test_sf_infinite(self):
        assert f_sf(math.inf, 2, 5) == 0.0


class TestChi2:
    def test_sf_at_zero(self):
        assert chi2_sf(0.0, 4) == 1.0

    def test_against_quadrature(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            df = float(rng.integers(1, 30))
            x = float(rng.uniform(0.1, 60))
            upper, _ = integrate.quad(chi2_pdf, x, np.inf, args=(df,), limit=200)
            assert chi2_sf(x, df) == pytest.approx(upper, abs=1e-9)
