"""Series evaluations against brute-force and library oracles."""

import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings, strategies as st

from skellam_lab import (
    SeriesControl,
    TruncationError,
    bessel_i,
    frac_poisson_pmf,
    inv_stable_marginal_sample,
    wright_psi23,
)
from skellam_lab.special import poisson_pmf


def brute_bessel(n, x, terms=200):
    """Direct summation of the defining series, no truncation logic."""
    return math.fsum(
        math.exp((2 * m + n) * math.log(x / 2.0) - math.lgamma(m + n + 1) - math.lgamma(m + 1))
        for m in range(terms)
    )


def test_bessel_trivial_values():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(3, 0.0) == 0.0


def test_bessel_matches_brute_force_at_two():
    oracle = brute_bessel(0, 2.0)
    assert oracle == pytest.approx(2.2795853023360673, abs=1e-12)
    assert bessel_i(0, 2.0) == pytest.approx(oracle, abs=1e-14 * (1 + oracle))


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 5.0, 10.0])
def test_bessel_matches_scipy(n, x):
    assert bessel_i(n, x) == pytest.approx(float(scipy.special.iv(n, x)), rel=1e-12)


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("x", [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0])
def test_bessel_parity(n, x):
    sign = 1.0 if n % 2 == 0 else -1.0
    assert bessel_i(n, -x) == pytest.approx(sign * bessel_i(n, x), abs=1e-15)


def test_bessel_negative_order_uses_absolute_value():
    assert bessel_i(-2, 1.5) == bessel_i(2, 1.5)


def test_bessel_rejects_non_finite():
    with pytest.raises(ValueError):
        bessel_i(0, math.inf)
    with pytest.raises(ValueError):
        bessel_i(0, math.nan)


def test_bessel_cap_carries_partial_sum():
    with pytest.raises(TruncationError) as exc:
        bessel_i(0, 6.0, SeriesControl(abs_tol=1e-14, max_terms=2))
    partial = exc.value.partial
    assert 0 < partial < bessel_i(0, 6.0)


@given(st.integers(0, 8), st.floats(0.0, 15.0))
@settings(max_examples=60, deadline=None)
def test_bessel_nonnegative_for_nonnegative_argument(n, x):
    assert bessel_i(n, x) >= 0.0


def test_wright_single_term_at_zero_argument():
    a1, a2 = (1.5, 1.0), (2.0, 1.0)
    b1, b2, b3 = (1.2, 0.5), (0.7, 0.5), (3.0, 1.0)
    expected = (math.gamma(1.5) * math.gamma(2.0)
                / (math.gamma(1.2) * math.gamma(0.7) * math.gamma(3.0)))
    assert wright_psi23(a1, a2, b1, b2, b3, 0.0) == pytest.approx(expected, rel=1e-14)


def test_wright_collapses_to_bessel_series():
    # all weights 1 and unit parameters: sum_m z^m / (m!)^2, at z=1 this is I_0(2)
    one = (1.0, 1.0)
    value = wright_psi23(one, one, one, one, one, 1.0)
    assert value == pytest.approx(bessel_i(0, 2.0), abs=1e-12)


def test_wright_unit_weight_factorial_series_oracle():
    params = ((2.0, 1.0), (3.0, 1.0), (1.0, 1.0), (4.0, 1.0), (2.0, 1.0))
    z = 0.7
    oracle = math.fsum(
        math.gamma(2 + m) * math.gamma(3 + m)
        / (math.gamma(1 + m) * math.gamma(4 + m) * math.gamma(2 + m))
        * z**m / math.factorial(m)
        for m in range(55)
    )
    assert wright_psi23(*params, z) == pytest.approx(oracle, abs=1e-10)


def test_wright_cap_keeps_leading_term():
    one = (1.0, 1.0)
    with pytest.raises(TruncationError) as exc:
        wright_psi23(one, one, one, one, one, 1.0, SeriesControl(abs_tol=1e-14, max_terms=1))
    assert exc.value.partial == pytest.approx(1.0)  # the m=0 term


def test_wright_numerator_pole_is_domain_error():
    with pytest.raises(ValueError, match="pole"):
        wright_psi23((0.0, 1.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0), 0.5)


def test_wright_alternating_argument():
    one = (1.0, 1.0)
    oracle = math.fsum((-0.8) ** m / math.factorial(m) ** 2 for m in range(60))
    assert wright_psi23(one, one, one, one, one, -0.8) == pytest.approx(oracle, abs=1e-12)


def test_frac_poisson_at_time_zero():
    assert frac_poisson_pmf(0, 1.0, 0.0, 0.7) == 1.0
    assert frac_poisson_pmf(3, 1.0, 0.0, 0.7) == 0.0


def test_frac_poisson_classical_branch():
    assert frac_poisson_pmf(2, 1.5, 1.0, 1.0) == pytest.approx(
        math.exp(-1.5) * 1.5**2 / 2.0, rel=1e-14
    )
    for n in range(31):
        assert frac_poisson_pmf(n, 0.8, 2.5, 1.0) == pytest.approx(
            poisson_pmf(n, 2.0), abs=1e-12
        )


@pytest.mark.parametrize("lam,t,alpha", [(1.0, 1.0, 0.5), (1.0, 1.0, 0.7), (2.0, 1.5, 0.6)])
def test_frac_poisson_normalizes(lam, t, alpha):
    total = 0.0
    for n in range(400):
        total += frac_poisson_pmf(n, lam, t, alpha)
        if 1.0 - total < 1e-8:
            break
    assert total == pytest.approx(1.0, abs=1e-6)


def test_frac_poisson_count_weighted_mean():
    # sum_n n pmf(n) must reproduce lam t^alpha / Gamma(alpha+1)
    lam, t, alpha = 1.2, 1.5, 0.6
    mean = math.fsum(n * frac_poisson_pmf(n, lam, t, alpha) for n in range(1, 300))
    assert mean == pytest.approx(lam * t**alpha / math.gamma(alpha + 1), abs=1e-8)


def test_frac_poisson_zero_count_is_mittag_leffler():
    # P{N(L(t)) = 0} = E exp(-lam L(t)); Monte Carlo over the inverse clock
    lam, t, alpha = 1.0, 1.0, 0.5
    clock = inv_stable_marginal_sample(alpha, t, 200_000, seed=2024).values
    weights = np.exp(-lam * clock)
    mc, se = weights.mean(), weights.std() / np.sqrt(weights.size)
    assert abs(frac_poisson_pmf(0, lam, t, alpha) - mc) < 3 * se


def test_frac_poisson_rejects_bad_arguments():
    with pytest.raises(ValueError):
        frac_poisson_pmf(-1, 1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        frac_poisson_pmf(0, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        frac_poisson_pmf(0, 1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        frac_poisson_pmf(0, 1.0, 1.0, 1.2)


@given(st.integers(0, 15), st.floats(0.1, 2.5), st.floats(0.1, 1.5), st.floats(0.5, 1.0))
@settings(max_examples=80, deadline=None)
def test_frac_poisson_is_a_probability(n, lam, t, alpha):
    # restricted to the range where float64 can resolve the alternating series
    p = frac_poisson_pmf(n, lam, t, alpha)
    assert 0.0 <= p <= 1.0


def test_frac_poisson_flags_numerical_divergence():
    with pytest.raises(TruncationError):
        frac_poisson_pmf(0, 4.0, 2.0, 0.2)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(abs_tol=0.0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=0)
