"""Alternate Skellam process (one time per jump) and its closed forms."""

import math

import numpy as np
import pytest

from skellam_lab import (
    AltSpec,
    alt_array_sample,
    alt_increment_cf,
    alt_lattice_pmf,
    alt_moments,
    alt_pgf,
    alt_sample,
    twoparam_skellam_pmf,
)
from skellam_lab.records import LatticePMF
from skellam_lab.special import poisson_pmf
from skellam_lab.stats import lattice_chi2

SPEC = AltSpec({1: 1.0, -1: 1.0})


def test_spec_validation():
    with pytest.raises(ValueError):
        AltSpec({})
    with pytest.raises(ValueError):
        AltSpec({0: 1.0})
    with pytest.raises(ValueError):
        AltSpec({1: 0.0})


def test_sample_zero_times():
    batch = alt_sample(SPEC, {1: 0.0, -1: 0.0}, 20, seed=1)
    assert np.all(batch.values == 0)


def test_sample_key_mismatch():
    with pytest.raises(ValueError):
        alt_sample(SPEC, {1: 1.0, 2: 1.0}, 10, seed=0)
    with pytest.raises(ValueError):
        alt_sample(SPEC, {1: 1.0}, 10, seed=0)


def test_constant_time_matches_lattice_oracle():
    # with all t_j equal the law is the one-parameter generalized Skellam
    spec = AltSpec({1: 0.8, -1: 0.5, 2: 0.3})
    t = {1: 1.0, -1: 1.0, 2: 1.0}
    batch = alt_sample(spec, t, 100_000, seed=7)
    report = lattice_chi2(batch, alt_lattice_pmf(spec, t))
    assert report.verdict, f"p={report.p_value}"


def test_two_jump_case_matches_twoparam_pmf_chi2():
    t = {1: 1.2, -1: 0.7}
    batch = alt_sample(SPEC, t, 100_000, seed=13)
    probs = np.array([twoparam_skellam_pmf(n, 1.0, 1.0, 1.2, 0.7) for n in range(-12, 13)])
    report = lattice_chi2(batch, LatticePMF(-12, probs, tail_mass=max(0.0, 1 - probs.sum())))
    assert report.verdict, f"p={report.p_value}"


def test_moments_examples():
    zero = {1: 0.0, -1: 0.0}
    assert alt_moments(SPEC, zero, zero) == (0.0, 0.0, 0.0)
    mean, var, _ = alt_moments(SPEC, {1: 2.0, -1: 1.0}, {1: 2.0, -1: 1.0})
    assert mean == pytest.approx(1.0)
    assert var == pytest.approx(3.0)
    t = {1: 1.5, -1: 0.5}
    m, v, c = alt_moments(SPEC, t, t)
    assert c == pytest.approx(v)


def test_increment_cf_examples():
    t = {1: 1.5, -1: 1.2}
    s = {1: 0.5, -1: 0.2}
    assert alt_increment_cf(SPEC, s, t, 0.0) == pytest.approx(1.0)
    assert alt_increment_cf(SPEC, t, t, 2.3) == pytest.approx(1.0)
    for z in (0.4, 1.0, 2.0):
        value = alt_increment_cf(SPEC, s, t, z)  # gaps are (1.0, 1.0)
        assert value == pytest.approx(math.exp(2 * (math.cos(z) - 1)), rel=1e-12)
    with pytest.raises(ValueError):
        alt_increment_cf(SPEC, t, s, 1.0)


def test_increment_cf_agrees_with_pgf_continuation():
    spec = AltSpec({1: 0.9, -1: 0.4, 3: 0.2})
    t = {1: 1.0, -1: 2.0, 3: 0.5}
    zero = {j: 0.0 for j in t}
    assert alt_pgf(spec, t, 1.0) == pytest.approx(1.0)
    for z in np.arange(-3.0, 3.01, 0.5):
        u = np.exp(1j * z)
        continued = np.exp(sum(lam * t[j] * (u**j - 1.0) for j, lam in spec.rates.items()))
        assert abs(alt_increment_cf(spec, zero, t, z) - continued) < 1e-12


def test_disjoint_increments_uncorrelated():
    # coupled path values at 0 <= t1 <= t2 from per-jump Poisson increments
    # (the process definition); successive increments must decorrelate
    n = 100_000
    t1 = {1: 0.5, -1: 0.4}
    t2 = {1: 1.0, -1: 0.9}
    rng = np.random.default_rng(19)
    s_t1 = np.zeros(n)
    s_t2 = np.zeros(n)
    for j, lam in SPEC.rates.items():
        block1 = rng.poisson(lam * t1[j], n)
        block2 = rng.poisson(lam * (t2[j] - t1[j]), n)
        s_t1 += j * block1
        s_t2 += j * (block1 + block2)
    rho = np.corrcoef(s_t1, s_t2 - s_t1)[0, 1]
    assert abs(rho) < 4 / math.sqrt(n)


def test_array_zero_window():
    batch = alt_array_sample(3.0, lambda l, ja, j: 0.1, [1, -1],
                             {1: 0.1, -1: 0.2}, 10, seed=0)
    assert np.all(batch.values == 0)


def test_array_kronecker_rule_single_axis_poisson_binomial():
    # mass only on the diagonal jump: each axis is a plain Bernoulli sum
    lam = {1: 0.7, -1: 0.4}
    beta = 10.0
    rule = lambda l, ja, j: (lam[ja] / beta) if ja == j else 0.0
    t = {1: 1.0, -1: 1.0}
    batch = alt_array_sample(beta, rule, [1, -1], t, 50_000, seed=29)
    dist = np.array([1.0])
    start = 0
    for j, p in ((1, lam[1] / beta), (-1, lam[-1] / beta)):
        axis = np.array([1.0])
        for _ in range(10):
            axis = np.convolve(axis, [1 - p, p])
        if j > 0:
            dist = np.convolve(dist, axis)
        else:
            dist = np.convolve(dist, axis[::-1])
            start -= axis.size - 1
    report = lattice_chi2(batch, LatticePMF(start, dist))
    assert report.verdict, f"p={report.p_value}"


def test_array_rejects_invalid_rule():
    with pytest.raises(ValueError):
        alt_array_sample(10.0, lambda l, ja, j: 0.6, [1, -1], {1: 1.0, -1: 1.0}, 10, seed=0)
    with pytest.raises(ValueError):
        alt_array_sample(-1.0, lambda l, ja, j: 0.1, [1], {1: 1.0}, 10, seed=0)


def test_twoparam_pmf_center_and_symmetry():
    p0 = twoparam_skellam_pmf(0, 1.0, 1.0, 1.0, 1.0)
    assert p0 == pytest.approx(0.308508322553671, abs=1e-10)
    for n in range(-10, 11):
        assert twoparam_skellam_pmf(n, 2.0, 1.0, 0.5, 1.0) == pytest.approx(
            twoparam_skellam_pmf(-n, 2.0, 1.0, 0.5, 1.0), rel=1e-12
        )  # lam1 t1 = lam2 t2 = 1 here


def test_twoparam_pmf_degenerate_times():
    assert twoparam_skellam_pmf(2, 1.5, 2.0, 1.0, 0.0) == pytest.approx(
        poisson_pmf(2, 1.5), rel=1e-14
    )
    assert twoparam_skellam_pmf(-3, 1.5, 2.0, 0.0, 1.0) == pytest.approx(
        poisson_pmf(3, 2.0), rel=1e-14
    )


def test_twoparam_pmf_normalizes():
    total = math.fsum(twoparam_skellam_pmf(n, 3.0, 0.5, 1.0, 2.0) for n in range(-60, 61))
    assert total >= 1 - 1e-9


def test_twoparam_pmf_rejects_bad_inputs():
    with pytest.raises(ValueError):
        twoparam_skellam_pmf(0, math.nan, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        twoparam_skellam_pmf(0, 1.0, -1.0, 1.0, 1.0)
