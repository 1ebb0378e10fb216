"""Named distributional-identity checks behind `verify` and the acceptance suite.

Each identity runs a fixed protocol (parameters pinned here) at a caller-chosen
seed and sample count and returns a :class:`TestReport`.  Exact identities
compare against a critical gap; statistical ones report a p-value at the 1e-3
level used throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .altskellam import AltSpec, alt_lattice_pmf, alt_array_sample, alt_sample, twoparam_skellam_pmf
from .fractional import (
    FracSkellamSpec,
    frac_skellam_moments,
    frac_skellam_pmf,
    frac_skellam_pmf_wright,
    frac_skellam_sample,
    inv_stable_marginal_sample,
)
from .gmsp import (
    JumpSpec,
    TriangularArraySpec,
    gmsp_array_sample,
    gmsp_cf,
    gmsp_compound_equalrate_sample,
    gmsp_compound_peraxis_sample,
    gmsp_lattice_pmf,
    gmsp_sample,
    msp_pmf,
)
from .integrals import CompoundSpec, RectDomain, integral_cf_mpp, integral_sample, uniform_compound_sample
from .records import LatticePMF
from .special import poisson_pmf
from .stats import TestReport, empirical_cf, ks_two_sample, lattice_chi2, lattice_chi2_two_sample, tv_distance

__all__ = ["IDENTITIES", "run_identity"]

LEVEL = 1e-3

# three-jump spec used by the compound-representation checks
_SPEC3 = JumpSpec({1: (0.7, 0.4), -1: (0.5, 0.6), 2: (0.2, 0.3)})
_EQ_RATES = {1: 0.7, -1: 0.5, 2: 0.2}
_EQ_SPEC = JumpSpec({j: (r, r) for j, r in _EQ_RATES.items()})
_T2 = (1.0, 1.0)


def _skellam_conv(n, a, b, terms=400):
    n_plus, n_minus = max(n, 0), max(-n, 0)
    return math.fsum(poisson_pmf(n_plus + l, a) * poisson_pmf(n_minus + l, b) for l in range(terms))


def _exact_report(identity, seed, n, gap, critical):
    return TestReport(identity=identity, statistic=float(gap), p_value=None,
                      n_samples=int(n), seed=int(seed), verdict=gap <= critical,
                      critical=critical)


def msp_bessel_oracle(seed=0, n=0):
    """Bessel pmf vs brute-force Poisson convolution, |n| <= 20."""
    gap = 0.0
    count = 0
    for la in (0.5, 1.0, 3.0):
        for lb in (0.5, 1.0, 3.0):
            for t in ((1.0, 1.0), (2.0, 0.5)):
                a = la * sum(t)
                b = lb * sum(t)
                for k in range(-20, 21):
                    conv = _skellam_conv(k, a, b)
                    gap = max(gap, abs(msp_pmf(k, (la, la), (lb, lb), t) - conv))
                    gap = max(gap, abs(twoparam_skellam_pmf(k, la, lb, t[0], t[1])
                                       - _skellam_conv(k, la * t[0], lb * t[1])))
                    count += 2
    return _exact_report("msp-bessel-oracle", seed, count, gap, 1e-10)


def cf_product(seed=0, n=0):
    """exp-sum CF equals the product of per-jump factors on a u-grid."""
    specs = [
        JumpSpec({1: (1.0, 2.0), -1: (0.5, 0.5)}),
        JumpSpec({1: (0.5,), -1: (0.25,), 2: (0.4,)}),
        JumpSpec({0.5: (1.0, 0.2), -1.5: (0.3, 0.3)}),
    ]
    gap = 0.0
    count = 0
    for spec in specs:
        t = np.full(spec.dim, 0.8)
        for u in np.arange(-3.0, 3.0 + 1e-9, 0.25):
            product = 1.0 + 0.0j
            for j, lam in spec.jumps.items():
                product *= np.exp(np.dot(lam, t) * (np.exp(1j * u * j) - 1.0))
            gap = max(gap, abs(gmsp_cf(spec, t, u) - product))
            count += 1
    return _exact_report("cf-product", seed, count, gap, 1e-12)


def compound_peraxis(seed=0, n=100_000):
    direct = gmsp_sample(_SPEC3, _T2, n, seed=seed)
    compound = gmsp_compound_peraxis_sample(_SPEC3, _T2, n, seed=seed + 1)
    return lattice_chi2_two_sample(direct, compound, level=LEVEL, identity="compound-peraxis")


def compound_equalrate(seed=0, n=100_000):
    direct = gmsp_sample(_EQ_SPEC, _T2, n, seed=seed)
    compound = gmsp_compound_equalrate_sample(_EQ_RATES, 2, _T2, n, seed=seed + 1)
    return lattice_chi2_two_sample(direct, compound, level=LEVEL, identity="compound-equalrate")


def array_gmsp(seed=0, n=4_000_000):
    """Triangular-array law approaches the GMSP law in total variation.

    Constant rule p = lam_j / scale over scales 10, 100, 1000.  The sample
    count keeps the TV estimator's noise floor (~ sqrt(atoms / n) / 2) below
    the scale-100 vs scale-1000 gap.
    """
    lam = {1: 4.0, -1: 2.5}
    target = JumpSpec({j: (l, l) for j, l in lam.items()})
    pmf = gmsp_lattice_pmf(target, _T2)
    tvs = []
    for i, scale in enumerate((10, 100, 1000)):
        arr = TriangularArraySpec(n=scale, probs=lambda l, j, sc: lam[j] / sc)
        batch = gmsp_array_sample(arr, sorted(lam), _T2, n, seed=seed + 7 * i)
        tvs.append(tv_distance(batch, pmf))
    ok = tvs[0] > tvs[1] > tvs[2] and tvs[2] < 0.02
    return TestReport(identity="array-gmsp", statistic=float(tvs[2]), p_value=None,
                      n_samples=int(n), seed=int(seed), verdict=ok, critical=0.02)


def array_alt(seed=0, n=1_000_000):
    """Kronecker-rule triangular array approaches the alternate Skellam law."""
    spec = AltSpec({1: 2.0, -1: 1.5})
    t = {1: 1.0, -1: 1.0}
    pmf = alt_lattice_pmf(spec, t)
    tvs = []
    for i, scale in enumerate((10, 100, 1000)):
        rule = lambda l, ja, j, sc=scale: (spec.rates[ja] / sc) if ja == j else 0.0
        batch = alt_array_sample(scale, rule, sorted(spec.rates), t, n, seed=seed + 7 * i)
        tvs.append(tv_distance(batch, pmf))
    ok = tvs[0] > tvs[1] > tvs[2] and tvs[2] < 0.02
    return TestReport(identity="array-alt", statistic=float(tvs[2]), p_value=None,
                      n_samples=int(n), seed=int(seed), verdict=ok, critical=0.02)


def integral_cf(seed=0, n=20_000):
    """Empirical CF of the lattice integral within 4/sqrt(n) of the closed form."""
    cases = [(np.array([1.0]), np.array([2.0])), (np.array([1.0, 0.5]), np.array([1.5, 1.0]))]
    gap = 0.0
    for i, (lam, t) in enumerate(cases):
        dom = RectDomain(t=t, resolution=512)
        batch = integral_sample(lam, dom, n, seed=seed + i)
        table = empirical_cf(batch, [0.25, 0.5, 1.0])
        for u, v in zip(table.u, table.values):
            gap = max(gap, abs(v - integral_cf_mpp(lam, t, u)))
    return _exact_report("integral-cf", seed, n, gap, 4.0 / math.sqrt(n))


def uniform_compound_mpp(seed=0, n=20_000):
    rates, t = [0.8, 0.5], [1.2, 1.0]
    vals, probs = [1.0, -1.0, 2.0], [0.5, 0.3, 0.2]
    dom = RectDomain(t=t, resolution=512)
    a = integral_sample(CompoundSpec(rates, vals, probs), dom, n, seed=seed)
    b = uniform_compound_sample("compound-mpp",
                                {"rates": rates, "values": vals, "probs": probs, "t": t},
                                n, seed=seed + 1)
    return ks_two_sample(a, b, level=LEVEL, identity="uniform-compound-mpp")


def uniform_compound_peraxis(seed=0, n=20_000):
    spec = JumpSpec({1: (0.7, 0.4), -1: (0.5, 0.6)})
    t = [1.2, 1.0]
    a = integral_sample(spec, RectDomain(t=t, resolution=512), n, seed=seed)
    b = uniform_compound_sample("gmsp-peraxis", {"spec": spec, "t": t}, n, seed=seed + 1)
    return ks_two_sample(a, b, level=LEVEL, identity="uniform-compound-peraxis")


def uniform_compound_equalrate(seed=0, n=20_000):
    t = [1.2, 1.0]
    a = integral_sample(_EQ_SPEC, RectDomain(t=t, resolution=512), n, seed=seed)
    b = uniform_compound_sample("gmsp-equalrate", {"jump_rates": _EQ_RATES, "m": 2, "t": t},
                                n, seed=seed + 1)
    return ks_two_sample(a, b, level=LEVEL, identity="uniform-compound-equalrate")


_FRAC = FracSkellamSpec(1.0, 1.0, 0.5, 0.5)


def frac_pmf(seed=0, n=100_000):
    batch = frac_skellam_sample(_FRAC, 1.0, 1.0, n, seed=seed)
    probs = np.array([frac_skellam_pmf(_FRAC, 1.0, 1.0, k) for k in range(-10, 11)])
    pmf = LatticePMF(-10, probs, tail_mass=max(0.0, 1.0 - float(probs.sum())))
    return lattice_chi2(batch, pmf, level=LEVEL, identity="frac-pmf")


def frac_wright(seed=0, n=0):
    gap = 0.0
    for k in range(-2, 3):
        gap = max(gap, abs(frac_skellam_pmf(_FRAC, 1.0, 1.0, k)
                           - frac_skellam_pmf_wright(_FRAC, 1.0, 1.0, k)))
    return _exact_report("frac-wright", seed, 5, gap, 1e-6)


_MOMENT_GRID = [(a, t) for a in (0.4, 0.6, 0.8) for t in (0.5, 1.5, 3.0)]


def _moment_zscores(seed, n, variance_form):
    z_mean = 0.0
    z_var = 0.0
    for i, (alpha, t) in enumerate(_MOMENT_GRID):
        spec = FracSkellamSpec(1.3, 0.6, alpha, alpha)
        x = frac_skellam_sample(spec, t, t, n, seed=seed + i).values.astype(float)
        mean, var = frac_skellam_moments(spec, t, t, variance_form)
        se_mean = x.std() / math.sqrt(x.size)
        z_mean = max(z_mean, abs(x.mean() - mean) / se_mean)
        s2 = x.var(ddof=1)
        m4 = float(np.mean((x - x.mean()) ** 4))
        se_var = math.sqrt(max(m4 - s2**2, 1e-300) / x.size)
        z_var = max(z_var, abs(s2 - var) / se_var)
    return z_mean, z_var


def frac_mean(seed=0, n=100_000):
    z_mean, _ = _moment_zscores(seed, n, "printed")
    return _exact_report("frac-mean", seed, n, z_mean, 5.0)


def frac_variance_printed(seed=0, n=100_000):
    _, z_var = _moment_zscores(seed, n, "printed")
    return _exact_report("frac-variance-printed", seed, n, z_var, 5.0)


def frac_variance_quadratic(seed=0, n=100_000):
    _, z_var = _moment_zscores(seed, n, "quadratic")
    return _exact_report("frac-variance-quadratic", seed, n, z_var, 5.0)


def inverse_subordinator_mean(seed=0, n=100_000):
    z = 0.0
    for i, alpha in enumerate((0.3, 0.5, 0.8)):
        batch = inv_stable_marginal_sample(alpha, 1.0, n, seed=seed + i)
        se = batch.values.std() / math.sqrt(batch.n)
        z = max(z, abs(batch.values.mean() - 1.0 / math.gamma(alpha + 1.0)) / se)
    return _exact_report("inverse-subordinator-mean", seed, n, z, 5.0)


def alt_twoparam(seed=0, n=100_000):
    spec = AltSpec({1: 1.0, -1: 1.0})
    t = {1: 1.2, -1: 0.7}
    batch = alt_sample(spec, t, n, seed=seed)
    probs = np.array([twoparam_skellam_pmf(k, 1.0, 1.0, 1.2, 0.7) for k in range(-12, 13)])
    pmf = LatticePMF(-12, probs, tail_mass=max(0.0, 1.0 - float(probs.sum())))
    return lattice_chi2(batch, pmf, level=LEVEL, identity="alt-twoparam")


IDENTITIES = {
    "msp-bessel-oracle": msp_bessel_oracle,
    "cf-product": cf_product,
    "compound-peraxis": compound_peraxis,
    "compound-equalrate": compound_equalrate,
    "array-gmsp": array_gmsp,
    "array-alt": array_alt,
    "integral-cf": integral_cf,
    "uniform-compound-mpp": uniform_compound_mpp,
    "uniform-compound-peraxis": uniform_compound_peraxis,
    "uniform-compound-equalrate": uniform_compound_equalrate,
    "frac-pmf": frac_pmf,
    "frac-wright": frac_wright,
    "frac-mean": frac_mean,
    "frac-variance-printed": frac_variance_printed,
    "frac-variance-quadratic": frac_variance_quadratic,
    "inverse-subordinator-mean": inverse_subordinator_mean,
    "alt-twoparam": alt_twoparam,
}


def run_identity(name: str, seed: int = 0, n: int | None = None) -> TestReport:
    if name not in IDENTITIES:
        raise ValueError(f"unknown identity {name!r}; known: {', '.join(sorted(IDENTITIES))}")
    func = IDENTITIES[name]
    if n is None:
        return func(seed=seed)
    return func(seed=seed, n=n)
