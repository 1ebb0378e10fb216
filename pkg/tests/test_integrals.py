"""Rectangle integrals: samplers, closed-form CFs, uniform-compound identities."""

import math

import numpy as np
import pytest

from skellam_lab import (
    CompoundSpec,
    JumpSpec,
    RectDomain,
    empirical_cf,
    integral_cf_levy,
    integral_cf_mpp,
    integral_sample,
    ks_two_sample,
    mpp_sample_grid,
    riemann_sum,
    uniform_compound_sample,
)
from skellam_lab.records import SampleBatch


def test_rect_domain_validation():
    dom = RectDomain(t=[1.0, 2.0], resolution=4)
    assert dom.resolution.tolist() == [4, 4]
    with pytest.raises(ValueError):
        RectDomain(t=[1.0], resolution=[0])
    with pytest.raises(ValueError):
        RectDomain(t=[1.0], resolution=[2, 2])


def test_zero_volume_gives_exact_zeros():
    dom = RectDomain(t=[1.0, 0.0], resolution=8)
    batch = integral_sample([1.0, 1.0], dom, 30, seed=0)
    assert np.all(batch.values == 0.0)


def test_integral_mean_one_dimensional():
    dom = RectDomain(t=[2.0], resolution=256)
    batch = integral_sample([1.0], dom, 20_000, seed=5)
    # Var of the integral is lam t^3 / 3; the lattice sum has upper bias lam t^2 / (2r)
    se = math.sqrt(8.0 / 3.0 / batch.n)
    assert abs(batch.values.mean() - 2.0) < 5 * se + 2.0 / 256


def test_integral_mean_two_dimensional():
    lam, t = [1.0, 0.5], [1.5, 1.0]
    dom = RectDomain(t=t, resolution=128)
    batch = integral_sample(lam, dom, 20_000, seed=6)
    exact = sum(lam[k] * t[k] ** 2 * np.prod(np.delete(t, k)) / 2 for k in range(2))
    se = batch.values.std() / math.sqrt(batch.n)
    assert abs(batch.values.mean() - exact) < 5 * se + 0.05


def test_integral_sample_chunking_is_stream_stable():
    dom = RectDomain(t=[1.0, 1.0], resolution=32)
    long = integral_sample([1.0, 0.5], dom, 5000, seed=9)
    longer = integral_sample([1.0, 0.5], dom, 8192, seed=9)
    assert np.array_equal(long.values, longer.values[:5000])


def test_riemann_sum_decomposes_over_axes():
    # the lattice sum of an additive path splits into per-axis edge sums
    t = np.array([1.5, 1.0])
    r = 16
    axes = [np.linspace(0.0, tk, r + 1) for tk in t]
    for seed in range(10):
        path = mpp_sample_grid((0.9, 1.4), axes, seed=seed)
        literal = riemann_sum(path, upper=t)
        edge_sums = [
            path.values[1:, 0].sum() * (t[0] / r),
            path.values[0, 1:].sum() * (t[1] / r),
        ]
        factorized = t[1] * edge_sums[0] + t[0] * edge_sums[1]
        assert literal == pytest.approx(factorized, rel=1e-12)


def test_riemann_sum_validates_axes():
    path = mpp_sample_grid((1.0,), [np.array([0.5, 1.0])], seed=0)
    with pytest.raises(ValueError):
        riemann_sum(path)


def test_refinement_bound_on_one_path():
    # coarse upper sums dominate refined ones; the gap is at most one cell layer
    t = 2.0
    r = 64
    axes = [np.linspace(0.0, t, 2 * r + 1)]
    for seed in range(10):
        fine = mpp_sample_grid((1.3,), axes, seed=seed)
        s_fine = riemann_sum(fine)
        coarse_vals = fine.values[::2]
        coarse = type(fine)(axes=(axes[0][::2],), values=coarse_vals, seed=seed)
        s_coarse = riemann_sum(coarse)
        layer = (t / (2 * r)) * fine.values[-1]
        assert -1e-12 <= s_coarse - s_fine <= layer + 1e-12


def test_refinement_bound_two_dimensional():
    t = np.array([1.5, 1.0])
    r = 32
    axes = [np.linspace(0.0, tk, 2 * r + 1) for tk in t]
    for seed in range(5):
        fine = mpp_sample_grid((1.0, 0.7), axes, seed=seed)
        s_fine = riemann_sum(fine)
        coarse = type(fine)(
            axes=(axes[0][::2], axes[1][::2]), values=fine.values[::2, ::2], seed=seed
        )
        s_coarse = riemann_sum(coarse)
        corner = fine.values[-1, -1]
        layer = sum(
            (t[k] / (2 * r)) * float(np.prod(np.delete(t, k))) * corner for k in range(2)
        )
        assert -1e-12 <= s_coarse - s_fine <= layer + 1e-12


def test_cf_at_zero_and_modulus():
    assert integral_cf_mpp([1.0, 2.0], [1.0, 0.5], 0.0) == 1.0
    for u in np.arange(-3.0, 3.01, 0.5):
        assert abs(integral_cf_mpp([1.0, 2.0], [1.0, 0.5], u)) <= 1.0 + 1e-12


def test_cf_derivative_reproduces_mean():
    lam, t = [1.0, 0.5], [1.5, 1.0]
    h = 1e-5
    fd = (integral_cf_mpp(lam, t, h) - integral_cf_mpp(lam, t, -h)) / (2 * h)
    mean = sum(lam[k] * t[k] ** 2 * np.prod(np.delete(t, k)) / 2 for k in range(2))
    assert (fd / 1j).real == pytest.approx(mean, abs=1e-6)


def test_cf_against_quadrature_oracle():
    x = np.linspace(0.0, 1.0, 10_001)
    oracle = np.exp(np.trapezoid(np.exp(1j * x) - 1.0, x))
    assert abs(integral_cf_mpp([1.0], [1.0], 1.0) - oracle) < 1e-8


def test_levy_route_matches_poisson_closed_form():
    lam, t = [1.0, 0.5], [1.5, 1.0]
    psis = [lambda v, l=l: l * (np.exp(1j * v) - 1.0) for l in lam]
    for u in (0.0, 0.3, 1.0, 2.0):
        assert abs(integral_cf_levy(psis, t, u) - integral_cf_mpp(lam, t, u)) < 1e-9


def test_levy_route_drift():
    value = integral_cf_levy([lambda v: 1j * v], [1.0], 1.0)
    assert value == pytest.approx(np.exp(1j * 0.5), abs=1e-10)


def test_levy_route_rejects_nonvanishing_logcf():
    with pytest.raises(ValueError):
        integral_cf_levy([lambda v: 1.0 + 0j], [1.0], 1.0)


def test_empirical_cf_of_integral_matches_closed_form():
    dom = RectDomain(t=[2.0], resolution=512)
    batch = integral_sample([1.0], dom, 20_000, seed=7)
    table = empirical_cf(batch, [0.25, 0.5, 1.0])
    for u, v, rad in zip(table.u, table.values, table.radius):
        assert abs(v - integral_cf_mpp([1.0], [2.0], u)) < rad


def test_uniform_compound_zero_time():
    batch = uniform_compound_sample(
        "compound-mpp",
        {"rates": [1.0], "values": [1.0], "probs": [1.0], "t": [0.0]},
        20,
        seed=0,
    )
    assert np.all(batch.values == 0.0)


def test_uniform_compound_rejects_mismatched_params():
    with pytest.raises(ValueError):
        uniform_compound_sample("compound-mpp", {"rates": [1.0], "t": [1.0]}, 5, seed=0)
    with pytest.raises(ValueError):
        uniform_compound_sample("gmsp-peraxis", {"spec": "nope", "t": [1.0]}, 5, seed=0)
    with pytest.raises(ValueError):
        uniform_compound_sample("no-such-kind", {}, 5, seed=0)
    with pytest.raises(ValueError):
        uniform_compound_sample(
            "gmsp-peraxis",
            {"spec": JumpSpec({1: (1.0,)}), "t": [1.0], "extra": 3},
            5,
            seed=0,
        )


def test_uniform_compound_matches_compound_integral_ks():
    rates, t = [0.8, 0.5], [1.2, 1.0]
    vals, probs = [1.0, -1.0, 2.0], [0.5, 0.3, 0.2]
    dom = RectDomain(t=t, resolution=512)
    a = integral_sample(CompoundSpec(rates, vals, probs), dom, 20_000, seed=11)
    b = uniform_compound_sample(
        "compound-mpp", {"rates": rates, "values": vals, "probs": probs, "t": t}, 20_000, seed=12
    )
    report = ks_two_sample(a, b)
    assert report.verdict, f"KS p={report.p_value}"


GMSP_EQ = JumpSpec({1: (0.7, 0.7), -1: (0.5, 0.5), 2: (0.2, 0.2)})


def test_peraxis_and_printed_forms_coincide():
    t = [1.2, 1.0]
    a = uniform_compound_sample("gmsp-peraxis", {"spec": GMSP_EQ, "t": t}, 5000, seed=14)
    b = uniform_compound_sample(
        "gmsp-peraxis", {"spec": GMSP_EQ, "t": t, "form": "printed"}, 5000, seed=14
    )
    assert np.allclose(a.values, b.values, rtol=0, atol=1e-12)


def test_gmsp_integral_matches_uniform_forms_ks():
    t = [1.2, 1.0]
    dom = RectDomain(t=t, resolution=512)
    g = integral_sample(GMSP_EQ, dom, 20_000, seed=13)
    f3 = uniform_compound_sample("gmsp-peraxis", {"spec": GMSP_EQ, "t": t}, 20_000, seed=14)
    f2 = uniform_compound_sample(
        "gmsp-equalrate", {"jump_rates": {1: 0.7, -1: 0.5, 2: 0.2}, "m": 2, "t": t}, 20_000, seed=15
    )
    assert ks_two_sample(g, f3).verdict
    assert ks_two_sample(g, f2).verdict


def test_gmsp_integral_matches_per_axis_one_parameter_integrals():
    # integral of the GMSP vs sum_k prod_{k'!=k} t_k' * (1-d integral of GSP_k)
    t = [1.2, 1.0]
    dom = RectDomain(t=t, resolution=512)
    g = integral_sample(GMSP_EQ, dom, 20_000, seed=13)
    per_axis = np.zeros(20_000)
    for k in range(2):
        spec_k = JumpSpec({j: (lam[k],) for j, lam in GMSP_EQ.jumps.items()})
        axis_dom = RectDomain(t=[t[k]], resolution=512)
        draws = integral_sample(spec_k, axis_dom, 20_000, seed=100 + k)
        per_axis += float(np.prod(np.delete(t, k))) * draws.values
    report = ks_two_sample(g, SampleBatch(per_axis, seed=0))
    assert report.verdict, f"KS p={report.p_value}"


def test_cf_refinement_convergence():
    # the empirical CF of the lattice integral approaches the exact CF as r
    # doubles; coarse resolutions keep discretization above sampling noise
    lam, t = [1.0], [2.0]
    u_grid = [0.25, 0.5, 1.0]
    gaps = []
    for r in (8, 16, 32):
        batch = integral_sample(lam, RectDomain(t=t, resolution=r), 40_000, seed=21)
        table = empirical_cf(batch, u_grid)
        exact = np.array([integral_cf_mpp(lam, t, u) for u in u_grid])
        gaps.append(float(np.max(np.abs(table.values - exact))))
    assert gaps[0] > gaps[1] > gaps[2]
