"""Statistical verification engine: empirical CFs, chi-square, KS, TV.

Every test here is deterministic given its inputs; randomness lives entirely
in the sample batches, which carry their own seeds.  Statistical levels are
chosen loose (1e-3 in the identity suites) because the identities under test
are exact, so power is not the bottleneck but flakes are.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .records import SampleBatch, LatticePMF, CFTable

__all__ = [
    "TestReport",
    "empirical_cf",
    "lattice_chi2",
    "lattice_chi2_two_sample",
    "ks_two_sample",
    "tv_distance",
]


@dataclass(frozen=True)
class TestReport:
    """Outcome of one verification: statistic, p-value or critical gap, verdict."""

    __test__ = False  # not a pytest collectible despite the name

    identity: str
    statistic: float
    p_value: float | None
    n_samples: int
    seed: int
    verdict: bool
    level: float | None = None
    critical: float | None = None

    def __post_init__(self):
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p-value must lie in [0, 1]")
        if self.p_value is not None and self.level is not None:
            if self.verdict != (self.p_value > self.level):
                raise ValueError("verdict inconsistent with p-value and level")
        if self.p_value is None and self.critical is not None:
            if self.verdict != (self.statistic <= self.critical):
                raise ValueError("verdict inconsistent with statistic and critical value")

    def to_json_dict(self) -> dict:
        return {
            "identity": self.identity,
            "statistic": float(self.statistic),
            "p_value": None if self.p_value is None else float(self.p_value),
            "n": int(self.n_samples),
            "seed": int(self.seed),
            "verdict": "pass" if self.verdict else "fail",
        }


def empirical_cf(batch: SampleBatch, u_grid) -> CFTable:
    """Empirical CF (1/N) sum_r e^{iuX_r} with confidence radius 4/sqrt(N)."""
    if batch.n == 0:
        raise ValueError("empty batch")
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    x = np.asarray(batch.values, dtype=float)
    values = np.empty(u.size, dtype=complex)
    for i, ui in enumerate(u):  # one frequency at a time keeps N=1e5 grids cheap
        values[i] = np.exp(1j * ui * x).mean()
    radius = np.full(u.size, 4.0 / np.sqrt(batch.n))
    return CFTable(u=u, values=values, radius=radius)


def _integer_values(batch: SampleBatch) -> np.ndarray:
    v = np.asarray(batch.values)
    if not np.all(v == np.round(v)):
        raise ValueError("lattice tests need integer-valued batches")
    return v.astype(np.int64)


def _merge_bins(expected: np.ndarray, min_expected: float) -> list[tuple[int, int]]:
    """Contiguous [i, j) cell ranges, merged outward until each expects enough."""
    bins = []
    start = 0
    acc = 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= min_expected:
            bins.append((start, i + 1))
            start = i + 1
            acc = 0.0
    if start < expected.size or acc > 0.0:
        if bins:
            s, _ = bins.pop()
            bins.append((s, expected.size))
        else:
            bins.append((0, expected.size))
    return bins


def _bin_counts(values: np.ndarray, support_start: int, n_cells: int,
                bins: list[tuple[int, int]]) -> np.ndarray:
    """Observed counts per merged bin; the end bins absorb out-of-table values."""
    idx = values - support_start
    counts = np.zeros(len(bins))
    cell_counts = np.bincount(np.clip(idx, 0, n_cells - 1), minlength=n_cells)
    for b, (i, j) in enumerate(bins):
        counts[b] = cell_counts[i:j].sum()
    return counts


def lattice_chi2(batch: SampleBatch, pmf: LatticePMF, level: float = 1e-3,
                 min_expected: float = 5.0, identity: str = "lattice-chi2") -> TestReport:
    """Pearson chi-square of an integer batch against a closed-form lattice pmf."""
    values = _integer_values(batch)
    n = values.size
    probs = pmf.probs.copy()
    probs[-1] += pmf.tail_mass  # a DP table leaves <= tail_mass outside
    expected = n * probs
    bins = _merge_bins(expected, min_expected)
    if not bins or expected.sum() <= 0:
        raise ValueError("not enough expected mass to bin")
    observed = _bin_counts(values, pmf.start, probs.size, bins)
    exp_binned = np.array([expected[i:j].sum() for i, j in bins])
    stat = float(np.sum((observed - exp_binned) ** 2 / exp_binned))
    dof = len(bins) - 1
    if dof == 0:
        p = 1.0 if stat < 1e-12 else 0.0
    else:
        p = float(sps.chi2.sf(stat, dof))
    return TestReport(identity=identity, statistic=stat, p_value=p, n_samples=n,
                      seed=batch.seed, verdict=p > level, level=level)


def lattice_chi2_two_sample(a: SampleBatch, b: SampleBatch, level: float = 1e-3,
                            min_expected: float = 5.0,
                            identity: str = "lattice-chi2-2s") -> TestReport:
    """Two-sample chi-square for equality of two integer-valued laws."""
    va = _integer_values(a)
    vb = _integer_values(b)
    lo = int(min(va.min(), vb.min()))
    hi = int(max(va.max(), vb.max()))
    cells = hi - lo + 1
    ca = np.bincount(va - lo, minlength=cells).astype(float)
    cb = np.bincount(vb - lo, minlength=cells).astype(float)
    na, nb = va.size, vb.size
    pooled = (ca + cb) / (na + nb)
    # merge until the smaller sample expects enough in every bin
    bins = _merge_bins(min(na, nb) * pooled, min_expected)
    stat = 0.0
    for i, j in bins:
        p = pooled[i:j].sum()
        for cnt, n in ((ca, na), (cb, nb)):
            e = n * p
            o = cnt[i:j].sum()
            stat += (o - e) ** 2 / e
    dof = len(bins) - 1
    if dof == 0:
        p_val = 1.0 if stat < 1e-12 else 0.0
    else:
        p_val = float(sps.chi2.sf(stat, dof))
    return TestReport(identity=identity, statistic=float(stat), p_value=p_val,
                      n_samples=na + nb, seed=a.seed, verdict=p_val > level, level=level)


def ks_two_sample(a: SampleBatch, b: SampleBatch, level: float = 1e-3,
                  identity: str = "ks-2s") -> TestReport:
    """Two-sample Kolmogorov-Smirnov with the asymptotic p-value."""
    if a.n == 0 or b.n == 0:
        raise ValueError("empty batch")
    res = sps.ks_2samp(np.asarray(a.values, float), np.asarray(b.values, float),
                       method="asymp")
    p = float(res.pvalue)
    return TestReport(identity=identity, statistic=float(res.statistic), p_value=p,
                      n_samples=a.n + b.n, seed=a.seed, verdict=p > level, level=level)


def tv_distance(batch: SampleBatch, pmf: LatticePMF) -> float:
    """Half the l1 gap between the empirical law and a lattice pmf.

    Computed over the pmf's truncated support; empirical mass outside the
    table and the table's own tail mass are added in full (they cannot
    overlap less than that).
    """
    values = _integer_values(batch)
    n = values.size
    idx = values - pmf.start
    inside = (idx >= 0) & (idx < pmf.probs.size)
    emp = np.bincount(idx[inside], minlength=pmf.probs.size) / n
    outside = float(np.count_nonzero(~inside)) / n
    return 0.5 * (float(np.abs(emp - pmf.probs).sum()) + outside + pmf.tail_mass)
