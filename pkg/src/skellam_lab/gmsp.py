"""Generalized multiparameter Skellam process (GMSP).

The process is sum_j j * N_j(t) over a finite set of nonzero jumps j, with
independent multiparameter Poisson processes N_j.  This module provides exact
samplers, the probability generating / characteristic functions, moments, the
two-sided Bessel pmf of the jumps-{1,-1} case, both compound representations,
the triangular-array approximation, and a dynamic-programming lattice pmf used
as ground truth by the statistical tests (there is no closed-form pmf for a
general jump set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mpp import as_rates, as_times
from .records import SampleBatch, LatticePMF, make_rng
from .special import DEFAULT_CONTROL, SeriesControl, bessel_i, poisson_pmf

__all__ = [
    "JumpSpec",
    "TriangularArraySpec",
    "gmsp_sample",
    "gmsp_pgf",
    "gmsp_cf",
    "gmsp_moments",
    "msp_pmf",
    "gmsp_lattice_pmf",
    "scaled_poisson_convolution",
    "gmsp_compound_peraxis_sample",
    "gmsp_compound_equalrate_sample",
    "gmsp_array_sample",
]


@dataclass(frozen=True)
class JumpSpec:
    """Finite map from nonzero jump sizes to positive rate vectors.

    All rate vectors share one dimension M.  Jumps are kept sorted so that
    every consumer iterates them in one fixed order (sampler reproducibility
    depends on this).
    """

    jumps: dict

    def __post_init__(self):
        if not self.jumps:
            raise ValueError("a JumpSpec needs at least one jump")
        cleaned = {}
        dim = None
        for j in sorted(self.jumps):
            jf = float(j)
            if jf == 0.0 or not math.isfinite(jf):
                raise ValueError("jump sizes must be finite and nonzero")
            lam = as_rates(self.jumps[j])
            if dim is None:
                dim = lam.size
            elif lam.size != dim:
                raise ValueError("all rate vectors must share one dimension")
            cleaned[jf] = lam
        object.__setattr__(self, "jumps", cleaned)

    @property
    def dim(self) -> int:
        return next(iter(self.jumps.values())).size

    @property
    def jump_values(self) -> np.ndarray:
        return np.array(list(self.jumps), dtype=float)

    @property
    def rate_matrix(self) -> np.ndarray:
        """Rates as a (n_jumps, M) array, rows in sorted-jump order."""
        return np.vstack(list(self.jumps.values()))

    @property
    def integer_jumps(self) -> bool:
        return all(j == int(j) for j in self.jumps)


@dataclass(frozen=True)
class TriangularArraySpec:
    """Scale n plus the probability rule of the three-point array variables.

    ``probs(l, j, n)`` is the probability that the l-th summand on any axis
    takes the value j at scale n; with the remaining mass the summand is 0.
    """

    n: int
    probs: Callable[[int, float, int], float]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("array scale n must be at least 1")


def _jump_means(spec: JumpSpec, t) -> np.ndarray:
    tt = as_times(t, spec.dim)
    return spec.rate_matrix @ tt


def gmsp_sample(spec: JumpSpec, t, n_draws: int, seed: int) -> SampleBatch:
    """Draw sum_j j * Poisson(rates_j . t) with independent counts per jump."""
    mus = _jump_means(spec, t)
    rng = make_rng(seed)
    jumps = spec.jump_values
    values = np.zeros(n_draws, dtype=float)
    for j, mu in zip(jumps, mus):
        values += j * rng.poisson(mu, n_draws)
    if spec.integer_jumps:
        values = values.astype(np.int64)
    meta = {"process": "gmsp", "jumps": {j: list(map(float, r)) for j, r in spec.jumps.items()},
            "t": [float(x) for x in as_times(t, spec.dim)], "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)


def gmsp_pgf(spec: JumpSpec, t, u: float) -> float:
    """E[u^S(t)] = exp(sum_j (rates_j . t)(u^j - 1)) for 0 < u <= 1."""
    if not 0.0 < u <= 1.0:
        raise ValueError("the pgf argument must lie in (0, 1]")
    mus = _jump_means(spec, t)
    return float(np.exp(np.sum(mus * (u ** spec.jump_values - 1.0))))


def gmsp_cf(spec: JumpSpec, t, u: float) -> complex:
    """E[exp(iuS(t))] = exp(sum_j (rates_j . t)(e^{iuj} - 1)); modulus <= 1."""
    mus = _jump_means(spec, t)
    return complex(np.exp(np.sum(mus * (np.exp(1j * u * spec.jump_values) - 1.0))))


def gmsp_moments(spec: JumpSpec, s, t):
    """(mean at t, variance at t, covariance between s and t)."""
    ss = as_times(s, spec.dim)
    tt = as_times(t, spec.dim)
    jumps = spec.jump_values
    rates = spec.rate_matrix
    mus_t = rates @ tt
    mean = float(np.sum(jumps * mus_t))
    var = float(np.sum(jumps**2 * mus_t))
    cov = float(np.sum(jumps**2 * (rates @ np.minimum(ss, tt))))
    return mean, var, cov


def skellam_bessel_pmf(n: int, a: float, b: float) -> float:
    """e^{-(a+b)} (a/b)^{n/2} I_{|n|}(2 sqrt(ab)) for Poisson means a, b > 0.

    The power is evaluated as exp((n/2)(ln a - ln b)) so that n and -n are
    treated symmetrically.  The prefactor can dwarf a tiny Bessel value, so
    the series tolerance is tightened by the prefactor scale: the default
    absolute rule alone would leave an error far above the 1e-14 target after
    multiplication.
    """
    n = int(n)
    x = 2.0 * math.sqrt(a * b)
    log_pref = -(a + b) + 0.5 * n * (math.log(a) - math.log(b))
    # log of prefactor * e^x bounds the product of prefactor and Bessel scale
    log_scale = log_pref + x
    tol = DEFAULT_CONTROL.abs_tol * math.exp(-max(0.0, log_scale))
    ctl = SeriesControl(abs_tol=max(tol, 1e-300), max_terms=DEFAULT_CONTROL.max_terms)
    return math.exp(log_pref) * bessel_i(abs(n), x, ctl)


def msp_pmf(n: int, rates1, rates2, t) -> float:
    """Two-sided pmf of N_1(t) - N_2(t) for independent processes.

    With a = rates1 . t and b = rates2 . t this is the Bessel form
    e^{-(a+b)} (a/b)^{n/2} I_{|n|}(2 sqrt(ab)); if either mean vanishes the law
    degenerates to a (possibly negated) Poisson.
    """
    lam1 = as_rates(rates1)
    lam2 = as_rates(rates2)
    tt = as_times(t, lam1.size)
    if lam2.size != lam1.size:
        raise ValueError("rate vectors must share one dimension")
    a = float(lam1 @ tt)
    b = float(lam2 @ tt)
    n = int(n)
    if b == 0.0:
        return poisson_pmf(n, a)
    if a == 0.0:
        return poisson_pmf(-n, b)
    return skellam_bessel_pmf(n, a, b)


def _poisson_table(mu: float, tail: float) -> np.ndarray:
    """Pmf table p_0..p_K with P{X > K} <= tail, by the pmf recurrence."""
    if mu == 0.0:
        return np.array([1.0])
    probs = [math.exp(-mu)]
    cum = probs[0]
    k = 0
    while 1.0 - cum > tail:
        k += 1
        probs.append(probs[-1] * mu / k)
        cum += probs[-1]
    return np.asarray(probs)


def scaled_poisson_convolution(jump_mus: dict, tail_mass: float = 1e-12) -> LatticePMF:
    """Exact lattice law of sum_j j * Poisson(mu_j) over integer jumps j.

    Each Poisson factor is truncated so its own tail is at most
    tail_mass / n_jumps, embedded on the integer lattice at spacing |j|, and
    the factors are convolved.  The discarded mass is reported in the result.
    """
    if not jump_mus:
        raise ValueError("need at least one (jump, mean) pair")
    share = tail_mass / len(jump_mus)
    probs = np.array([1.0])
    start = 0
    for j in sorted(jump_mus):
        if j != int(j) or j == 0:
            raise ValueError("lattice pmf requires nonzero integer jumps")
        j = int(j)
        mu = float(jump_mus[j])
        if mu < 0:
            raise ValueError("Poisson means must be nonnegative")
        table = _poisson_table(mu, share)
        k_max = table.size - 1
        scaled = np.zeros(abs(j) * k_max + 1)
        if j > 0:
            scaled[::j] = table
        else:
            scaled[::-j] = table[::-1]
            start += j * k_max
        probs = np.convolve(probs, scaled)
    return LatticePMF(start=start, probs=probs, tail_mass=max(0.0, 1.0 - float(probs.sum())))


def gmsp_lattice_pmf(spec: JumpSpec, t, tail_mass: float = 1e-12) -> LatticePMF:
    """Lattice pmf of the process at time t (integer jump sets only)."""
    if not spec.integer_jumps:
        raise ValueError("the lattice pmf is only defined for integer jump sets")
    mus = _jump_means(spec, t)
    return scaled_poisson_convolution(
        {int(j): float(mu) for j, mu in zip(spec.jump_values, mus)}, tail_mass
    )


def _compound_values(rng, counts: np.ndarray, jumps: np.ndarray, pvals: np.ndarray) -> np.ndarray:
    """sum of `counts[i]` iid jumps per draw, realized through multinomial counts."""
    cats = rng.multinomial(counts, pvals)
    return cats @ jumps


def gmsp_compound_peraxis_sample(spec: JumpSpec, t, n_draws: int, seed: int) -> SampleBatch:
    """Compound form: per axis k, a Poisson(t_k sum_j lam_k^(j)) number of iid jumps.

    The jump law on axis k puts mass lam_k^(j) / sum_j lam_k^(j) on j; summed
    over axes this equals the process in distribution.
    """
    tt = as_times(t, spec.dim)
    rng = make_rng(seed)
    jumps = spec.jump_values
    rates = spec.rate_matrix
    values = np.zeros(n_draws, dtype=float)
    for k in range(spec.dim):
        axis_rate = float(rates[:, k].sum())
        counts = rng.poisson(axis_rate * tt[k], n_draws)
        values += _compound_values(rng, counts, jumps, rates[:, k] / axis_rate)
    if spec.integer_jumps:
        values = values.astype(np.int64)
    meta = {"process": "gmsp-compound-peraxis", "t": [float(x) for x in tt], "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)


def gmsp_compound_equalrate_sample(jump_rates: dict, m: int, t, n_draws: int, seed: int) -> SampleBatch:
    """Compound form for equal rates across axes: one Poisson clock for everything.

    With rates_j = (lam^(j), ..., lam^(j)) the count N(t) is
    Poisson((sum_j lam^(j)) (t_1 + ... + t_M)) and each arrival contributes an
    iid jump with mass lam^(j) / sum lam^(j).
    """
    tt = as_times(t, int(m))
    jumps = np.array(sorted(jump_rates), dtype=float)
    lam = np.array([float(jump_rates[j]) for j in sorted(jump_rates)])
    if np.any(lam <= 0) or np.any(jumps == 0.0):
        raise ValueError("jump rates must be positive and jumps nonzero")
    total = float(lam.sum())
    rng = make_rng(seed)
    counts = rng.poisson(total * float(tt.sum()), n_draws)
    values = _compound_values(rng, counts, jumps, lam / total)
    if all(j == int(j) for j in jumps):
        values = values.astype(np.int64)
    meta = {"process": "gmsp-compound-equalrate",
            "jump_rates": {float(j): float(jump_rates[j]) for j in sorted(jump_rates)},
            "m": int(m), "t": [float(x) for x in tt], "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)


def grouped_threepoint_sums(rng, prob_rows: np.ndarray, jumps: np.ndarray, n_draws: int) -> np.ndarray:
    """Sum of independent three-point variables with per-row jump probabilities.

    Row l of ``prob_rows`` gives P{X_l = jumps[c]}; the remaining mass puts
    X_l at 0.  Rows with identical probabilities are grouped and realized as
    one multinomial (the sum of identically distributed summands only depends
    on their category counts), which keeps scale-10^3 arrays cheap.
    """
    if np.any(prob_rows < 0.0) or np.any(prob_rows >= 1.0):
        raise ValueError("three-point probabilities must lie in [0, 1)")
    row_sums = prob_rows.sum(axis=1)
    if np.any(row_sums >= 1.0):
        raise ValueError("jump probabilities must sum below 1 for every summand")
    values = np.zeros(n_draws, dtype=float)
    rows, counts = np.unique(prob_rows, axis=0, return_counts=True)
    for row, mult in zip(rows, counts):
        pvals = np.append(row, 1.0 - row.sum())
        cats = rng.multinomial(int(mult), pvals, size=n_draws)
        values += cats[:, :-1] @ jumps
    return values


def gmsp_array_sample(spec: TriangularArraySpec, jumps, t, n_draws: int, seed: int) -> SampleBatch:
    """Triangular-array partial sums S^(n)(t) = sum_k sum_{l<=[n t_k]} X^(n)_l.

    Each summand takes value j with probability ``spec.probs(l, j, spec.n)``
    and 0 otherwise; as n grows these sums converge in law to the GMSP whose
    jump means the rule accumulates.
    """
    tt = as_times(t)
    jump_vals = np.array(sorted(float(j) for j in jumps))
    if np.any(jump_vals == 0.0):
        raise ValueError("jumps must be nonzero")
    rng = make_rng(seed)
    values = np.zeros(n_draws, dtype=float)
    for tk in tt:
        n_summands = int(math.floor(spec.n * tk))
        if n_summands == 0:
            continue
        rows = np.array([[spec.probs(l, j, spec.n) for j in jump_vals]
                         for l in range(1, n_summands + 1)])
        values += grouped_threepoint_sums(rng, rows, jump_vals, n_draws)
    if all(j == int(j) for j in jump_vals):
        values = values.astype(np.int64)
    meta = {"process": "gmsp-array", "scale": int(spec.n),
            "t": [float(x) for x in tt], "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)
