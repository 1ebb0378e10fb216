"""Alternate multiparameter Skellam process: one time coordinate per jump.

Here the process is sum_j j * N_j(t_j) with independent one-parameter Poisson
processes N_j, indexed by a time vector keyed by the jump set itself.  Time
maps are keyed by jump value rather than by position, so callers cannot
scramble the axis order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gmsp import grouped_threepoint_sums, scaled_poisson_convolution, skellam_bessel_pmf
from .records import SampleBatch, LatticePMF, make_rng
from .special import poisson_pmf

__all__ = [
    "AltSpec",
    "alt_sample",
    "alt_moments",
    "alt_increment_cf",
    "alt_pgf",
    "alt_lattice_pmf",
    "alt_array_sample",
    "twoparam_skellam_pmf",
]


@dataclass(frozen=True)
class AltSpec:
    """Finite map from nonzero jumps to one-parameter Poisson rates."""

    rates: dict

    def __post_init__(self):
        if not self.rates:
            raise ValueError("need at least one jump")
        cleaned = {}
        for j in sorted(self.rates):
            jf = float(j)
            lam = float(self.rates[j])
            if jf == 0.0 or not math.isfinite(jf):
                raise ValueError("jumps must be finite and nonzero")
            if not lam > 0:
                raise ValueError("rates must be strictly positive")
            cleaned[jf] = lam
        object.__setattr__(self, "rates", cleaned)

    @property
    def jump_values(self) -> np.ndarray:
        return np.array(list(self.rates), dtype=float)


def _time_map(spec: AltSpec, t: dict, name: str = "t") -> np.ndarray:
    if set(map(float, t)) != set(spec.rates):
        raise ValueError(f"{name} must be keyed exactly by the jump set")
    out = np.array([float(t[j]) for j in spec.rates])
    if np.any(out < 0) or not np.all(np.isfinite(out)):
        raise ValueError("times must be finite and nonnegative")
    return out


def alt_sample(spec: AltSpec, t: dict, n_draws: int, seed: int) -> SampleBatch:
    """Draw sum_j j * Poisson(lam_j t_j) with independent counts."""
    tt = _time_map(spec, t)
    rng = make_rng(seed)
    values = np.zeros(n_draws, dtype=float)
    for (j, lam), tj in zip(spec.rates.items(), tt):
        values += j * rng.poisson(lam * tj, n_draws)
    if all(j == int(j) for j in spec.rates):
        values = values.astype(np.int64)
    meta = {"process": "alt-skellam", "rates": dict(spec.rates),
            "t": {j: float(tj) for j, tj in zip(spec.rates, tt)}, "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)


def alt_moments(spec: AltSpec, s: dict, t: dict):
    """(mean, variance, covariance) of the process at s and t.

    The covariance includes the rate factor, sum_j j^2 lam_j min(s_j, t_j):
    at s = t it must reproduce the variance sum_j j^2 lam_j t_j.
    """
    ss = _time_map(spec, s, "s")
    tt = _time_map(spec, t)
    jumps = spec.jump_values
    lam = np.array(list(spec.rates.values()))
    mean = float(np.sum(jumps * lam * tt))
    var = float(np.sum(jumps**2 * lam * tt))
    cov = float(np.sum(jumps**2 * lam * np.minimum(ss, tt)))
    return mean, var, cov


def alt_increment_cf(spec: AltSpec, s: dict, t: dict, z: float) -> complex:
    """CF of the increment between ordered times s <= t (coordinate-wise)."""
    ss = _time_map(spec, s, "s")
    tt = _time_map(spec, t)
    if np.any(ss > tt):
        raise ValueError("increment requires s <= t in every coordinate")
    jumps = spec.jump_values
    lam = np.array(list(spec.rates.values()))
    return complex(np.exp(np.sum(lam * (tt - ss) * (np.exp(1j * z * jumps) - 1.0))))


def alt_pgf(spec: AltSpec, t: dict, u: float) -> float:
    """E[u^S(t)] = exp(sum_j lam_j t_j (u^j - 1)) for 0 < u <= 1."""
    if not 0.0 < u <= 1.0:
        raise ValueError("the pgf argument must lie in (0, 1]")
    tt = _time_map(spec, t)
    jumps = spec.jump_values
    lam = np.array(list(spec.rates.values()))
    return float(np.exp(np.sum(lam * tt * (u**jumps - 1.0))))


def alt_lattice_pmf(spec: AltSpec, t: dict, tail_mass: float = 1e-12) -> LatticePMF:
    """Exact lattice pmf at t for integer jump sets (convolution oracle)."""
    tt = _time_map(spec, t)
    if not all(j == int(j) for j in spec.rates):
        raise ValueError("the lattice pmf is only defined for integer jump sets")
    mus = {int(j): lam * tj for (j, lam), tj in zip(spec.rates.items(), tt)}
    return scaled_poisson_convolution(mus, tail_mass)


def alt_array_sample(
    scale: float,
    probs: Callable[[int, float, float], float],
    jumps,
    t: dict,
    n_draws: int,
    seed: int,
) -> SampleBatch:
    """Triangular-array sums U(t) = sum_j sum_{l<=[scale t_j]} X_l per jump axis.

    ``probs(l, j_axis, j)`` gives the probability that the l-th summand on the
    axis labelled j_axis equals jump j; with the residual mass it is 0.
    """
    jump_vals = np.array(sorted(float(j) for j in jumps))
    if np.any(jump_vals == 0.0):
        raise ValueError("jumps must be nonzero")
    if set(map(float, t)) != set(jump_vals.tolist()):
        raise ValueError("t must be keyed exactly by the jump set")
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = make_rng(seed)
    values = np.zeros(n_draws, dtype=float)
    for j_axis in jump_vals:
        n_summands = int(math.floor(scale * float(t[j_axis])))
        if n_summands == 0:
            continue
        rows = np.array([[probs(l, j_axis, j) for j in jump_vals]
                         for l in range(1, n_summands + 1)])
        values += grouped_threepoint_sums(rng, rows, jump_vals, n_draws)
    if all(j == int(j) for j in jump_vals):
        values = values.astype(np.int64)
    meta = {"process": "alt-array", "scale": float(scale),
            "t": {float(j): float(t[j]) for j in jump_vals}, "n": int(n_draws)}
    return SampleBatch(values=values, seed=int(seed), meta=meta)


def twoparam_skellam_pmf(n: int, lam1: float, lam2: float, t1: float, t2: float) -> float:
    """Pmf of N_1(t1) - N_2(t2) for independent Poisson processes.

    e^{-lam1 t1 - lam2 t2} (lam1 t1 / lam2 t2)^{n/2} I_{|n|}(2 sqrt(lam1 lam2 t1 t2)),
    degenerating to a (negated) Poisson when either product vanishes.
    """
    for name, v in (("lam1", lam1), ("lam2", lam2), ("t1", t1), ("t2", t2)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite")
    if lam1 <= 0 or lam2 <= 0:
        raise ValueError("rates must be strictly positive")
    if t1 < 0 or t2 < 0:
        raise ValueError("times must be nonnegative")
    a = lam1 * t1
    b = lam2 * t2
    n = int(n)
    if b == 0.0:
        return poisson_pmf(n, a)
    if a == 0.0:
        return poisson_pmf(-n, b)
    return skellam_bessel_pmf(n, a, b)
