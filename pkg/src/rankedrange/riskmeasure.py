"""Empirical conditional value at risk, the interval (two-level) variant,
and a Monte Carlo check of its finite-sample deviation bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import RankedRange, _as_values, top_k_sum


@dataclass(frozen=True)
class RiskLevelPair:
    """Tail levels (nu, mu) with nu > mu, plus the support bounds [a, b]."""

    nu: float
    mu: float
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu={self.nu} outside (0, 1]")
        if not 0.0 <= self.mu < self.nu:
            raise ValueError(f"need 0 <= mu < nu, got mu={self.mu}, nu={self.nu}")
        if not self.a < self.b:
            raise ValueError(f"degenerate support [a, b] = [{self.a}, {self.b}]")


def empirical_cvar(values, alpha: float) -> float:
    """min over lam of lam + (1/(n*alpha)) * sum_i [s_i - lam]_+.

    When n*alpha is an integer k this is the mean of the top k values;
    otherwise the piecewise-linear objective is minimized exactly over its
    breakpoints (the data values).
    """
    arr = _as_values(values)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside (0, 1]")
    n = arr.size
    k_real = n * alpha
    k = int(round(k_real))
    if abs(k_real - k) < 1e-9 and k >= 1:
        return top_k_sum(arr, k) / k
    # objective is convex piecewise linear in lam with kinks at the data
    candidates = np.unique(arr)
    best = math.inf
    for lam in candidates:
        val = lam + np.sum(np.maximum(arr - lam, 0.0)) / k_real
        best = min(best, float(val))
    return best


def empirical_icvar(values, levels: RiskLevelPair) -> float:
    """nu * CVaR_nu - mu * CVaR_mu on the empirical sample.

    With integral ranks n*nu and n*mu this equals the (m, k) ranked-range
    sum divided by n; non-integral ranks fall back to the nearest integer
    rank with a warning.
    """
    arr = _as_values(values)
    n = arr.size
    for level, name in ((levels.nu, "nu"), (levels.mu, "mu")):
        if level > 0 and abs(n * level - round(n * level)) > 1e-9:
            warnings.warn(
                f"n*{name} = {n * level:.6g} is not an integer rank; "
                "using the nearest integer", stacklevel=2)
    k = int(round(n * levels.nu))
    upper = top_k_sum(arr, k) / n if k >= 1 else 0.0
    if levels.mu == 0.0:
        return upper
    m = int(round(n * levels.mu))
    lower = top_k_sum(arr, m) / n if m >= 1 else 0.0
    return upper - lower


def deviation_bound_radii(r: RankedRange, n: int, delta: float,
                          support: tuple) -> tuple:
    """The (upper, lower) deviation radii of the finite-sample bound."""
    a, b = support
    common = math.sqrt(math.log(1.0 / delta) / (2.0 * n))
    upper = (b - a) * (math.sqrt(5.0 * r.k * math.log(3.0 / delta) / n ** 2) + common)
    lower = (b - a) * (math.sqrt(5.0 * r.m * math.log(3.0 / delta) / n ** 2) + common)
    return upper, lower


def cvar_bound_check(sampler, n: int, r: RankedRange, delta: float,
                     trials: int, seed: int = 0, support: tuple = (0.0, 1.0),
                     reference_size: int = 1_000_000) -> tuple:
    """Monte Carlo violation rates of the two-sided deviation bound.

    ``sampler(rng, size)`` must draw i.i.d. values supported in
    ``support``.  The population interval-CVaR is proxied by one large
    reference sample; each trial draws n points, and the rates report how
    often the population-minus-empirical gap escapes the stated radii.
    """
    a, b = support
    if not a < b:
        raise ValueError(f"degenerate support [a, b] = [{a}, {b}]")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta={delta} outside (0, 1]")
    if trials < 100:
        raise ValueError(f"trials={trials} too few for a meaningful rate (need >= 100)")
    r.validate(n)
    nu, mu = r.k / n, r.m / n
    levels = RiskLevelPair(nu=nu, mu=mu, a=a, b=b)
    ref_rng = np.random.default_rng(seed)
    reference = sampler(ref_rng, reference_size)
    population = empirical_icvar(reference, levels)
    upper_radius, lower_radius = deviation_bound_radii(r, n, delta, support)
    upper_violations = lower_violations = 0
    for trial in range(trials):
        rng = np.random.default_rng(seed + 1 + trial)
        sample = sampler(rng, n)
        gap = population - empirical_icvar(sample, levels)
        if gap > upper_radius:
            upper_violations += 1
        if gap < -lower_radius:
            lower_violations += 1
    return upper_violations / trials, lower_violations / trials
