"""Order-statistics primitives: top-k sums, ranked-range sums, and their
variational (difference-of-convex) reformulations.

All functions are pure and operate on a 1-D set of finite real values.
Ranking ties are broken by ascending original index throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def _as_values(values) -> np.ndarray:
    arr = np.asarray(getattr(values, "values", values), dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a non-empty 1-D value set, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("value set contains non-finite entries")
    return arr


@dataclass(frozen=True)
class ValueSet:
    """An ordered collection of finite real loss/score values."""

    values: np.ndarray

    def __init__(self, values):
        object.__setattr__(self, "values", _as_values(values))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class RankedRange:
    """A pair (m, k) naming the consecutive sorted slice from rank m+1 to k.

    m counts excluded top values; validity against a set size n is checked
    at the use site via ``validate``.
    """

    m: int
    k: int

    def __post_init__(self):
        if self.m < 0 or self.k <= self.m:
            raise ValueError(f"need 0 <= m < k, got m={self.m}, k={self.k}")

    def validate(self, n: int) -> "RankedRange":
        if self.k > n:
            raise ValueError(f"rank k={self.k} exceeds set size n={n}")
        return self

    @property
    def width(self) -> int:
        return self.k - self.m


def sort_descending(values) -> np.ndarray:
    """Sort a copy in descending order, ties by ascending original index."""
    arr = _as_values(values)
    # stable sort on -arr keeps the earliest index first among ties
    return arr[np.argsort(-arr, kind="stable")]


def top_k_sum(values, k: int) -> float:
    """Sum of the k largest entries (empty sum for k=0)."""
    arr = _as_values(values)
    n = arr.size
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range for value set of size n={n}")
    if k == 0:
        return 0.0
    return float(np.sum(sort_descending(arr)[:k]))


def ranked_range_sum(values, r: RankedRange) -> float:
    """Sum of sorted values from rank m+1 through k.

    Computed as the difference of two top sums so the identity with
    ``top_k_sum`` holds exactly, in the same summation order.
    """
    arr = _as_values(values)
    r.validate(arr.size)
    return top_k_sum(arr, r.k) - top_k_sum(arr, r.m)


def ranked_range_average(values, r: RankedRange) -> float:
    """Average over the (m, k) ranked range: ranked_range_sum / (k - m)."""
    return ranked_range_sum(values, r) / r.width


def topk_variational_objective(values, k: int, lam: float) -> float:
    """Evaluate k*lam + sum_i [s_i - lam]_+.

    Minimized over lam this equals ``top_k_sum(values, k)``, attained at
    lam = k-th largest value.
    """
    arr = _as_values(values)
    if not 0 <= k <= arr.size:
        raise ValueError(f"k={k} out of range for value set of size n={arr.size}")
    return float(k * lam + np.sum(np.maximum(arr - lam, 0.0)))


def bottom_sum_variational(values, m: int, lam: float) -> float:
    """Evaluate (n-m)*lam - sum_i [lam - s_i]_+.

    Maximized over lam this equals the sum of all but the m largest values,
    attained at lam = m-th largest value (any lam >= max for m = 0).
    """
    arr = _as_values(values)
    n = arr.size
    if not 0 <= m < n:
        raise ValueError(f"m={m} out of range for value set of size n={n}")
    return float((n - m) * lam - np.sum(np.maximum(lam - arr, 0.0)))


def bilevel_corner_oracle(values, r: RankedRange, max_n: int = 20) -> float:
    """Brute-force ranked-range sum via corner enumeration.

    Minimizes over all binary selections q with exactly n-m ones of the
    inner problem min_lam (k-m)*lam + sum_{i in q} [s_i - lam]_+, whose
    value is the top-(k-m) sum of the selected entries.  Requires
    non-negative values and small n; used as an independent test oracle.
    """
    arr = _as_values(values)
    n = arr.size
    r.validate(n)
    if np.any(arr < 0):
        raise ValueError("corner oracle requires non-negative values")
    if n > max_n:
        raise ValueError(f"n={n} exceeds brute-force guard max_n={max_n}")
    best = np.inf
    for keep in itertools.combinations(range(n), n - r.m):
        inner = top_k_sum(arr[list(keep)], r.width)
        if inner < best:
            best = inner
    return float(best)
