"""Tail sums, infinite products and product differences in binary64.

The tables of truncation levels sit on thresholds as small as ``5e-13``, so
products are always carried as sums of ``log1p`` terms and differences of
nearly equal products go through ``expm1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DivergenceError, InvalidParameterError

DEFAULT_CUTOFF = 1000


@dataclass(frozen=True)
class TailBracket:
    """Integral bracket ``lower <= sum_{j=k+1}^s j^{-r} <= upper``."""

    lower: float
    upper: float
    exact: Optional[float] = None


def _antiderivative_tail(x: float, r: float) -> float:
    # int_x^inf t^{-r} dt, r > 1
    return x ** (1.0 - r) / (r - 1.0)


def _integral(lo: float, hi: float, r: float) -> float:
    if hi <= lo:
        return 0.0
    if r == 1.0:
        return math.log(hi / lo)
    return (lo ** (1.0 - r) - hi ** (1.0 - r)) / (r - 1.0)


def power_terms(r: float, start: int, stop: int) -> np.ndarray:
    """``j^{-r}`` for ``j = start+1, ..., stop`` as a float array."""
    j = np.arange(start + 1, stop + 1, dtype=np.float64)
    return j ** (-r)


def tail_sum_poly(r: float, k: int, s: Union[int, float] = math.inf) -> TailBracket:
    """Bracket ``sum_{j=k+1}^{s} j^{-r}``.

    For ``s = inf`` the bracket is ``[(k+1)^{1-r}, (k+1/2)^{1-r}] / (r-1)``.
    For finite ``s`` both integrals are cut at the matching endpoint beyond
    ``s`` and the exact partial sum is added, accumulated smallest term first.
    """
    if r <= 0:
        raise InvalidParameterError(f"decay exponent must be positive, got {r}")
    if k < 0:
        raise InvalidParameterError(f"k must be nonnegative, got {k}")
    if math.isinf(s):
        if r <= 1:
            raise DivergenceError(f"sum of j^-{r} diverges")
        return TailBracket(
            lower=_antiderivative_tail(k + 1.0, r),
            upper=_antiderivative_tail(k + 0.5, r),
        )
    s = int(s)
    if k > s:
        raise InvalidParameterError(f"k={k} exceeds s={s}")
    if k == s:
        return TailBracket(0.0, 0.0, 0.0)
    terms = power_terms(r, k, s)
    exact = float(np.sum(terms[::-1]))
    return TailBracket(
        lower=_integral(k + 1.0, s + 1.0, r),
        upper=_integral(k + 0.5, s + 0.5, r),
        exact=exact,
    )


def infinite_product_upper(r: float, c: float, cutoff: int = DEFAULT_CUTOFF) -> float:
    """Upper bound on ``prod_{j>=1} (1 + c j^{-r})``.

    The first ``cutoff`` factors are multiplied out (as a sum of ``log1p``);
    the rest are bounded by ``exp(c * int_{cutoff+1/2}^inf x^{-r} dx)``.
    """
    if r <= 1:
        raise DivergenceError(f"prod (1 + c j^-{r}) diverges for r <= 1")
    if c <= 0:
        raise InvalidParameterError(f"scale must be positive, got {c}")
    if cutoff < 0:
        raise InvalidParameterError(f"cutoff must be nonnegative, got {cutoff}")
    head = np.log1p(c * power_terms(r, 0, cutoff))
    log_head = float(np.sum(head[::-1]))
    return math.exp(log_head + c * _antiderivative_tail(cutoff + 0.5, r))


def partial_product(r: float, c: float, n: int) -> float:
    """``prod_{j=1}^{n} (1 + c j^{-r})``."""
    return math.exp(float(np.sum(np.log1p(c * power_terms(r, 0, n))[::-1])))


def stable_product_difference(factors: Sequence[float], k: int) -> float:
    """``prod_{j<=s} (1 + x_j) - prod_{j<=k} (1 + x_j)`` without cancellation.

    Evaluated as ``H_k * expm1(sum_{j>k} log1p(x_j))``; the tail log-sum is
    accumulated from ``j = s`` downward.
    """
    x = np.asarray(factors, dtype=np.float64)
    s = x.shape[0]
    if not 0 <= k <= s:
        raise InvalidParameterError(f"need 0 <= k <= s, got k={k}, s={s}")
    if np.any(x < 0):
        raise InvalidParameterError("increments must be nonnegative")
    if k == s:
        return 0.0
    logs = np.log1p(x)
    log_head = float(np.sum(logs[:k]))
    log_tail = float(np.sum(logs[k:][::-1]))
    return math.exp(log_head) * math.expm1(log_tail)


class ProductDifference:
    """Precomputed ``stable_product_difference`` for every ``k`` at once.

    Used by the scans over ``s = 10^6`` factors where each probe must be O(1).
    """

    def __init__(self, factors: Sequence[float]):
        x = np.asarray(factors, dtype=np.float64)
        if np.any(x < 0):
            raise InvalidParameterError("increments must be nonnegative")
        logs = np.log1p(x)
        self.s = x.shape[0]
        self._head = np.concatenate(([0.0], np.cumsum(logs)))
        self._tail = np.concatenate((np.cumsum(logs[::-1])[::-1], [0.0]))
        self._plain_tail = np.concatenate((np.cumsum(x[::-1])[::-1], [0.0]))

    @property
    def log_total(self) -> float:
        return float(self._tail[0])

    def __call__(self, k: int) -> float:
        if not 0 <= k <= self.s:
            raise InvalidParameterError(f"need 0 <= k <= s, got k={k}, s={self.s}")
        if k == self.s:
            return 0.0
        return math.exp(self._head[k]) * math.expm1(self._tail[k])

    def increment_tail(self, k: int) -> float:
        """``sum_{j>k} x_j`` summed from the smallest term."""
        return float(self._plain_tail[k])

    def all(self) -> np.ndarray:
        """Differences for ``k = 0..s`` as an array."""
        out = np.exp(self._head) * np.expm1(self._tail)
        out[-1] = 0.0
        return out
