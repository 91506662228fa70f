"""Truncation-error quantities for product weights, the p = 1 max form,
Hoelder-type error combination and a brute-force subset oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from . import series
from .errors import DivergenceError, InvalidParameterError, UnsupportedModelError
from .exponents import ExponentConfig, product_of_factors
from .weights import (
    MAX_ENUMERATION_DIM,
    WeightModel,
    check_enumerable,
    subset_log_weights,
)

Exactness = Literal["exact", "upper_bound"]


@dataclass(frozen=True)
class TailBound:
    """A truncation-error term at level ``k``.

    ``value`` is the error itself; ``raw_power`` is its ``p*``-th power,
    ``sum_{u not in [k]} gamma_u^{p*} / C^{|u|}``, when ``p > 1``.
    """

    value: float
    raw_power: Optional[float]
    k: int
    exactness: Exactness

    @classmethod
    def from_raw(cls, raw: float, p_star: float, k: int, exactness: Exactness) -> "TailBound":
        raw = max(raw, 0.0)
        return cls(raw ** (1.0 / p_star), raw, k, exactness)


def _check_k(k: int, s) -> None:
    if k < 0 or k != int(k):
        raise InvalidParameterError(f"k must be a nonnegative integer, got {k}")
    if k > s:
        raise InvalidParameterError(f"k = {k} exceeds s = {s}")


def product_increments(model: WeightModel, cfg: ExponentConfig) -> np.ndarray:
    """``x_j = gamma_j^{p*} / C`` for ``j = 1..s`` (finite ``s``)."""
    if math.isinf(model.s):
        raise InvalidParameterError("exact product tails need finite s")
    return model.coordinate_powers(cfg.p_star, 0, model.s) / cfg.C


def exact_product_tails(model: WeightModel, cfg: ExponentConfig) -> series.ProductDifference:
    """Precomputed exact raw tails for every ``k``; probes are O(1)."""
    cfg.require_p_gt_1("tail_exact_product")
    _require_product(model)
    return series.ProductDifference(product_increments(model, cfg))


def tail_exact_product(model: WeightModel, cfg: ExponentConfig, k: int) -> TailBound:
    """Exact ``sum_{u not in [k]} gamma_u^{p*}/C^{|u|}`` as a product difference."""
    cfg.require_p_gt_1("tail_exact_product")
    _require_product(model)
    _check_k(k, model.s)
    raw = series.stable_product_difference(product_increments(model, cfg), k)
    return TailBound.from_raw(raw, cfg.p_star, k, "exact")


def _require_product(model: WeightModel) -> None:
    if not model.is_product:
        raise InvalidParameterError("this tail formula needs product weights")


def tail_bound_product(
    model: WeightModel, cfg: ExponentConfig, k: int, cutoff: int = series.DEFAULT_CUTOFF
) -> TailBound:
    """Upper bound ``P^{1/p*} (1 - exp(-sum_{j>k} gamma_j^{p*} / C))^{1/p*}``.

    ``P = prod_j (1 + gamma_j^{p*}/C)``.  With ``s = inf`` (``PolyDecay`` only)
    ``P`` is overestimated with ``cutoff`` explicit factors and the tail sum
    by the upper integral bound.
    """
    cfg.require_p_gt_1("tail_bound_product")
    _require_product(model)
    _check_k(k, model.s)
    ps, C = cfg.p_star, cfg.C
    P = product_of_factors(model, cfg, cutoff)
    if math.isinf(model.s):
        tail = series.tail_sum_poly(model.a * ps, k).upper
    else:
        tail = float(np.sum(model.coordinate_powers(ps, k, model.s)[::-1]))
    raw = P * -math.expm1(-tail / C)
    return TailBound.from_raw(raw, ps, k, "upper_bound")


def tail_p1(model: WeightModel, k: int) -> TailBound:
    """``max_{u not in [k]} gamma_u``, the exact truncation error for ``p = 1``.

    Product weights with ``gamma_j <= 1`` reduce to ``gamma_{k+1}``; anything
    else is enumerated (``s <= MAX_ENUMERATION_DIM``).
    """
    _check_k(k, model.s)
    if k == model.s:
        return TailBound(0.0, None, k, "exact")
    if model.is_product and model.gamma(1) <= 1.0:
        return TailBound(model.gamma(k + 1), None, k, "exact")
    if math.isinf(model.s) or model.s > MAX_ENUMERATION_DIM:
        raise UnsupportedModelError(
            "max over subsets needs product weights bounded by 1 or s <= "
            f"{MAX_ENUMERATION_DIM}"
        )
    logs, _ = subset_log_weights(model)
    return TailBound(float(np.exp(np.max(logs[1 << k:]))), None, k, "exact")


def brute_force_raw_tails(model: WeightModel, cfg: ExponentConfig) -> np.ndarray:
    """Raw tails for ``k = 0..s`` by summing every subset term.

    Subset terms are grouped by their largest element ``t``; each group sum and
    the final sum over ``t > k`` are accumulated with :func:`math.fsum`.
    """
    cfg.require_p_gt_1("tail_brute_force")
    s = check_enumerable(model.s)
    logs, sizes = subset_log_weights(model)
    terms = np.exp(cfg.p_star * logs - sizes * math.log(cfg.C))
    group = [math.fsum(terms[1 << (t - 1): 1 << t]) for t in range(1, s + 1)]
    return np.array([math.fsum(group[k:]) for k in range(s + 1)])


def tail_brute_force(model: WeightModel, cfg: ExponentConfig, k: int) -> TailBound:
    """Oracle: enumerate all ``u not in [k]`` and sum ``gamma_u^{p*}/C^{|u|}``."""
    _check_k(k, model.s)
    raw = float(brute_force_raw_tails(model, cfg)[k])
    return TailBound.from_raw(raw, cfg.p_star, k, "exact")


def combined_error(algo_error: float, tail: TailBound, cfg: ExponentConfig) -> float:
    """Worst-case error of the truncated algorithm from its two parts.

    ``(e^{p*} + tail^{p*})^{1/p*}`` for ``p > 1``, ``max(e, tail)`` for ``p = 1``.
    """
    if algo_error < 0:
        raise InvalidParameterError("algorithm error must be nonnegative")
    if cfg.p == 1:
        return max(algo_error, tail.value)
    ps = cfg.p_star
    if ps == 1:
        return algo_error + tail.value
    if ps == 2:
        return math.hypot(algo_error, tail.value)
    return (algo_error**ps + tail.value**ps) ** (1.0 / ps)


def truncate_function(
    f: Callable[[Sequence[float]], float], k: int, s: int
) -> Callable[[Sequence[float]], float]:
    """``x_[k] -> f(x_1, ..., x_k, 0, ..., 0)``; samples of ``f`` alone suffice."""
    _check_k(k, s)
    if k == s:
        return f
    pad = [0.0] * (s - k)

    def truncated(x: Sequence[float]) -> float:
        x = list(x)
        if len(x) != k:
            raise InvalidParameterError(f"truncated function takes {k} coordinates, got {len(x)}")
        return f(x + pad)

    return truncated
