"""Solvers for the truncation level ``k(eps)``.

A query asks for the smallest ``k`` whose truncation error meets a threshold:

* ``definition`` mode: the error itself is at most ``eps``;
* ``budget`` mode: the ``p*``-th power of the error is at most ``eps^{p*}/2``,
  leaving the other half of the budget to the ``k``-variate algorithm.

For ``p = 1`` both modes use ``max_{u not in [k]} gamma_u <= eps`` and the
result is the truncation dimension itself; for ``p > 1`` it is an upper bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Literal, Optional

from . import series
from .errors import InvalidParameterError, NoSolutionError, UnsupportedModelError
from .exponents import ExponentConfig, product_of_factors
from .pod import pod_tail_bound
from .truncation import exact_product_tails, tail_p1
from .weights import PODWeights, PolyDecay, WeightModel

log = logging.getLogger(__name__)

Mode = Literal["definition", "budget"]
Method = Literal["auto", "closed_form", "bound_scan", "direct_scan"]

SNAP_TOL = 1e-9
_SEARCH_CAP = 1 << 60


@dataclass(frozen=True)
class DimensionQuery:
    model: WeightModel
    cfg: ExponentConfig
    epsilon: float
    mode: Mode = "definition"
    method: Method = "auto"
    cutoff: int = series.DEFAULT_CUTOFF

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.mode not in ("definition", "budget"):
            raise InvalidParameterError(f"unknown mode {self.mode!r}")
        if self.method not in ("auto", "closed_form", "bound_scan", "direct_scan"):
            raise InvalidParameterError(f"unknown method {self.method!r}")
        if self.method == "closed_form" and not isinstance(self.model, PolyDecay):
            raise InvalidParameterError("closed forms exist only for gamma_j = j^-a")


@dataclass(frozen=True)
class Certificate:
    k_pass: bool
    k_minus_one_fail: Optional[bool]
    tail_at_k: float
    tail_at_k_minus_one: Optional[float]

    @property
    def ok(self) -> bool:
        return self.k_pass and self.k_minus_one_fail is not False


@dataclass(frozen=True)
class DimensionResult:
    k: int
    epsilon: float
    mode: Mode
    method_used: str
    threshold_used: float
    is_exact_dimension: bool
    certificate: Certificate
    vacuous: bool = False
    notes: Dict[str, str] = field(default_factory=dict)


def threshold(cfg: ExponentConfig, epsilon: float, mode: Mode) -> float:
    """Limit on the compared quantity: the error for ``p = 1``, its ``p*``-th power otherwise."""
    if cfg.p == 1:
        return epsilon
    t = epsilon**cfg.p_star
    return t / 2.0 if mode == "budget" else t


def snap_ceil(x: float, tol: float = SNAP_TOL) -> int:
    """Ceiling that treats values within ``tol`` of an integer as that integer."""
    r = round(x)
    if abs(x - r) <= tol:
        return int(r)
    return math.ceil(x)


def _certify(tail: Callable[[int], float], k: int, thr: float, rtol: float = 0.0) -> Certificate:
    limit = thr * (1.0 + rtol)
    at_k = tail(k)
    if k == 0:
        return Certificate(at_k <= limit, None, at_k, None)
    before = tail(k - 1)
    return Certificate(at_k <= limit, before > limit, at_k, before)


def _minimal_k(passes: Callable[[int], bool], s) -> int:
    """Smallest ``k`` with ``passes(k)`` for a monotone predicate on ``0..s``."""
    if passes(0):
        return 0
    lo, hi = 0, 1
    while not passes(hi):
        lo = hi
        if hi >= s or hi >= _SEARCH_CAP:
            raise NoSolutionError(f"threshold not reached for any k <= {hi}")
        hi = min(2 * hi, s) if not math.isinf(s) else 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _memo(fn: Callable[[int], float]) -> Callable[[int], float]:
    cache: Dict[int, float] = {}

    def wrapped(k: int) -> float:
        if k not in cache:
            cache[k] = fn(k)
            log.debug("probe k=%d tail=%.17g", k, cache[k])
        return cache[k]

    return wrapped


# ---------------------------------------------------------------- p = 1

def dim_p1_polydecay(a: float, epsilon: float, mode: Mode = "definition") -> DimensionResult:
    """``dim(eps) = ceil(eps^{-1/a} - 1)`` for ``gamma_j = j^{-a}`` and ``p = 1``."""
    if not (a > 0 and epsilon > 0):
        raise InvalidParameterError("need a > 0 and epsilon > 0")
    k = max(0, snap_ceil(epsilon ** (-1.0 / a) - 1.0))

    def tail(j: int) -> float:
        return (j + 1.0) ** (-a)

    cert = _certify(tail, k, epsilon, SNAP_TOL)
    return DimensionResult(k, epsilon, mode, "closed_form", epsilon, True, cert)


def _dim_p1(query: DimensionQuery) -> DimensionResult:
    model, eps = query.model, query.epsilon
    if isinstance(model, PolyDecay):
        res = dim_p1_polydecay(model.a, eps, query.mode)
        if res.k <= model.s:
            return res
    tail = _memo(lambda j: tail_p1(model, j).value)
    k = _minimal_k(lambda j: tail(j) <= eps, model.s)
    method = "direct_scan" if model.is_product else "enumeration"
    return DimensionResult(k, eps, query.mode, method, eps, True, _certify(tail, k, eps))


# ---------------------------------------------------------------- p > 1

def _poly_raw_bound(a: float, cfg: ExponentConfig, product_value: float) -> Callable[[int], float]:
    r = a * cfg.p_star
    C = cfg.C

    def raw(k: int) -> float:
        return product_value * -math.expm1(-series.tail_sum_poly(r, k).upper / C)

    return raw


def k_eps_closed_form(
    a: float,
    cfg: ExponentConfig,
    epsilon: float,
    product_value: float,
    mode: Mode = "budget",
) -> DimensionResult:
    """Closed-form ``k(eps)`` for ``gamma_j = j^{-a}``, ``p > 1``.

    ``k = ceil((-1 / (C (a p* - 1) log(1 - t / P)))^{1/(a p* - 1)} - 1/2)`` where
    ``t`` is the threshold of ``mode`` and ``P = product_value`` overestimates
    ``prod_j (1 + j^{-a p*}/C)``.  With ``cfg.norm == "exact"`` (``q = 1``) the
    denominator ``C`` becomes ``1 + p*``.
    """
    cfg.require_p_gt_1("k_eps_closed_form")
    ps = cfg.p_star
    if not a * ps > 1:
        raise InvalidParameterError(f"need a > 1/p*, got a = {a}, p* = {ps}")
    if not product_value > 0:
        raise InvalidParameterError("product value must be positive")
    r = a * ps - 1.0
    C = cfg.C
    thr = threshold(cfg, epsilon, mode)
    raw = _poly_raw_bound(a, cfg, product_value)
    if thr >= product_value:
        cert = _certify(raw, 0, thr)
        return DimensionResult(0, epsilon, mode, "closed_form", thr, False, cert, vacuous=True,
                               notes={"vacuous": "threshold exceeds the whole product"})
    x = (-1.0 / (C * r * math.log1p(-thr / product_value))) ** (1.0 / r) - 0.5
    k = max(0, snap_ceil(x))
    cert = _certify(raw, k, thr, SNAP_TOL)
    return DimensionResult(k, epsilon, mode, "closed_form", thr, False, cert)


def _scan_evaluator(query: DimensionQuery):
    model, cfg, method = query.model, query.cfg, query.method
    if isinstance(model, PODWeights):
        if method == "direct_scan":
            raise UnsupportedModelError("POD weights have no exact tail scan at this size")
        model.check_admissible(cfg.p_star)
        return (lambda k: pod_tail_bound(model, cfg, k).raw_power), "bound_scan"
    if math.isinf(model.s):
        if method == "direct_scan":
            raise InvalidParameterError("direct scans need finite s")
        P = product_of_factors(model, cfg, query.cutoff)
        return _poly_raw_bound(model.a, cfg, P), "bound_scan"
    table = exact_product_tails(model, cfg)
    if method == "bound_scan":
        total = math.exp(table.log_total)
        return (lambda k: total * -math.expm1(-table.increment_tail(k))), "bound_scan"
    return table, "direct_scan"


def k_eps_scan(query: DimensionQuery) -> DimensionResult:
    """Smallest ``k`` meeting the query's threshold, by expansion then bisection.

    Exact product differences are used for finite-``s`` product weights
    (``direct_scan``), rigorous overestimates otherwise (``bound_scan``).
    """
    cfg = query.cfg
    cfg.require_p_gt_1("k_eps_scan")
    thr = threshold(cfg, query.epsilon, query.mode)
    evaluator, method = _scan_evaluator(query)
    tail = _memo(evaluator)
    k = _minimal_k(lambda j: tail(j) <= thr, query.model.s)
    cert = _certify(evaluator, k, thr)
    return DimensionResult(k, query.epsilon, query.mode, method, thr, False, cert)


def dim_upper_bound(query: DimensionQuery) -> DimensionResult:
    """Dispatch a query to the p = 1 solver, the closed form or a scan."""
    cfg, model = query.cfg, query.model
    if cfg.p == 1:
        return _dim_p1(query)
    use_closed = query.method == "closed_form" or (
        query.method == "auto" and isinstance(model, PolyDecay) and math.isinf(model.s)
    )
    if use_closed:
        P = product_of_factors(model, cfg, query.cutoff)
        res = k_eps_closed_form(model.a, cfg, query.epsilon, P, query.mode)
        if res.k > model.s:
            return k_eps_scan(DimensionQuery(model, cfg, query.epsilon, query.mode,
                                             "direct_scan", query.cutoff))
        return res
    return k_eps_scan(query)


solve = dim_upper_bound
