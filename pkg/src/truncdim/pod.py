"""Truncation bounds for product order-dependent (POD) weights.

The tail is split into a head factor over ``v in [k]`` and a factor ``T(k)``
over the coordinates ``k+1..s``.  Both are bounded with integral estimates
for ``gamma_j = c2 j^{-a}``.  Exact evaluators based on elementary symmetric
polynomials are included to check those bounds.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import InvalidParameterError
from .exponents import ExponentConfig
from .truncation import TailBound, _check_k
from .weights import PODWeights

_LOG_MAX = math.log(np.finfo(np.float64).max)


def _exp(x: float) -> float:
    return math.inf if x > _LOG_MAX else math.exp(x)


def _setup(model: PODWeights, cfg: ExponentConfig, k: int):
    cfg.require_p_gt_1("POD bounds")
    model.check_admissible(cfg.p_star)
    _check_k(k, model.s)
    return cfg.p_star, cfg.C


def pod_y(model: PODWeights, cfg: ExponentConfig, k: int) -> float:
    ps, C = cfg.p_star, cfg.C
    r = model.a * ps
    return model.c2**ps / (C * (r - 1.0) * (k + 0.5) ** (r - 1.0))


def pod_T(model: PODWeights, cfg: ExponentConfig, k: int) -> float:
    """Upper bound on ``T(k)`` by backward nested multiplication.

    ``T^{p*} <= sum_{l=1}^{s-k} ((k+1)...(k+l))^{b p*} y^l / l!``.
    """
    ps, _ = _setup(model, cfg, k)
    s = model.s
    if s == k:
        return 0.0
    y = pod_y(model, cfg, k)
    bp = model.b * ps
    t = y * s**bp / (s - k)
    for l in range(s - k - 1, 0, -1):
        t = (t + 1.0) * (l + k) ** bp * y / l
    return t ** (1.0 / ps)


def pod_T_direct(model: PODWeights, cfg: ExponentConfig, k: int) -> float:
    """The same series as :func:`pod_T`, summed term by term from log-factorials."""
    ps, _ = _setup(model, cfg, k)
    s = model.s
    if s == k:
        return 0.0
    log_y = math.log(pod_y(model, cfg, k))
    bp = model.b * ps
    lk = math.lgamma(k + 1.0)
    terms = [
        _exp(bp * (math.lgamma(l + k + 1.0) - lk) + l * log_y - math.lgamma(l + 1.0))
        for l in range(1, s - k + 1)
    ]
    return math.fsum(terms) ** (1.0 / ps)


def pod_head_bound(model: PODWeights, cfg: ExponentConfig, k: int) -> float:
    """Upper bound on ``(sum_{v in [k]} gamma_v^{p*}/C^{|v|})^{1/p*}`` for ``k >= 2``.

    Returns ``inf`` once the level terms overflow binary64; the estimate is
    loose for large ``k`` anyway.
    """
    ps, C = _setup(model, cfg, k)
    if k < 2:
        raise InvalidParameterError("the head estimate needs k >= 2; use pod_head_exact")
    r = model.a * ps
    c = model.c2**ps / C
    linear = c * float(np.sum((np.arange(1, k + 1, dtype=np.float64) ** -r)[::-1]))
    slack = (r - 1.0) * 1.5 ** (r - 1.0)
    log_z = math.log(c / slack)
    bp = model.b * ps
    higher = 0.0
    for l in range(2, k):
        higher += _exp((bp - 1.0) * math.lgamma(l + 1.0) + l * log_z) * (l * slack + 1.0)
    higher += _exp((bp - r) * math.lgamma(k + 1.0) + k * math.log(c))
    return model.c1 * (1.0 + linear + higher) ** (1.0 / ps)


def _esp(x: np.ndarray, max_level: Optional[int] = None) -> np.ndarray:
    """Elementary symmetric polynomials ``e_0..e_L`` of ``x``."""
    n = x.shape[0]
    L = n if max_level is None else min(n, max_level)
    e = np.zeros(L + 1)
    e[0] = 1.0
    for v in x:
        e[1:] = e[1:] + v * e[:-1]
    return e


def _level_factors(bp: float, n: int) -> np.ndarray:
    return np.array([bp * math.lgamma(m + 1.0) for m in range(n + 1)])


def pod_head_exact(model: PODWeights, cfg: ExponentConfig, k: int) -> float:
    """Exact head ``(sum_{v in [k]} gamma_v^{p*}/C^{|v|})^{1/p*}`` by levels."""
    ps, C = _setup(model, cfg, k)
    x = model.coordinate_powers(ps, 0, k) / C
    e = _esp(x)
    with np.errstate(divide="ignore"):
        terms = np.exp(_level_factors(model.b * ps, k) + np.log(e))
    return model.c1 * math.fsum(terms) ** (1.0 / ps)


def pod_raw_tail_exact(model: PODWeights, cfg: ExponentConfig, k: int,
                       max_level: Optional[int] = None) -> float:
    """Exact raw tail ``sum_{u not in [k]} gamma_u^{p*}/C^{|u|}``.

    ``sum_{m, l >= 1} c1^{p*} ((m + l)!)^{b p*} e_m(head) e_l(tail)``; no
    subtraction is involved.  ``max_level`` truncates the tail levels for
    large ``s`` (the result is then a lower bound).
    """
    ps, C = _setup(model, cfg, k)
    s = model.s
    if k == s:
        return 0.0
    eh = _esp(model.coordinate_powers(ps, 0, k) / C)
    et = _esp(model.coordinate_powers(ps, k, s) / C, max_level)
    m = np.arange(eh.shape[0])[:, None]
    l = np.arange(1, et.shape[0])[None, :]
    lg = np.vectorize(math.lgamma)((m + l + 1).astype(np.float64))
    with np.errstate(divide="ignore"):
        logs = model.b * ps * lg + np.log(eh)[:, None] + np.log(et[1:])[None, :]
    return model.c1**ps * math.fsum(np.exp(logs).ravel())


def pod_tail_bound(model: PODWeights, cfg: ExponentConfig, k: int) -> TailBound:
    """``head(k) * T(k)``; the head is exact for ``k < 2`` and estimated above."""
    ps, _ = _setup(model, cfg, k)
    if k == model.s:
        return TailBound(0.0, 0.0, k, "upper_bound")
    head = pod_head_bound(model, cfg, k) if k >= 2 else pod_head_exact(model, cfg, k)
    value = head * pod_T(model, cfg, k)
    return TailBound(value, value**ps, k, "upper_bound")
