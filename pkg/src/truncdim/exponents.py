"""Exponent configuration ``(p, q)`` and the embedding constants built from it.

Every tail quantity in the package is a sum of ``gamma_u^{p*} / C^{|u|}``; this
module owns ``p*`` and the per-coordinate denominator ``C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from . import series
from .errors import DivergenceError, InvalidParameterError, ModeMismatchError

Real = Union[int, float]

INF = math.inf


def parse_extended(value: Union[str, Real]) -> float:
    """Parse ``"inf"``/``"∞"`` or a number into a float in ``[1, inf]``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in {"inf", "infinity", "∞", "+inf"}:
            return INF
        try:
            value = float(text)
        except ValueError as exc:
            raise InvalidParameterError(f"not an exponent: {value!r}") from exc
    return float(value)


def conjugate(p: Real) -> float:
    """Return ``p*`` with ``1/p + 1/p* = 1`` (``1 <-> inf``)."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidParameterError(f"exponent must lie in [1, inf], got {p}")
    if p == 1:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class ExponentConfig:
    """The pair ``(p, q)`` together with derived constants.

    Parameters
    ----------
    p, q : float
        Exponents in ``[1, inf]``.  ``p`` fixes the derivative norm of the
        source space, ``q`` the target ``L_q`` norm.
    norm : {"bound", "exact"}
        ``"bound"`` uses the general upper bound on the univariate embedding
        norm, giving ``C = (q/p* + 1)^{p*/q}``.  ``"exact"`` is only defined
        for ``q = 1`` and uses the exact norm ``(1 + p*)^{-1/p*}``, i.e.
        ``C = 1 + p*``.
    """

    p: float
    q: float
    norm: Literal["bound", "exact"] = "bound"
    p_star: float = field(init=False)

    def __post_init__(self) -> None:
        p = parse_extended(self.p)
        q = parse_extended(self.q)
        if math.isnan(q) or q < 1:
            raise InvalidParameterError(f"q must lie in [1, inf], got {q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p_star", conjugate(p))
        if self.norm not in ("bound", "exact"):
            raise InvalidParameterError(f"unknown norm variant {self.norm!r}")
        if self.norm == "exact":
            if q != 1:
                raise InvalidParameterError("the exact embedding norm is only known for q = 1")
            if p == 1:
                raise ModeMismatchError("exact-norm variant needs p > 1")

    @property
    def combine_mode(self) -> str:
        return "max" if self.p == 1 else "power_pstar"

    @property
    def extrapolated(self) -> bool:
        """True for ``q = inf``, which is admitted only by a continuity limit."""
        return math.isinf(self.q)

    @property
    def C(self) -> float:
        """Per-coordinate denominator of the tail sums (1 for ``p = 1``)."""
        if self.p == 1:
            return 1.0
        if self.norm == "exact":
            return 1.0 + self.p_star
        return embedding_factor(self)

    def require_p_gt_1(self, what: str = "this operation") -> None:
        if self.p == 1:
            raise ModeMismatchError(f"{what} needs p > 1; use the max form for p = 1")


def embedding_factor(cfg: ExponentConfig) -> float:
    """``C = (q/p* + 1)^{p*/q}``; equals 1 in the limit ``q = inf``."""
    cfg.require_p_gt_1("embedding_factor")
    ps, q = cfg.p_star, cfg.q
    if math.isinf(q):
        return 1.0
    return (q / ps + 1.0) ** (ps / q)


def embedding_norm_upper(cfg: ExponentConfig) -> float:
    """Upper bound ``(q/p* + 1)^{-1/q}`` on the univariate embedding norm."""
    ps, q = cfg.p_star, cfg.q
    if math.isinf(q):
        return 1.0
    ratio = 0.0 if math.isinf(ps) else q / ps
    return (ratio + 1.0) ** (-1.0 / q)


def embedding_norm_exact_q1(p: Real) -> float:
    """Exact univariate embedding norm into ``L_1``: ``(1 + p*)^{-1/p*}``."""
    ps = conjugate(parse_extended(p))
    if math.isinf(ps):
        raise ModeMismatchError("exact q = 1 norm formula needs p > 1")
    return (1.0 + ps) ** (-1.0 / ps)


def product_of_factors(model, cfg: ExponentConfig, cutoff: int = 1000) -> float:
    """``prod_{j=1}^s (1 + gamma_j^{p*} / C)`` for a product-type model.

    ``s = inf`` is only available for ``PolyDecay`` and returns the upper
    estimate with ``cutoff`` explicit factors.
    """
    cfg.require_p_gt_1("the product of embedding factors")
    if not model.is_product:
        raise InvalidParameterError("product form needs product weights")
    ps, C = cfg.p_star, cfg.C
    if math.isinf(model.s):
        r = model.a * ps
        if r <= 1:
            raise DivergenceError(
                f"continuity condition fails: a * p* = {r:g} <= 1, the product diverges"
            )
        return series.infinite_product_upper(r, 1.0 / C, cutoff)
    x = model.coordinate_powers(ps, 0, model.s) / C
    return math.exp(float(np.sum(np.log1p(x)[::-1])))


def continuity_bound_Ss(model, cfg: ExponentConfig, cutoff: int = 1000) -> float:
    """Upper bound ``[prod_j (1 + gamma_j^{p*}/C)]^{1/p*}`` on the embedding ``S_s``."""
    return product_of_factors(model, cfg, cutoff) ** (1.0 / cfg.p_star)
