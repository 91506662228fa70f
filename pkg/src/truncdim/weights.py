"""Weight models for anchored spaces.

Three families are supported: explicit product weights, product weights
``gamma_j = j^{-a}`` and product order-dependent (POD) weights
``gamma_u = c1 (|u|!)^b prod_{j in u} c2 j^{-a}``.  All of them share the
shape ``c1 * (|u|!)^b * prod_{j in u} gamma_j``; product models have
``c1 = 1`` and ``b = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from . import series
from .errors import (
    AdmissibilityError,
    DivergenceError,
    EnumerationLimitError,
    InvalidParameterError,
)

#: Largest dimension for which subsets are enumerated (2^22 ~ 4e6 subsets).
MAX_ENUMERATION_DIM = 22


@dataclass(frozen=True)
class ProductWeights:
    """Explicit product weights ``gamma_1 >= gamma_2 >= ... >= gamma_s > 0``."""

    gammas: Tuple[float, ...]

    def __post_init__(self) -> None:
        g = tuple(float(v) for v in self.gammas)
        if not g:
            raise InvalidParameterError("need at least one coordinate weight")
        if any(not math.isfinite(v) or v <= 0 for v in g):
            raise InvalidParameterError("coordinate weights must be positive and finite")
        if any(a < b for a, b in zip(g, g[1:])):
            raise InvalidParameterError("coordinate weights must be nonincreasing")
        object.__setattr__(self, "gammas", g)

    c1 = 1.0
    b = 0.0
    is_product = True

    @property
    def s(self) -> int:
        return len(self.gammas)

    def gamma(self, j: int) -> float:
        return self.gammas[j - 1]

    def coordinate_powers(self, power: float, start: int, stop: int) -> np.ndarray:
        """``gamma_j^power`` for ``j = start+1..stop``."""
        return np.asarray(self.gammas[start:stop], dtype=np.float64) ** power


@dataclass(frozen=True)
class PolyDecay:
    """Product weights ``gamma_j = j^{-a}``, ``j = 1..s`` (``s`` may be ``inf``)."""

    a: float
    s: Union[int, float] = math.inf

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise InvalidParameterError(f"decay exponent a must be positive, got {self.a}")
        _check_dim(self.s)
        object.__setattr__(self, "a", float(self.a))
        if not math.isinf(self.s):
            object.__setattr__(self, "s", int(self.s))

    c1 = 1.0
    b = 0.0
    is_product = True

    def gamma(self, j: int) -> float:
        return float(j) ** (-self.a)

    def coordinate_powers(self, power: float, start: int, stop: int) -> np.ndarray:
        # j^{-a*power} directly rather than (j^{-a})^power
        return series.power_terms(self.a * power, start, stop)


@dataclass(frozen=True)
class PODWeights:
    """POD weights ``gamma_u = c1 (|u|!)^b prod_{j in u} c2 j^{-a}`` on ``[s]``."""

    c1: float = 1.0
    c2: float = 1.0
    b: float = 1.0
    a: float = 4.0
    s: int = 10000

    def __post_init__(self) -> None:
        if not (self.c1 > 0 and self.c2 > 0):
            raise InvalidParameterError("c1 and c2 must be positive")
        if not self.b >= 0:
            raise InvalidParameterError("b must be nonnegative")
        if not self.a > 0:
            raise InvalidParameterError("a must be positive")
        if math.isinf(self.s):
            raise InvalidParameterError("POD weights need a finite dimension s")
        _check_dim(self.s)
        for name in ("c1", "c2", "b", "a"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "s", int(self.s))

    is_product = False

    def gamma(self, j: int) -> float:
        return self.c2 * float(j) ** (-self.a)

    def coordinate_powers(self, power: float, start: int, stop: int) -> np.ndarray:
        return self.c2**power * series.power_terms(self.a * power, start, stop)

    def check_admissible(self, p_star: float) -> None:
        """Raise unless ``a > max(1/p*, b)``."""
        bound = max(1.0 / p_star, self.b)
        if not self.a > bound:
            raise AdmissibilityError(
                f"POD bounds need a > max(1/p*, b) = {bound:g}, got a = {self.a:g}"
            )


WeightModel = Union[ProductWeights, PolyDecay, PODWeights]


def _check_dim(s) -> None:
    if math.isinf(s):
        return
    if s != int(s) or s < 1:
        raise InvalidParameterError(f"dimension s must be a positive integer or inf, got {s}")


def load_gammas(path: Union[str, Path]) -> ProductWeights:
    """Read explicit product weights, one decimal per line in index order."""
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            values.append(float(text))
        except ValueError as exc:
            raise InvalidParameterError(f"{path}:{lineno}: not a number: {text!r}") from exc
    return ProductWeights(tuple(values))


def subset_weight(model: WeightModel, u: Iterable[int]) -> float:
    """``gamma_u`` for a set of 1-based coordinate indices."""
    idx = sorted(set(int(j) for j in u))
    if idx and idx[0] < 1:
        raise InvalidParameterError("coordinate indices start at 1")
    if idx and idx[-1] > model.s:
        raise InvalidParameterError(f"index {idx[-1]} exceeds s = {model.s}")
    value = model.c1 * math.factorial(len(idx)) ** model.b if model.b else model.c1
    for j in idx:
        value *= model.gamma(j)
    return value


def _points(x: Sequence[float], s: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (s,):
        raise InvalidParameterError(f"point must have {s} coordinates, got shape {arr.shape}")
    if np.any(arr < 0) or np.any(arr > 1):
        raise InvalidParameterError("coordinates must lie in [0, 1]")
    return arr


def kernel_eval(model: WeightModel, x: Sequence[float], y: Sequence[float]) -> float:
    """Reproducing kernel of the ``p = 2`` anchored space.

    Product weights use ``prod_j (1 + gamma_j^2 min(x_j, y_j))``; POD weights
    fall back to the subset sum, which needs ``s <= MAX_ENUMERATION_DIM``.
    """
    if math.isinf(model.s):
        raise InvalidParameterError("kernel evaluation needs finite s")
    xs, ys = _points(x, model.s), _points(y, model.s)
    if not model.is_product:
        return kernel_subset_sum(model, xs, ys)
    m = np.minimum(xs, ys)
    g2 = model.coordinate_powers(2.0, 0, model.s)
    return float(np.prod(1.0 + g2 * m))


def subset_sums(values: Sequence[float]) -> np.ndarray:
    """``sum_{j in u} values[j-1]`` for every subset ``u``, indexed by bitmask.

    Bit ``j-1`` of the mask marks coordinate ``j``; masks in
    ``[2^{t-1}, 2^t)`` are exactly the subsets whose largest element is ``t``.
    """
    out = np.zeros(1)
    for v in values:
        out = np.concatenate((out, out + v))
    return out


def subset_sizes(s: int) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for _ in range(s):
        out = np.concatenate((out, out + 1))
    return out


def check_enumerable(s) -> int:
    if math.isinf(s) or s > MAX_ENUMERATION_DIM:
        raise EnumerationLimitError(
            f"subset enumeration supports s <= {MAX_ENUMERATION_DIM}, got s = {s}"
        )
    return int(s)


def subset_log_weights(model: WeightModel) -> Tuple[np.ndarray, np.ndarray]:
    """``(log gamma_u, |u|)`` for all ``2^s`` subsets, indexed by bitmask."""
    s = check_enumerable(model.s)
    coord = [math.log(model.gamma(j)) for j in range(1, s + 1)]
    sizes = subset_sizes(s)
    logs = subset_sums(coord) + math.log(model.c1)
    if model.b:
        logs = logs + model.b * np.array([math.lgamma(n + 1.0) for n in range(s + 1)])[sizes]
    return logs, sizes


def kernel_subset_sum(model: WeightModel, x: Sequence[float], y: Sequence[float]) -> float:
    """``sum_u gamma_u^2 prod_{j in u} min(x_j, y_j)`` by enumerating subsets."""
    s = check_enumerable(model.s)
    m = np.minimum(_points(x, s), _points(y, s))
    logw, _ = subset_log_weights(model)
    with np.errstate(divide="ignore"):
        log_min = subset_sums(np.log(m))
    terms = np.exp(2.0 * logw + log_min)
    return math.fsum(terms)


def weight_sum(model: WeightModel, cutoff: int = series.DEFAULT_CUTOFF) -> float:
    """``sum_u gamma_u = prod_j (1 + gamma_j)`` for product weights.

    For ``PolyDecay`` with ``s = inf`` this is the upper estimate of
    :func:`series.infinite_product_upper`; ``a <= 1`` diverges.
    """
    if not model.is_product:
        raise InvalidParameterError("weight_sum is defined here for product weights only")
    if math.isinf(model.s):
        if model.a <= 1:
            raise DivergenceError(f"sum of j^-{model.a} diverges, so does prod (1 + gamma_j)")
        return series.infinite_product_upper(model.a, 1.0, cutoff)
    g = model.coordinate_powers(1.0, 0, model.s)
    return math.exp(float(np.sum(np.log1p(g)[::-1])))
