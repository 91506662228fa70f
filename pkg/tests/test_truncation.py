import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncdim import (
    EnumerationLimitError,
    ExponentConfig,
    ModeMismatchError,
    PODWeights,
    PolyDecay,
    ProductWeights,
    TailBound,
    combined_error,
    tail_bound_product,
    tail_brute_force,
    tail_exact_product,
    tail_p1,
    truncate_function,
)
from truncdim.truncation import brute_force_raw_tails

CFGS = [ExponentConfig(p, q) for p in (2, math.inf) for q in (1, 2)]

product_model = st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=10).map(
    lambda xs: ProductWeights(tuple(sorted(xs, reverse=True)))
)


def hand_tail(model, cfg, k):
    """Independent enumeration with itertools."""
    ps, C = cfg.p_star, cfg.C
    total = 0.0
    for n in range(1, model.s + 1):
        for u in itertools.combinations(range(1, model.s + 1), n):
            if max(u) > k:
                total += math.prod(model.gamma(j) for j in u) ** ps / C**n
    return total


def test_exact_tail_anchor():
    t = tail_exact_product(PolyDecay(1, 3), ExponentConfig(2, 2), 1)
    assert t.raw_power == pytest.approx(0.28125, rel=1e-15)
    assert t.value == pytest.approx(0.28125**0.5, rel=1e-15)
    assert t.exactness == "exact"
    assert tail_exact_product(PolyDecay(1, 3), ExponentConfig(2, 2), 3).value == 0.0


def test_exact_tail_rejects_p1():
    with pytest.raises(ModeMismatchError):
        tail_exact_product(PolyDecay(1, 3), ExponentConfig(1, 2), 1)


def test_brute_force_anchor_and_limit():
    assert tail_brute_force(PolyDecay(1, 3), ExponentConfig(2, 2), 1).raw_power == pytest.approx(0.28125)
    assert tail_brute_force(PolyDecay(1, 3), ExponentConfig(2, 2), 3).raw_power == 0.0
    with pytest.raises(EnumerationLimitError):
        tail_brute_force(PolyDecay(2, 23), ExponentConfig(2, 2), 1)


@settings(max_examples=60)
@given(product_model, st.sampled_from(CFGS))
def test_brute_force_matches_hand_enumeration(model, cfg):
    brute = brute_force_raw_tails(model, cfg)
    for k in range(model.s + 1):
        assert brute[k] == pytest.approx(hand_tail(model, cfg, k), rel=1e-12, abs=1e-300)


@settings(max_examples=60)
@given(product_model, st.sampled_from(CFGS))
def test_exact_equals_oracle_and_bound_dominates(model, cfg):
    brute = brute_force_raw_tails(model, cfg)
    prev = math.inf
    for k in range(model.s + 1):
        exact = tail_exact_product(model, cfg, k)
        bound = tail_bound_product(model, cfg, k)
        assert exact.raw_power == pytest.approx(brute[k], rel=1e-12, abs=1e-300)
        assert bound.value >= exact.value
        assert exact.value <= prev
        prev = exact.value


def test_bound_example():
    b = tail_bound_product(PolyDecay(1, 3), ExponentConfig(2, 2), 1)
    assert b.value == pytest.approx(0.54244933020844801569, rel=1e-14)
    assert b.exactness == "upper_bound"
    assert tail_bound_product(PolyDecay(1, 3), ExponentConfig(2, 2), 3).value == 0.0


def test_bound_infinite_dimension_monotone():
    cfg = ExponentConfig(2, 2)
    vals = [tail_bound_product(PolyDecay(3), cfg, k).value for k in range(0, 60)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_exact_tail_pinf_table_cell():
    # p = inf, q = 2, a = 4: k(1e-3) = 9 at s = 10^6
    model, cfg = PolyDecay(4, 10**6), ExponentConfig(math.inf, 2)
    assert tail_exact_product(model, cfg, 9).raw_power <= 1e-3 / 2
    assert tail_exact_product(model, cfg, 8).raw_power > 1e-3 / 2


def test_tail_p1():
    assert tail_p1(PolyDecay(2), 3).value == 0.0625
    assert tail_p1(PolyDecay(5), 0).value == 1.0
    assert tail_p1(PolyDecay(2, 4), 4).value == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_tail_p1_closed_form_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    model = ProductWeights(tuple(np.sort(rng.uniform(0.05, 1, 10))[::-1]))
    for k in range(11):
        direct = max(
            (math.prod(model.gamma(j) for j in u)
             for n in range(1, 11) for u in itertools.combinations(range(1, 11), n) if max(u) > k),
            default=0.0,
        )
        assert tail_p1(model, k).value == pytest.approx(direct, rel=1e-14)


def test_tail_p1_enumerates_large_weights():
    model = ProductWeights((3.0, 2.0, 0.5))
    # u = {1, 2} has weight 6 > gamma_2 for k = 1
    assert tail_p1(model, 1).value == pytest.approx(6.0)
    pod = PODWeights(c1=1, c2=2, b=1, a=0.5, s=4)
    assert tail_p1(pod, 3).value == pytest.approx(24 * 2**4 / math.sqrt(24))


@pytest.mark.parametrize(
    "p, expected", [(2, 0.5), (1, 0.4), (math.inf, 0.7)],
)
def test_combined_error(p, expected):
    cfg = ExponentConfig(p, 2)
    tail = TailBound(0.4, None, 3, "exact")
    assert combined_error(0.3, tail, cfg) == pytest.approx(expected, rel=1e-15)


@given(st.floats(0, 10), st.floats(0, 10), st.sampled_from([1, 1.5, 2, 3, math.inf]))
def test_combined_error_identities(e, t, p):
    cfg = ExponentConfig(p, 2)
    assert combined_error(0.0, TailBound(t, None, 0, "exact"), cfg) == pytest.approx(t)
    assert combined_error(e, TailBound(0.0, 0.0, 0, "exact"), cfg) == pytest.approx(e)


def test_truncate_function():
    g = truncate_function(lambda x: x[0] + x[0] * x[1], 1, 2)
    assert g([0.7]) == 0.7
    f3 = lambda x: x[0] * x[1] * x[2]
    assert truncate_function(f3, 2, 3)([0.4, 0.9]) == 0.0
    assert truncate_function(f3, 3, 3) is f3


@given(st.integers(1, 6), st.data())
def test_truncate_function_agrees_on_slice(s, data):
    k = data.draw(st.integers(0, s))
    f = lambda x: sum((j + 1) * v for j, v in enumerate(x)) + math.prod(1 + v for v in x)
    head = data.draw(st.lists(st.floats(0, 1), min_size=k, max_size=k))
    assert truncate_function(f, k, s)(head) == f(head + [0.0] * (s - k))
