"""Acceptance suite; the terminal summary prints one PASS/FAIL line per criterion."""

import math
import time

import numpy as np
import pytest

from truncdim import (
    ExponentConfig,
    PODWeights,
    PolyDecay,
    ProductWeights,
    pod_tail_bound,
    tail_bound_product,
    tail_brute_force,
    tail_exact_product,
)
from truncdim import tables
from truncdim.pod import pod_T, pod_T_direct
from truncdim.truncation import brute_force_raw_tails

criterion = pytest.mark.criterion


def best_time(fn, repeats=5):
    best, result = math.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def mismatches(table):
    return [f"{r}/{c}: got {g}, published {w}" for r, c, g, w in tables.check(table)]


def random_products(seed=20261014, n=200):
    rng = np.random.default_rng(seed)
    cfgs = [ExponentConfig(p, q) for p in (2, math.inf) for q in (1, 2)]
    for i in range(n):
        s = int(rng.integers(1, 21))
        g = np.sort(rng.uniform(0.0, 1.0, s))[::-1]
        g = np.maximum(g, 1e-300)
        yield ProductWeights(tuple(float(x) for x in g)), cfgs[i % 4]


@criterion(1, "p = 1 table, 24 cells, < 1 ms")
def test_c1_p1_table():
    table, dt = best_time(lambda: tables.reproduce("p1"))
    assert sum(map(len, table.cells)) == 24
    assert table.cells[0][5] == 999 and table.cells[2][4] == 17
    assert not mismatches(table)
    assert dt < 1e-3, f"{dt * 1e3:.3f} ms"


@criterion(2, "product constants to five decimals, < 10 ms")
def test_c2_constants():
    table, dt = best_time(lambda: tables.reproduce("constants"))
    assert [round(r[0], 5) for r in table.cells] == [1.56225, 1.51302, 1.50306, 1.50075]
    assert dt < 1e-2, f"{dt * 1e3:.3f} ms"


@criterion(3, "p = q = 2 table by closed form and by direct scan at s = 10^6")
def test_c3_p2q2_table():
    closed = tables.reproduce("p2q2")
    assert (closed.cells[0][5], closed.cells[1][2], closed.cells[3][5]) == (8045, 12, 18)
    t0 = time.perf_counter()
    scan = tables.reproduce("p2q2", method="scan")
    dt = time.perf_counter() - t0
    problems = mismatches(closed) + [f"scan {m}" for m in mismatches(scan)]
    assert dt < 60, f"scans took {dt:.1f} s"
    assert not problems, "; ".join(problems)


@criterion(4, "p = inf, q = 2 table at s = 10^6, < 60 s")
def test_c4_pinf_table():
    t0 = time.perf_counter()
    table = tables.reproduce("pinf_q2")
    dt = time.perf_counter() - t0
    assert (table.cells[0][5], table.cells[1][3], table.cells[2][5]) == (1010, 19, 26)
    assert not mismatches(table)
    assert dt < 60, f"{dt:.1f} s"


@criterion(5, "q = 1 tables, bound and exact-norm variants, < 1 s")
def test_c5_q1_tables():
    t0 = time.perf_counter()
    bound, exact = tables.reproduce("q1_bound"), tables.reproduce("q1_exact")
    dt = time.perf_counter() - t0
    assert bound.cells[0][4] == 1643
    assert exact.cells[0][4] == 1449 and exact.cells[3][5] == 17
    assert dt < 1, f"{dt:.3f} s"
    problems = [f"bound {m}" for m in mismatches(bound)] + [f"exact {m}" for m in mismatches(exact)]
    assert not problems, "; ".join(problems)


@criterion(6, "POD table, s = 10^4, both rows, < 30 s")
def test_c6_pod_table():
    t0 = time.perf_counter()
    table = tables.reproduce("pod")
    dt = time.perf_counter() - t0
    assert table.cells == [[3, 8, 26, 81, 256, 809], [2, 5, 12, 29, 74, 185]]
    assert dt < 30, f"{dt:.1f} s"


@criterion(7, "exact product tail equals brute force on 200 random instances")
def test_c7_oracle_equivalence():
    anchor = tail_exact_product(PolyDecay(1, 3), ExponentConfig(2, 2), 1).raw_power
    assert anchor == pytest.approx(0.28125, rel=1e-15)
    assert tail_brute_force(PolyDecay(1, 3), ExponentConfig(2, 2), 1).raw_power == pytest.approx(0.28125, rel=1e-15)
    worst = 0.0
    for model, cfg in random_products():
        brute = brute_force_raw_tails(model, cfg)
        for k in range(model.s + 1):
            exact = tail_exact_product(model, cfg, k).raw_power
            if brute[k] == 0.0:
                assert exact == 0.0
            else:
                worst = max(worst, abs(exact - brute[k]) / brute[k])
    assert worst <= 1e-12, f"max relative deviation {worst:.3e}"


@criterion(8, "upper bounds dominate exact tails, product and POD")
def test_c8_bound_dominance():
    for model, cfg in random_products():
        for k in range(model.s + 1):
            assert tail_bound_product(model, cfg, k).value >= tail_exact_product(model, cfg, k).value
    rng = np.random.default_rng(8)
    for i in range(60):
        cfg = ExponentConfig([2, 3, math.inf][i % 3], [1, 2][i % 2])
        b = float(rng.uniform(0, 2))
        a = max(1 / cfg.p_star, b) + float(rng.uniform(0.05, 2))
        model = PODWeights(float(rng.uniform(0.1, 2)), float(rng.uniform(0.1, 2)), b, a,
                           int(rng.integers(2, 13)))
        brute = brute_force_raw_tails(model, cfg)
        for k in range(2, model.s + 1):
            assert pod_tail_bound(model, cfg, k).raw_power >= brute[k] * (1 - 1e-14)


@criterion(9, "nested-multiplication POD series equals direct summation")
def test_c9_pod_internal():
    rng = np.random.default_rng(9)
    worst = 0.0
    for i in range(100):
        cfg = ExponentConfig([2, 3, math.inf][i % 3], [1, 2][i % 2])
        b = float(rng.uniform(0, 1.5))
        a = max(1 / cfg.p_star, b) + float(rng.uniform(0.05, 2))
        k = int(rng.integers(0, 200))
        model = PODWeights(1.0, float(rng.uniform(0.2, 2)), b, a, k + int(rng.integers(1, 51)))
        t, d = pod_T(model, cfg, k), pod_T_direct(model, cfg, k)
        assert math.isfinite(t)
        worst = max(worst, abs(t - d) / d)
    assert worst <= 1e-12, f"max relative deviation {worst:.3e}"


@criterion(10, "minimality certificates and monotonicity across reproduced tables")
def test_c10_certificates_and_monotonicity():
    runs = [tables.reproduce(t) for t in ("p1", "p2q2", "q1_bound", "q1_exact", "pod", "pinf_q2")]
    runs.append(tables.reproduce("p2q2", method="scan"))
    for table in runs:
        for row in table.results:
            for res in row:
                assert res.certificate.ok, (table.name, res)
        for row in table.cells:
            assert row == sorted(row), table.name
        if table.name != "pod":
            for col in zip(*table.cells):
                assert list(col) == sorted(col, reverse=True), table.name
