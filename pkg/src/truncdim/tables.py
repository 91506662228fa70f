"""Reproduction of the published truncation-level tables and product constants."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

from . import series
from .dimension import (
    DimensionQuery,
    DimensionResult,
    dim_p1_polydecay,
    dim_upper_bound,
    k_eps_closed_form,
    k_eps_scan,
)
from .errors import InvalidParameterError
from .exponents import ExponentConfig, product_of_factors
from .weights import PODWeights, PolyDecay

EPSILONS: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
EPS_LABELS = ("1e-1", "1e-2", "1e-3", "1e-4", "1e-5", "1e-6")
SCAN_DIM = 1_000_000
POD_DIM = 10_000

# Published values, keyed by table id then row label.
GOLDEN: Dict[str, Dict[str, List[Any]]] = {
    "p1": {
        "a=2": [3, 9, 31, 99, 316, 999],
        "a=3": [2, 4, 9, 21, 46, 99],
        "a=4": [1, 3, 5, 9, 17, 31],
        "a=5": [1, 2, 3, 6, 9, 15],
    },
    "p2q2": {
        "a=2": [4, 17, 80, 373, 1733, 8045],
        "a=3": [2, 5, 12, 31, 79, 198],
        "a=4": [2, 3, 6, 11, 22, 42],
        "a=5": [1, 2, 4, 6, 11, 18],
    },
    "pinf_q2": {
        "a=3": [3, 10, 32, 101, 319, 1010],
        "a=4": [2, 4, 9, 19, 40, 86],
        "a=5": [1, 3, 5, 8, 15, 26],
    },
    "q1_bound": {
        "a=2": [4, 16, 76, 354, 1643, 7628],
        "a=3": [2, 5, 12, 30, 76, 192],
        "a=4": [2, 3, 6, 11, 21, 41],
        "a=5": [1, 2, 4, 6, 10, 17],
    },
    "q1_exact": {
        "a=2": [3, 14, 67, 312, 1449, 6727],
        "a=3": [2, 4, 11, 28, 71, 178],
        "a=4": [1, 3, 5, 10, 20, 39],
        "a=5": [1, 2, 4, 6, 10, 17],
    },
    "pod": {
        "p=inf": [3, 8, 26, 81, 256, 809],
        "p=2": [2, 5, 12, 29, 74, 185],
    },
    "constants": {
        "a=2": [1.56225],
        "a=3": [1.51302],
        "a=4": [1.50306],
        "a=5": [1.50075],
    },
}

TABLE_IDS = tuple(GOLDEN)

TITLES = {
    "p1": "truncation dimension, p = 1, gamma_j = j^-a",
    "p2q2": "k(eps), p = q = 2, gamma_j = j^-a",
    "pinf_q2": "k(eps), p = inf, q = 2, s = 10^6",
    "q1_bound": "k(eps), p = 2, q = 1, embedding-norm bound",
    "q1_exact": "k(eps), p = 2, q = 1, exact embedding norm",
    "pod": "k(eps), POD weights b = c1 = c2 = 1, a = 4, q = 2, s = 10^4",
    "constants": "upper estimate of prod_j (1 + j^-2a / 2), 1000 explicit factors",
}


@dataclass
class ReproductionTable:
    name: str
    row_labels: List[str]
    col_labels: List[str]
    cells: List[List[Any]]
    metadata: Dict[str, Any] = field(default_factory=dict)
    results: List[List[DimensionResult]] = field(default_factory=list, repr=False)

    def render(self, fmt: str = "text") -> str:
        if fmt == "text":
            return _render_text(self)
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["row", *self.col_labels])
            for label, row in zip(self.row_labels, self.cells):
                w.writerow([label, *(_fmt_cell(self, c) for c in row)])
            return buf.getvalue()
        if fmt == "md":
            lines = ["| | " + " | ".join(self.col_labels) + " |",
                     "|" + "---|" * (len(self.col_labels) + 1)]
            for label, row in zip(self.row_labels, self.cells):
                lines.append(f"| {label} | " + " | ".join(_fmt_cell(self, c) for c in row) + " |")
            return "\n".join(lines) + "\n"
        if fmt == "json":
            return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"
        raise InvalidParameterError(f"unknown format {fmt!r}")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
            "cells": self.cells,
            "metadata": self.metadata,
        }


def _fmt_cell(table: ReproductionTable, value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.{table.metadata.get('decimals', 5)}f}"
    return str(value)


def _render_text(table: ReproductionTable) -> str:
    head = ["eps" if table.name != "constants" else "", *table.col_labels]
    rows = [[label, *(_fmt_cell(table, c) for c in row)]
            for label, row in zip(table.row_labels, table.cells)]
    widths = [max(len(r[i]) for r in [head, *rows]) for i in range(len(head))]

    def line(cols):
        first = cols[0].ljust(widths[0])
        rest = " ".join(c.rjust(w) for c, w in zip(cols[1:], widths[1:]))
        return f"{first} | {rest}"

    out = [f"# {TITLES[table.name]}", line(head), "-" * len(line(head))]
    out.extend(line(r) for r in rows)
    return "\n".join(out) + "\n"


def _rows_a(table_id: str) -> List[float]:
    return [float(label.split("=")[1]) for label in GOLDEN[table_id]]


def _grid(cell: Callable[[int, int], DimensionResult], nrows: int, jobs: int):
    coords = [(i, j) for i in range(nrows) for j in range(len(EPSILONS))]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(lambda ij: cell(*ij), coords))
    else:
        flat = [cell(i, j) for i, j in coords]
    ncol = len(EPSILONS)
    return [flat[i * ncol:(i + 1) * ncol] for i in range(nrows)]


def _product_table(table_id: str, cfg: ExponentConfig, method: str, cutoff: int, jobs: int):
    rows = _rows_a(table_id)
    if method == "scan":
        def cell(i, j):
            q = DimensionQuery(PolyDecay(rows[i], SCAN_DIM), cfg, EPSILONS[j], "budget",
                               "direct_scan", cutoff)
            return k_eps_scan(q)
        meta = {"s": SCAN_DIM, "method": "direct_scan"}
    else:
        products = [product_of_factors(PolyDecay(a), cfg, cutoff) for a in rows]

        def cell(i, j):
            return k_eps_closed_form(rows[i], cfg, EPSILONS[j], products[i], "budget")
        meta = {"s": "inf", "method": "closed_form", "cutoff": cutoff,
                "products": dict(zip(GOLDEN[table_id], products))}
    return _grid(cell, len(rows), jobs), meta


def reproduce(table_id: str, method: str = "auto", cutoff: int = series.DEFAULT_CUTOFF,
              jobs: int = 1) -> ReproductionTable:
    """Recompute a published table with the parameters it was printed for.

    ``method="scan"`` replaces the closed forms of the product tables by exact
    product-difference scans at ``s = 10^6``.
    """
    if table_id not in GOLDEN:
        raise InvalidParameterError(f"unknown table {table_id!r}; choose from {TABLE_IDS}")
    if method not in ("auto", "closed-form", "closed_form", "scan"):
        raise InvalidParameterError(f"unknown method {method!r}")
    row_labels = list(GOLDEN[table_id])
    meta: Dict[str, Any]

    if table_id == "constants":
        values = [series.infinite_product_upper(2 * a, 0.5, cutoff) for a in _rows_a(table_id)]
        return ReproductionTable(table_id, row_labels, ["product"], [[v] for v in values],
                                 {"cutoff": cutoff, "decimals": 5})

    if table_id == "p1":
        rows = _rows_a(table_id)
        grid = _grid(lambda i, j: dim_p1_polydecay(rows[i], EPSILONS[j]), len(rows), jobs)
        meta = {"p": 1, "s": "inf", "method": "closed_form", "mode": "definition"}
    elif table_id == "pinf_q2":
        rows = _rows_a(table_id)
        cfg = ExponentConfig(math.inf, 2)

        def cell(i, j):
            q = DimensionQuery(PolyDecay(rows[i], SCAN_DIM), cfg, EPSILONS[j], "budget",
                               "direct_scan", cutoff)
            return k_eps_scan(q)
        grid = _grid(cell, len(rows), jobs)
        meta = {"p": "inf", "q": 2, "s": SCAN_DIM, "method": "direct_scan", "mode": "budget"}
    elif table_id == "pod":
        cfgs = [ExponentConfig(math.inf, 2), ExponentConfig(2, 2)]
        model = PODWeights(c1=1, c2=1, b=1, a=4, s=POD_DIM)

        def cell(i, j):
            return dim_upper_bound(DimensionQuery(model, cfgs[i], EPSILONS[j], "budget",
                                                  "bound_scan", cutoff))
        grid = _grid(cell, 2, jobs)
        meta = {"q": 2, "s": POD_DIM, "a": 4, "b": 1, "c1": 1, "c2": 1,
                "method": "bound_scan", "mode": "budget"}
    else:
        cfg = {
            "p2q2": ExponentConfig(2, 2),
            "q1_bound": ExponentConfig(2, 1),
            "q1_exact": ExponentConfig(2, 1, norm="exact"),
        }[table_id]
        grid, meta = _product_table(table_id, cfg, "scan" if method == "scan" else "closed_form",
                                    cutoff, jobs)
        meta.update({"p": cfg.p, "q": cfg.q, "norm": cfg.norm, "mode": "budget"})

    cells = [[r.k for r in row] for row in grid]
    return ReproductionTable(table_id, row_labels, list(EPS_LABELS), cells, meta, grid)


def check(table: ReproductionTable) -> List[Tuple[str, str, Any, Any]]:
    """Cells that differ from the published values, as ``(row, col, got, expected)``."""
    golden = GOLDEN[table.name]
    diffs = []
    for label, row in zip(table.row_labels, table.cells):
        for col, got, want in zip(table.col_labels, row, golden[label]):
            same = round(got, 5) == want if isinstance(want, float) else got == want
            if not same:
                diffs.append((label, col, got, want))
    return diffs
