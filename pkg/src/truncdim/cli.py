"""Command-line front end: ``truncdim {dim,bound,kernel,norm,reproduce,oracle}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import exponents, series, tables, truncation
from .dimension import DimensionQuery, dim_upper_bound
from .errors import (
    DivergenceError,
    EnumerationLimitError,
    NoSolutionError,
    TruncDimError,
)
from .exponents import ExponentConfig, parse_extended
from .pod import pod_T, pod_T_direct, pod_tail_bound
from .weights import (
    MAX_ENUMERATION_DIM,
    PODWeights,
    PolyDecay,
    ProductWeights,
    kernel_eval,
    load_gammas,
    weight_sum,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

# Flags that identify a computation; presentation flags are not recorded.
_PRESENTATION = {"command", "format", "verbose", "jobs", "check", "handler"}


class UsageError(Exception):
    pass


def _dimension_arg(text: str):
    value = parse_extended(text)
    if math.isinf(value):
        return math.inf
    if value != int(value) or value < 0:
        raise argparse.ArgumentTypeError(f"not a dimension: {text!r}")
    return int(value)


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("model")
    g.add_argument("--weights", choices=["poly", "explicit", "pod", "random"], default="poly")
    g.add_argument("--a", type=float)
    g.add_argument("--b", type=float, default=1.0)
    g.add_argument("--c1", type=float, default=1.0)
    g.add_argument("--c2", type=float, default=1.0)
    g.add_argument("--gammas-file", metavar="PATH")
    g.add_argument("--s", type=_dimension_arg)
    g = parser.add_argument_group("exponents")
    g.add_argument("--p", default="2")
    g.add_argument("--q", default="2")
    g.add_argument("--norm", choices=["bound", "exact"], default="bound",
                   help="exact: use the exact embedding norm (q = 1 only)")
    g.add_argument("--cutoff", type=int, default=series.DEFAULT_CUTOFF, metavar="J")
    parser.add_argument("--format", choices=["text", "csv", "json", "md"], default="text")
    parser.add_argument("--jobs", type=int, default=1, metavar="N")
    parser.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncdim",
        description="Truncation-error bounds and truncation dimensions for weighted anchored spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="truncation level k(eps)")
    _common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=["definition", "budget"], default="definition")
    p.add_argument("--method", choices=["auto", "closed-form", "scan"], default="auto")
    p.set_defaults(handler=cmd_dim)

    p = sub.add_parser("bound", help="truncation-error term at a given k")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="exact tail instead of the upper bound")
    p.add_argument("--algo-error", type=float, help="error of the k-variate algorithm to combine")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("kernel", help="reproducing kernel K(x, y) for p = 2")
    _common(p)
    p.add_argument("--x", required=True, help="comma-separated coordinates")
    p.add_argument("--y", required=True, help="comma-separated coordinates")
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("norm", help="embedding constants and continuity bound")
    _common(p)
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("reproduce", help="regenerate a published table")
    _common(p)
    p.add_argument("--table", choices=tables.TABLE_IDS, required=True)
    p.add_argument("--method", choices=["auto", "closed-form", "scan"], default="auto")
    p.add_argument("--check", action="store_true", help="diff against the published values")
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("oracle", help="brute-force checks of the tail formulas")
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(handler=cmd_oracle)
    return parser


def _config(args) -> ExponentConfig:
    return ExponentConfig(parse_extended(args.p), parse_extended(args.q), norm=args.norm)


def _model(args):
    if args.weights == "poly":
        if args.a is None:
            raise UsageError("--weights poly needs --a")
        return PolyDecay(args.a, math.inf if args.s is None else args.s)
    if args.weights == "pod":
        s = 10000 if args.s is None else args.s
        return PODWeights(args.c1, args.c2, args.b, 4.0 if args.a is None else args.a, s)
    if args.weights == "explicit":
        if not args.gammas_file:
            raise UsageError("--weights explicit needs --gammas-file")
        model = load_gammas(args.gammas_file)
        if args.s is not None:
            if args.s > model.s:
                raise UsageError(f"--s {args.s} exceeds the {model.s} weights in the file")
            model = ProductWeights(model.gammas[: args.s])
        return model
    raise UsageError("--weights random is only available for the oracle command")


def _inputs(args) -> Dict[str, Any]:
    out = {}
    for key, value in vars(args).items():
        if key in _PRESENTATION or value is None or value is False:
            continue
        out[key.replace("_", "-")] = "inf" if isinstance(value, float) and math.isinf(value) else value
    return out


def argv_from_inputs(command: str, inputs: Dict[str, Any]) -> List[str]:
    """Rebuild an argument vector from a record's ``inputs`` block."""
    argv = [command]
    for key, value in inputs.items():
        if value is True:
            argv.append(f"--{key}")
        else:
            argv.extend([f"--{key}", str(value)])
    return argv


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _flatten(prefix: str, value, out: Dict[str, Any]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    else:
        out[prefix] = value


def emit(record: Dict[str, Any], fmt: str, stream) -> None:
    record = _jsonable(record)
    if fmt == "json":
        stream.write(json.dumps(record, sort_keys=True) + "\n")
        return
    flat: Dict[str, Any] = {}
    _flatten("", record, flat)
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(list(flat))
        w.writerow(list(flat.values()))
    elif fmt == "md":
        stream.write("| field | value |\n|---|---|\n")
        for k, v in flat.items():
            stream.write(f"| {k} | {v} |\n")
    else:
        width = max(len(k) for k in flat)
        for k, v in flat.items():
            stream.write(f"{k.ljust(width)}  {v}\n")


def _record(args, outputs, exactness=None, method=None, threshold=None, certificate=None):
    return {
        "command": args.command,
        "inputs": _inputs(args),
        "outputs": outputs,
        "exactness": exactness,
        "method": method,
        "threshold": threshold,
        "certificate": certificate,
    }


_METHODS = {"auto": "auto", "closed-form": "closed_form"}


def cmd_dim(args, out) -> int:
    model, cfg = _model(args), _config(args)
    method = _METHODS.get(args.method)
    if method is None:  # scan
        finite_product = model.is_product and not math.isinf(model.s)
        method = "direct_scan" if finite_product else "bound_scan"
    res = dim_upper_bound(DimensionQuery(model, cfg, args.eps, args.mode, method, args.cutoff))
    c = res.certificate
    outputs = {"k": res.k, "is_exact_dimension": res.is_exact_dimension, "vacuous": res.vacuous}
    if cfg.extrapolated:
        outputs["extrapolated"] = True
    emit(_record(args, outputs,
                 exactness="exact" if res.is_exact_dimension else "upper_bound",
                 method=res.method_used, threshold=res.threshold_used,
                 certificate={"k_pass": c.k_pass, "k_minus_one_fail": c.k_minus_one_fail,
                              "tail_at_k": c.tail_at_k,
                              "tail_at_k_minus_one": c.tail_at_k_minus_one}),
         args.format, out)
    return EXIT_OK if c.ok else EXIT_NUMERIC


def cmd_bound(args, out) -> int:
    model, cfg = _model(args), _config(args)
    k = args.k
    if cfg.p == 1:
        tail, method = truncation.tail_p1(model, k), "max_form"
    elif args.exact:
        if model.is_product:
            tail, method = truncation.tail_exact_product(model, cfg, k), "product_difference"
        else:
            tail, method = truncation.tail_brute_force(model, cfg, k), "enumeration"
    elif model.is_product:
        tail, method = truncation.tail_bound_product(model, cfg, k, args.cutoff), "product_bound"
    else:
        tail, method = pod_tail_bound(model, cfg, k), "pod_bound"
    outputs = {"k": tail.k, "value": tail.value, "raw_power": tail.raw_power}
    if args.algo_error is not None:
        outputs["combined_error"] = truncation.combined_error(args.algo_error, tail, cfg)
    emit(_record(args, outputs, exactness=tail.exactness, method=method), args.format, out)
    return EXIT_OK


def _coords(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad coordinate list {text!r}") from exc


def cmd_kernel(args, out) -> int:
    model = _model(args)
    value = kernel_eval(model, _coords(args.x), _coords(args.y))
    form = "product" if model.is_product else "subset_sum"
    emit(_record(args, {"kernel": value}, exactness="exact", method=form), args.format, out)
    return EXIT_OK


def cmd_norm(args, out) -> int:
    cfg = _config(args)
    outputs: Dict[str, Any] = {
        "p_star": cfg.p_star,
        "combine_mode": cfg.combine_mode,
        "embedding_norm_upper": exponents.embedding_norm_upper(cfg),
    }
    if cfg.p > 1:
        outputs["embedding_factor"] = cfg.C
        if cfg.q == 1:
            outputs["embedding_norm_exact_q1"] = exponents.embedding_norm_exact_q1(cfg.p)
    if cfg.extrapolated:
        outputs["extrapolated"] = True
    if args.a is not None or args.weights != "poly":
        model = _model(args)
        if model.is_product:
            if cfg.p > 1:
                outputs["continuity_bound_Ss"] = exponents.continuity_bound_Ss(model, cfg, args.cutoff)
            outputs["weight_sum"] = weight_sum(model, args.cutoff)
    exact = "upper_bound" if math.isinf(args.s or math.inf) else "exact"
    emit(_record(args, outputs, exactness=exact, method="formula"), args.format, out)
    return EXIT_OK


def cmd_reproduce(args, out) -> int:
    table = tables.reproduce(args.table, args.method, args.cutoff, max(1, args.jobs))
    out.write(table.render(args.format))
    if not args.check:
        return EXIT_OK
    diffs = tables.check(table)
    total = sum(len(r) for r in table.cells)
    if diffs:
        for row, col, got, want in diffs:
            print(f"mismatch {args.table} [{row}, {col}]: got {got}, published {want}", file=sys.stderr)
        print(f"{total - len(diffs)}/{total} cells match", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"{total}/{total} cells match", file=sys.stderr)
    return EXIT_OK


def _random_product(rng: np.random.Generator, s: int) -> ProductWeights:
    g = np.sort(rng.uniform(0.0, 1.0, size=s))[::-1]
    g = np.clip(g, np.finfo(float).tiny, 1.0)
    return ProductWeights(tuple(g))


def _oracle_product(model, cfg) -> Dict[str, Any]:
    brute = truncation.brute_force_raw_tails(model, cfg)
    table = truncation.exact_product_tails(model, cfg)
    dev, dominated = 0.0, True
    for k in range(model.s + 1):
        exact = table(k)
        if brute[k]:
            dev = max(dev, abs(exact - brute[k]) / brute[k])
        elif exact:
            dev = math.inf
        if truncation.tail_bound_product(model, cfg, k).value < truncation.TailBound.from_raw(
                exact, cfg.p_star, k, "exact").value:
            dominated = False
    return {"max_rel_dev": dev, "bound_dominates": dominated}


def _oracle_pod(model, cfg) -> Dict[str, Any]:
    brute = truncation.brute_force_raw_tails(model, cfg)
    dominated, dev = True, 0.0
    for k in range(2, model.s + 1):
        if pod_tail_bound(model, cfg, k).raw_power < brute[k]:
            dominated = False
        t, d = pod_T(model, cfg, k), pod_T_direct(model, cfg, k)
        if d:
            dev = max(dev, abs(t - d) / d)
    return {"bound_dominates": dominated, "pod_T_max_rel_dev": dev}


def cmd_oracle(args, out) -> int:
    if args.s == 0:
        emit(_record(args, {"instances": 0}, method="enumeration"), args.format, out)
        return EXIT_OK
    cfg = _config(args)
    cfg.require_p_gt_1("the oracle comparison")
    if args.s is not None and args.s > MAX_ENUMERATION_DIM:
        raise EnumerationLimitError(
            f"subset enumeration supports s <= {MAX_ENUMERATION_DIM}, got s = {args.s}")
    if args.weights == "random":
        rng = np.random.default_rng(args.seed)
        s = 12 if args.s is None else args.s
        models = [_random_product(rng, s) for _ in range(max(1, args.trials))]
    else:
        if args.weights in ("poly", "pod") and args.s is None:
            raise UsageError("the oracle needs a finite --s")
        models = [_model(args)]
    reports = [(_oracle_product if m.is_product else _oracle_pod)(m, cfg) for m in models]
    outputs: Dict[str, Any] = {"instances": len(reports),
                               "bound_dominates": all(r["bound_dominates"] for r in reports)}
    for key in ("max_rel_dev", "pod_T_max_rel_dev"):
        vals = [r[key] for r in reports if key in r]
        if vals:
            outputs[key] = max(vals)
    emit(_record(args, outputs, exactness="exact", method="enumeration"), args.format, out)
    ok = outputs["bound_dominates"] and outputs.get("max_rel_dev", 0.0) <= 1e-12
    return EXIT_OK if ok else EXIT_NUMERIC


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return args.handler(args, out)
    except (DivergenceError, NoSolutionError, EnumerationLimitError) as exc:
        print(f"truncdim: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, TruncDimError, OSError) as exc:
        print(f"truncdim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
