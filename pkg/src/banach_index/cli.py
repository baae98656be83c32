"""Command-line front end: ``banach-index analyze|explain|oracle|list-rules``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

from .dsl import DslError, format_expr, parse
from .engine import QUANTITIES, ContradictionError, analyze, catalog_entries, explain
from .experiments import ExperimentError, experiment_names, run_experiment
from .models import ModelError
from .oracle import OptConfig

EXIT_OK, EXIT_INPUT, EXIT_EXPECTATION = 0, 1, 2
SEED_ENV = "BANACH_INDEX_SEED"


def fmt(x) -> str:
    """Floats at 12 significant digits, everything else via str."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return f"{x:.12g}"
    return str(x)


def _round(obj):
    """Round floats to 12 significant digits so text and JSON agree."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else fmt(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dump(obj) -> str:
    return json.dumps(_round(obj), indent=2, ensure_ascii=False, allow_nan=False)


def _seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, keeping 2 for failed expectations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="banach-index",
        description="Interval bounds and finite-stage estimates for thickness, "
                    "thinness and the Yost indices of Banach spaces.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("analyze", "bounds for a space expression"),
                           ("explain", "derivation of each bound")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("expression")
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("oracle", help="run a registered numerical experiment")
    sp.add_argument("experiment", help=", ".join(experiment_names()))
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--seed", type=_u64, default=None)
    sp.add_argument("--multistarts", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--thetas", type=int, default=None)

    sp = sub.add_parser("list-rules", help="print the rule catalog")
    sp.add_argument("--json", action="store_true")
    return ap


def _analyze_text(report) -> str:
    lines = [format_expr(report.expr)]
    for q in QUANTITIES:
        lines.append(f"  {q:<4} {report.intervals[q]}")
    lines.append("  flags: " + ", ".join(f"{k}={v}" for k, v in
                                         report.flags.to_dict().items()))
    lines.append("derivations:")
    lines += ["  " + line for line in explain(report).splitlines()]
    return "\n".join(lines)


def _explain_tree(report) -> str:
    out = [format_expr(report.expr)]

    def walk(d, indent):
        rel = {"lower": "≥", "upper": "≤", "exact": "="}[d.bound]
        if d.strict:
            rel = rel.replace("≥", ">").replace("≤", "<")
        out.append(f"{'  ' * indent}{d.quantity} {rel} {fmt(d.value)}  "
                   f"{d.rule_id} [{d.citation}]")
        for pr in d.premises:
            walk(pr, indent + 1)

    any_line = False
    for q in QUANTITIES:
        for d in report.derivations.get(q, ()):
            walk(d, 1)
            any_line = True
    if not any_line:
        out.append("  " + explain(report))
    return "\n".join(out)


def _oracle_text(res) -> str:
    lines = [f"experiment: {res.name}",
             "params: " + ", ".join(f"{k}={fmt(v)}" for k, v in res.params.items()),
             f"value: {fmt(res.value)}"]
    if res.bracket is not None:
        lines.append(f"bracket: [{fmt(res.bracket[0])}, {fmt(res.bracket[1])}]")
    for k, v in res.details.items():
        if k == "report":
            lines += str(v).splitlines()
        elif isinstance(v, dict):
            lines.append(f"{k}: " + ", ".join(f"{a}={fmt(b)}" for a, b in v.items()))
        elif not isinstance(v, list):
            lines.append(f"{k}: {fmt(v)}")
    for text, ok in res.checks:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {text}")
    lines.append("result: " + ("PASS" if res.passed else "FAIL"))
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    err = sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("analyze", "explain"):
            report = analyze(parse(args.expression))
            if args.json:
                print(_dump(report.to_dict()), file=out)
            elif args.command == "analyze":
                print(_analyze_text(report), file=out)
            else:
                print(_explain_tree(report), file=out)
            return EXIT_OK
        if args.command == "list-rules":
            rules = catalog_entries()
            if args.json:
                print(_dump([r.to_dict() for r in rules]), file=out)
            else:
                for r in rules:
                    print(f"{r.rule_id:<7} {r.statement}  [{r.citation}]", file=out)
            return EXIT_OK
        cfg_kw = {"seed": _seed(args.seed)}
        if args.multistarts is not None:
            cfg_kw["multistarts"] = args.multistarts
        cfg = OptConfig(**cfg_kw)
        overrides = {k: getattr(args, k) for k in ("n", "dim", "p", "r", "grid", "thetas")}
        res = run_experiment(args.experiment, overrides, cfg)
        if args.json:
            print(_dump(res.to_dict()), file=out)
        else:
            print(_oracle_text(res), file=out)
        return EXIT_OK if res.passed else EXIT_EXPECTATION
    except (DslError, ExperimentError, ModelError, ContradictionError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
