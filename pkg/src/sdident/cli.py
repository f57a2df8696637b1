"""Command-line front end.

Subcommands:

    analyze EXPR   full identifiability report (add --verify for the
                   numeric cross-check, --json for machine output)
    derive EXPR    constitutive equation, text and JSON
    tables         the two composition tables
    fiber EXPR     enumerate parameter sets with the same equation
    gen            random networks with verdicts
    verify EXPR    symbolic verdict against the rank oracle

Exit codes: 0 success, 1 usage/domain error, 2 parse error, 3 internal
inconsistency (symbolic verdict and numeric oracle disagree).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .ident import analyze
from .nettypes import classify, format_tables
from .network import NetworkExpr, ParseError, parse, params, random_network, render
from .opalg import ConstitutiveEq, InvariantViolation, constitutive, equation_to_json
from .oracle import (
    fiber_solutions,
    jacobian_rank,
    sample_point,
    verify_local,
)

_DERIV_MARKS = {0: "", 1: "̇", 2: "̈"}
_EPS = "ε"
_SIGMA = "σ"


def _symbol(base: str, order: int) -> str:
    if order in _DERIV_MARKS:
        return base + _DERIV_MARKS[order]
    return f"{base}^({order})"


def equation_text(eq: ConstitutiveEq, names: Sequence[str]) -> str:
    """One-line rendering, highest orders first, denominators cleared."""

    def side(op, base):
        parts = []
        for order in range(op.high, op.low - 1, -1):
            poly = op.coeff(order)
            if poly.is_zero:
                continue
            text = poly.to_string(names)
            sym = _symbol(base, order)
            if text == "1":
                parts.append(sym)
            elif "+" in text or "- " in text:
                parts.append(f"({text})·{sym}")
            else:
                parts.append(f"{text}·{sym}")
        return " + ".join(parts)

    return f"{side(eq.eps, _EPS)} = {side(eq.sig, _SIGMA)}"


def normalized_coefficients(eq: ConstitutiveEq, names: Sequence[str]) -> list[dict]:
    """Non-monic coefficients as strings, divided by the pivot exactly
    when the division is polynomial, as num/den otherwise."""
    pivot = eq.sig.coeffs[-1]
    out = []
    for side, op in (("eps", eq.eps), ("sigma", eq.sig)):
        top = op.high - 1 if side == "sigma" else op.high
        for order in range(top, op.low - 1, -1):
            poly = op.coeff(order)
            quotient = poly.try_divide(pivot)
            if quotient is not None:
                text = quotient.to_string(names)
            else:
                text = f"({poly.to_string(names)}) / ({pivot.to_string(names)})"
            out.append({"side": side, "order": order, "value": text})
    return out


def build_report(expr: NetworkExpr, text: str) -> dict:
    verdict = analyze(expr)
    eq = constitutive(expr)
    names = params(expr)
    shape_type, index = classify(eq)
    return {
        "expression": text,
        "canonical": render(expr),
        "parameters": names,
        "net_type": verdict.net_type.value,
        "shape_type": shape_type.value,
        "index": index,
        "shapes": {
            "eps": [eq.eps.high, eq.eps.low],
            "sigma": [eq.sig.high, eq.sig.low],
        },
        "param_count": verdict.param_count,
        "nonmonic_count": verdict.nonmonic_count,
        "local": "identifiable" if verdict.locally_identifiable else "unidentifiable",
        "constructible": verdict.constructible,
        "global": verdict.global_status.value,
        "trace": [
            {
                "connection": step.connection,
                "left": step.left.value,
                "right": step.right.value,
                "result": step.result.value,
                "node": step.node,
                "depth": step.depth,
            }
            for step in verdict.trace
        ],
        "constitutive": equation_to_json(eq, names),
        "oracle": None,
    }


def _print_human_report(report: dict) -> None:
    print(f"network:    {report['canonical']}")
    print(f"parameters: {', '.join(report['parameters'])} ({report['param_count']})")
    print(f"type:       {report['net_type']}  (shape class {report['shape_type']}, n={report['index']})")
    print(
        "shapes:     eps [{}, {}], sigma [{}, {}]".format(
            *report["shapes"]["eps"], *report["shapes"]["sigma"]
        )
    )
    print(f"non-monic coefficients: {report['nonmonic_count']}")
    if report["trace"]:
        print("type derivation:")
        for step in report["trace"]:
            indent = "  " * (step["depth"] + 1)
            print(
                f"{indent}{step['connection']}({step['left']}, {step['right']})"
                f" = {step['result']}   in {step['node']}"
            )
    print(f"local:      {report['local']}")
    print(f"one-element-at-a-time constructible: {'yes' if report['constructible'] else 'no'}")
    print(f"global:     {report['global']}")
    if report["oracle"] is not None:
        oracle = report["oracle"]
        agrees = "agrees" if oracle["agrees"] else "DISAGREES"
        print(
            f"oracle:     rank {oracle['jacobian_rank']} over {oracle['trials']} trials,"
            f" {agrees} with the symbolic verdict"
        )


def cmd_analyze(args) -> int:
    expr = parse(args.expression)
    report = build_report(expr, args.expression)
    if args.verify:
        agrees = verify_local(expr, trials=args.trials, seed=args.seed)
        point = sample_point(len(report["parameters"]), seed=args.seed)
        report["oracle"] = {
            "trials": args.trials,
            "seed": args.seed,
            "jacobian_rank": jacobian_rank(expr, point),
            "agrees": agrees,
        }
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_human_report(report)
    if report["oracle"] is not None and not report["oracle"]["agrees"]:
        print("error: numeric oracle disagrees with the symbolic verdict", file=sys.stderr)
        return 3
    return 0


def cmd_derive(args) -> int:
    expr = parse(args.expression)
    eq = constitutive(expr)
    names = params(expr)
    payload = {
        "expression": args.expression,
        "canonical": render(expr),
        "equation": equation_text(eq, names),
        "constitutive": equation_to_json(eq, names),
        "normalized": normalized_coefficients(eq, names),
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(payload["equation"])
        print("normalized coefficients (pivot: leading sigma coefficient):")
        for item in payload["normalized"]:
            print(f"  {item['side']}[{item['order']}] = {item['value']}")
    return 0


def cmd_tables(args) -> int:
    print(format_tables())
    return 0


def cmd_fiber(args) -> int:
    expr = parse(args.expression)
    try:
        report = fiber_solutions(expr, multistarts=args.starts, seed=args.seed)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    payload = {
        "expression": args.expression,
        "base": [str(v) for v in report.base.values],
        "solutions": [
            {"values": list(sol.values), "method": sol.method}
            for sol in report.solutions
        ],
        "count": len(report.solutions),
        "truncated": report.truncated,
        "multistarts": report.multistarts,
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"base point: {', '.join(payload['base'])}")
        print(f"solutions found: {payload['count']}" + (" (truncated)" if report.truncated else ""))
        for sol in report.solutions:
            values = ", ".join(f"{v:.9g}" for v in sol.values)
            print(f"  [{sol.method}] {values}")
    return 0


def cmd_gen(args) -> int:
    out = []
    for i in range(args.count):
        expr = random_network(args.seed + i, args.elements)
        verdict = analyze(expr)
        out.append(
            {
                "expression": render(expr),
                "net_type": verdict.net_type.value,
                "local": "identifiable" if verdict.locally_identifiable else "unidentifiable",
                "global": verdict.global_status.value,
            }
        )
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for item in out:
            print(f"{item['expression']}  ->  {item['net_type']}, {item['global']}")
    return 0


def cmd_verify(args) -> int:
    expr = parse(args.expression)
    verdict = analyze(expr)
    agrees = verify_local(expr, trials=args.trials, seed=args.seed)
    status = "identifiable" if verdict.locally_identifiable else "unidentifiable"
    print(f"symbolic: {status} (type {verdict.net_type})")
    print(f"oracle:   {'agrees' if agrees else 'DISAGREES'} over {args.trials} trials")
    return 0 if agrees else 3


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sdident",
        description="structural identifiability of spring-dashpot networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, fiber: bool = False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")

    p = sub.add_parser("analyze", help="full identifiability report")
    p.add_argument("expression")
    add_common(p)
    p.add_argument("--verify", action="store_true", help="run the numeric oracle")
    p.add_argument("--trials", type=int, default=3, help="oracle sample count")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("derive", help="derive the constitutive equation")
    p.add_argument("expression")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("tables", help="print the composition tables")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("fiber", help="enumerate equivalent parameter sets")
    p.add_argument("expression")
    add_common(p)
    p.add_argument("--starts", type=int, default=200, help="multistart count")
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("gen", help="generate random networks with verdicts")
    p.add_argument("--elements", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check the verdict against the rank oracle")
    p.add_argument("expression")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=3)
    p.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except InvariantViolation as err:
        print(f"internal inconsistency: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
