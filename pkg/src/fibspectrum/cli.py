"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad flag, malformed input,
failed hypothesis), 2 a computation ceiling was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .avoider import FLAT_CEILING, build_avoider, check_avoider
from .census import CENSUS_CEILING, census, census_csv, matching_bound_audit, upper_bound_eval
from .combination import plan_combination
from .construction import (
    HypercubeParams, MainParams, bits_to_target, build_main_graph, closed_form, default_params,
    digit_interval, encode_digits, random_sets,
)
from .counting import BRUTE_CEILING, count_brute, count_fast, count_via_summation_trick, independence_polynomial
from .errors import CeilingExceeded, HypothesisFailure
from .graph_core import Graph, emit_edge_list, emit_graph6, parse_edge_list, parse_graph6, realize_partial_join
from .spectra import SPECTRUM_CEILING, pad_left_spectrum, spectrum_exhaustive
from .verify import SUITES, run_suites

PARALLELISM_ENV = "FIBSPECTRUM_PARALLELISM"
GRAPH6_LIMIT = 62
FAST_CEILING = 200


class UsageError(ValueError):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parallelism(args) -> int:
    if args.parallelism is not None:
        value = args.parallelism
    else:
        raw = os.environ.get(PARALLELISM_ENV, "1")
        try:
            value = int(raw)
        except ValueError:
            raise UsageError(f"{PARALLELISM_ENV}={raw!r} is not an integer")
    if value < 1:
        raise UsageError("parallelism must be at least 1")
    return value


def _read_graph(args, flag: str = "graph6") -> Graph:
    text = getattr(args, flag, None)
    if text is not None:
        return parse_graph6(text)
    if getattr(args, "input", None):
        raw = Path(args.input).read_text()
        first = raw.strip().splitlines()[0] if raw.strip() else ""
        if first.split() and all(tok.isdigit() for tok in first.split()):
            return parse_edge_list(raw)
        return parse_graph6(first)
    raise UsageError(f"need --{flag.replace('_', '-')} or --input")


def _emit_graph(g: Graph) -> dict:
    if g.n <= GRAPH6_LIMIT:
        return {"graph6": emit_graph6(g)}
    return {"edge_list": emit_edge_list(g)}


# subcommands ----------------------------------------------------------------

def cmd_count(args) -> dict:
    g = _read_graph(args)
    if args.method == "brute":
        value = count_brute(g, args.max_n or BRUTE_CEILING)
    else:
        limit = args.max_n or FAST_CEILING
        if g.n > limit:
            raise CeilingExceeded(f"{g.n} vertices exceeds --max-n {limit}")
        value = count_fast(g)
    return {"i": str(value)}


def cmd_poly(args) -> dict:
    g = _read_graph(args)
    coeffs = independence_polynomial(g, args.max_n or BRUTE_CEILING)
    return {"coefficients": [str(c) for c in coeffs], "i": str(sum(coeffs))}


def cmd_spectrum(args) -> dict:
    g_l = parse_graph6(args.left)
    g_r = parse_graph6(args.right)
    ceiling = args.max_n or SPECTRUM_CEILING
    if args.pad:
        res = pad_left_spectrum(g_l, g_r, args.pad, ceiling)
        return {
            "t": args.pad,
            "padded": res.padded.to_json(),
            "scaled": res.scaled.to_json(),
            "shifted": res.shifted.to_json(),
            "certified": res.certified,
        }
    values = spectrum_exhaustive(g_l, g_r, ceiling, _parallelism(args))
    return {"values": values.to_json(), "size": len(values)}


def cmd_census(args) -> dict:
    ceiling = args.max_n or CENSUS_CEILING
    par = _parallelism(args)
    if args.audit:
        return matching_bound_audit(args.n, min(ceiling, 7)).to_json()
    if args.bound:
        return upper_bound_eval(args.n).to_json()
    results = [census(k, par, args.witnesses, ceiling) for k in range(1, args.n + 1)] if args.csv else []
    res = results[-1] if results else census(args.n, par, args.witnesses, ceiling)
    out = res.to_json()
    out.pop("elapsed")  # keep stdout deterministic
    if args.csv:
        Path(args.csv).write_text(census_csv(results))
    return out


def _construction_params(args) -> MainParams:
    if args.input:
        return MainParams.from_json(json.loads(Path(args.input).read_text()))
    if args.d is None or args.m is None:
        raise UsageError("need --d and --m (or --input)")
    p = default_params(args.d, args.m, epsilon=Fraction(args.epsilon))
    if args.seed is not None:
        p = p.with_sets(random_sets(p.hp, random.Random(args.seed)))
    return p


def _describe(p: MainParams, check: bool) -> dict:
    spec, _ = build_main_graph(p)
    cf = closed_form(p)
    value = cf.value(p.S)
    out = {"d": p.d, "m": p.m, "n": spec.n, "c": str(cf.constant), "i": str(value),
           "interval": list(digit_interval(p.hp))}
    if check:
        out["summation_check"] = count_via_summation_trick(spec) == value
    out.update(_emit_graph(realize_partial_join(spec)))
    return out


def cmd_construct(args) -> dict:
    p = _construction_params(args)
    out = _describe(p, not args.no_check)
    out["params"] = p.to_json()
    if args.output:
        Path(args.output).write_text(json.dumps(p.to_json(), indent=2))
    return out


def cmd_encode(args) -> dict:
    if args.d is None or args.m is None:
        raise UsageError("need --d and --m")
    hp = HypercubeParams(args.d, args.m)
    target = bits_to_target(hp, args.bits)
    p = encode_digits(hp, target, Fraction(args.epsilon))
    out = _describe(p, not args.no_check)
    out["bits"] = args.bits
    out["offset"] = str(int(out["i"]) - int(out["c"]))
    return out


def cmd_combine_plan(args) -> dict:
    plan = plan_combination(args.D, Fraction(args.delta), args.d0)
    return plan.to_json()


def cmd_avoider(args) -> dict:
    g = _read_graph(args)
    s = build_avoider(g)
    verdict = check_avoider(s, args.k, args.t, args.max_flats)
    out = {"n": g.n, "size": str(len(s)), "i": str((1 << g.n) - len(s)), **verdict.to_json()}
    if args.points:
        out["points"] = s.to_json()["points"]
    return out


def cmd_verify(args) -> dict:
    rows = run_suites(args.suite)
    return {"rows": [r.to_json() for r in rows], "passed": all(r.passed for r in rows)}


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = Parser(add_help=False)
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument("--parallelism", type=int, default=None,
                        help=f"worker processes (default ${PARALLELISM_ENV} or 1)")
    common.add_argument("--seed", type=int, default=None)

    p = Parser(prog="fibspectrum", description="Independent-set counts, spectra and constructions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    def graph_input(sp):
        sp.add_argument("--graph6")
        sp.add_argument("--input", help="file holding graph6 or an 'n m' edge list")

    sp = sub.add_parser("count", parents=[common], help="i(G)")
    graph_input(sp)
    sp.add_argument("--method", choices=["fast", "brute"], default="fast")
    sp.add_argument("--max-n", type=int)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("poly", parents=[common], help="independence polynomial")
    graph_input(sp)
    sp.add_argument("--max-n", type=int)
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("spectrum", parents=[common], help="exhaustive partial-join spectrum")
    sp.add_argument("--left", required=True, help="graph6 of the left graph")
    sp.add_argument("--right", required=True, help="graph6 of the right graph")
    sp.add_argument("--pad", type=int, default=0, help="also check padding by t isolated left vertices")
    sp.add_argument("--max-n", type=int, help="ceiling on |V_L| * |V_R|")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("census", parents=[common], help="values of i over all graphs on n vertices")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--witnesses", action="store_true")
    sp.add_argument("--csv", help="write n,Ni for 1..n to this file")
    sp.add_argument("--audit", action="store_true", help="matching-number bound audit instead")
    sp.add_argument("--bound", action="store_true", help="evaluate the numeric upper bound instead")
    sp.set_defaults(func=cmd_census)

    for name, func, helptext in [
        ("construct", cmd_construct, "hypercube construction graph"),
        ("encode", cmd_encode, "construction graph with prescribed digits"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--d", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--epsilon", default="1/10")
        sp.add_argument("--no-check", action="store_true", help="skip the summation-trick recount")
        if name == "construct":
            sp.add_argument("--input", help="MainParams JSON")
            sp.add_argument("--output", help="write MainParams JSON here")
        else:
            sp.add_argument("--bits", required=True, help="binary numeral, most significant first")
        sp.set_defaults(func=func)

    sp = sub.add_parser("combine-plan", parents=[common], help="exact arithmetic of the block combination")
    sp.add_argument("-D", type=int, required=True)
    sp.add_argument("--delta", default="1/1000")
    sp.add_argument("--d0", type=int, default=5)
    sp.set_defaults(func=cmd_combine_plan)

    sp = sub.add_parser("avoider", parents=[common], help="flat avoider built from a graph")
    graph_input(sp)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--max-flats", type=int, default=FLAT_CEILING)
    sp.add_argument("--points", action="store_true", help="include the point set (hex)")
    sp.set_defaults(func=cmd_avoider)

    sp = sub.add_parser("verify-lemmas", parents=[common], help="run the lemma suites")
    sp.add_argument("--suite", action="append", choices=sorted(SUITES))
    sp.set_defaults(func=cmd_verify)
    return p


def _table(payload) -> str:
    if "rows" in payload:
        width = max(len(r["check"]) for r in payload["rows"])
        lines = [f"{r['suite']:<13} {r['check']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  {r['detail']}"
                 for r in payload["rows"]]
        return "\n".join(lines)
    lines = []
    for key, value in payload.items():
        if isinstance(value, (list, dict)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload = args.func(args)
    except CeilingExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, HypothesisFailure, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(payload, indent=None) if args.format == "json" else _table(payload)
    print(text, file=out)
    if args.command == "verify-lemmas" and not payload["passed"]:
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
