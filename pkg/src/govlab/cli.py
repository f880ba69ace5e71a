"""Command-line interface.

Verbs: orbit, trace-governor, ancestors, conditions, scan, claims.  Output is
line-delimited JSON records (or csv for traces); scan and claims emit a single
JSON report document.  All values print as decimal strings; --max-print-bits
replaces oversized bodies with an explicit elision marker.

Exit codes: 0 success, 1 claim failure detected, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import claims as claims_mod
from .cycles import DEFAULT_CHUNK_SIZE, CheckpointError, scan_range
from .dynamics import OrbitLimits, governor_trace, next_odd, orbit, rule_for
from .genealogy import ancestor_tree, odd_ancestors, solve_ancestor_conditions
from .numerics import governor_index

EXIT_OK = 0
EXIT_CLAIM_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _odd_natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"expected a positive odd integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _odd_range(text: str) -> tuple[int, int]:
    lo_text, sep, hi_text = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    lo = _odd_natural(lo_text)
    hi = _odd_natural(hi_text)
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _default_workers() -> int:
    env = os.environ.get("GOVLAB_WORKERS", "")
    if env.strip():
        try:
            n = int(env)
            if n >= 1:
                return n
        except ValueError:
            pass
    return 1


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="govlab",
        description="Exact-arithmetic toolkit for 3Z+1 and 5Z+1 dynamics",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_rule(p: argparse.ArgumentParser) -> None:
        p.add_argument("--rule", type=int, choices=(3, 5), default=3,
                       help="multiplier q of the qZ+1 rule (default 3)")

    def add_print_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("records", "csv"), default="records",
                       help="records = line-delimited JSON (default)")
        p.add_argument("--max-print-bits", type=_positive_int, default=None,
                       help="elide value bodies over this bit length")

    p_orbit = sub.add_parser("orbit", help="iterate the step functions from a seed")
    add_rule(p_orbit)
    p_orbit.add_argument("--start", type=_odd_natural, required=True)
    p_orbit.add_argument("--step-limit", type=_positive_int, default=100_000)
    p_orbit.add_argument("--value-limit-bits", type=_positive_int, default=4096)
    add_print_opts(p_orbit)

    p_trace = sub.add_parser("trace-governor",
                             help="governor indices of the first odd values of an orbit")
    add_rule(p_trace)
    p_trace.add_argument("--start", type=_odd_natural, required=True)
    p_trace.add_argument("--count", type=_positive_int, default=10,
                         help="number of odd values, seed included (default 10)")
    add_print_opts(p_trace)

    p_anc = sub.add_parser("ancestors", help="odd preimages of a value")
    add_rule(p_anc)
    p_anc.add_argument("--start", type=_odd_natural, required=True)
    p_anc.add_argument("--max-doublings", type=_positive_int, default=8)
    p_anc.add_argument("--depth", type=_positive_int, default=1,
                       help="recursion depth; above 1 the output is a tree")
    add_print_opts(p_anc)

    p_cond = sub.add_parser("conditions", help="odd-ancestor existence condition solver")
    add_rule(p_cond)
    p_cond.add_argument("--mu-max", type=_positive_int, default=64)
    p_cond.add_argument("--i-max", type=_positive_int, default=64)
    add_print_opts(p_cond)

    p_scan = sub.add_parser("scan", help="classify every odd seed in a range")
    add_rule(p_scan)
    p_scan.add_argument("--odd-range", type=_odd_range, required=True, metavar="LO:HI")
    p_scan.add_argument("--step-limit", type=_positive_int, default=100_000)
    p_scan.add_argument("--value-limit-bits", type=_positive_int, default=128)
    p_scan.add_argument("--workers", type=_positive_int, default=_default_workers())
    p_scan.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
    p_scan.add_argument("--checkpoint", default=None, metavar="FILE",
                        help="resumable scan state file")

    p_claims = sub.add_parser("claims", help="run registered claim checks")
    group = p_claims.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="run C1..C7 (default)")
    group.add_argument("--id", action="append", dest="ids", metavar="CLAIM",
                       help="run one claim (repeatable)")
    group.add_argument("--list", action="store_true", help="list the registry")
    p_claims.add_argument("--params", default=None, metavar="JSON",
                          help='per-claim overrides, e.g. {"C6": {"placeholder_exponent": 16}}')
    p_claims.add_argument("--workers", type=_positive_int, default=_default_workers(),
                          help="worker count for scan-backed claims")

    return parser.parse_args(argv)


def _fmt_value(v: int, max_print_bits: int | None) -> str:
    if max_print_bits is not None and v.bit_length() > max_print_bits:
        return f"<elided {v.bit_length()}-bit value>"
    return str(v)


def _emit_records(rows: list[dict], fmt: str, columns: list[str]) -> None:
    if fmt == "records":
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    else:
        print(",".join(columns))
        for row in rows:
            print(",".join(str(row.get(c, "")) for c in columns))


def _cmd_orbit(ns: argparse.Namespace) -> int:
    rule = rule_for(ns.rule)
    limits = OrbitLimits(max_steps=ns.step_limit, max_value_bits=ns.value_limit_bits)
    trace = orbit(ns.start, rule, limits)
    rows = []
    for value, kind in trace.steps:
        row: dict = {"value": _fmt_value(value, ns.max_print_bits), "kind": kind.value}
        if value % 2:
            row["governor_index"] = governor_index(value)
        rows.append(row)
    rows[-1]["termination"] = trace.termination.kind.value
    if trace.termination.cycle_members is not None:
        rows[-1]["cycle_members"] = [
            _fmt_value(v, ns.max_print_bits) for v in trace.termination.cycle_members
        ]
    _emit_records(rows, ns.format, ["value", "kind", "governor_index", "termination"])
    return EXIT_OK


def _cmd_trace_governor(ns: argparse.Namespace) -> int:
    rule = rule_for(ns.rule)
    indices = governor_trace(ns.start, rule, ns.count)
    cur = ns.start
    rows = []
    for pos, m in enumerate(indices):
        rows.append(
            {"position": pos, "value": _fmt_value(cur, ns.max_print_bits),
             "governor_index": m}
        )
        if pos + 1 < len(indices):
            cur, _ = next_odd(cur, rule)
    _emit_records(rows, ns.format, ["position", "value", "governor_index"])
    return EXIT_OK


def _cmd_ancestors(ns: argparse.Namespace) -> int:
    rule = rule_for(ns.rule)
    if ns.depth == 1:
        rows = [
            {"doublings": e.doublings,
             "ancestor": _fmt_value(e.ancestor, ns.max_print_bits),
             "governor_index": governor_index(e.ancestor)}
            for e in odd_ancestors(ns.start, rule, ns.max_doublings)
        ]
        _emit_records(rows, ns.format, ["doublings", "ancestor", "governor_index"])
        return EXIT_OK
    root = ancestor_tree(ns.start, rule, ns.depth, ns.max_doublings)
    rows = []

    def walk(node, depth: int, parent: int | None) -> None:
        rows.append(
            {"depth": depth,
             "value": _fmt_value(node.value, ns.max_print_bits),
             "governor_index": node.governor_index,
             "trivial_governor": node.trivial_governor,
             "parent": "" if parent is None else _fmt_value(parent, ns.max_print_bits)}
        )
        for child in node.children:
            walk(child, depth + 1, node.value)

    walk(root, 0, None)
    _emit_records(rows, ns.format,
                  ["depth", "value", "governor_index", "trivial_governor", "parent"])
    return EXIT_OK


def _cmd_conditions(ns: argparse.Namespace) -> int:
    rule = rule_for(ns.rule)
    rows = [
        {"terms": s.term_count, "mu": s.mu, "i": s.i}
        for s in solve_ancestor_conditions(rule, ns.mu_max, ns.i_max)
    ]
    _emit_records(rows, ns.format, ["terms", "mu", "i"])
    return EXIT_OK


def _cmd_scan(ns: argparse.Namespace) -> int:
    rule = rule_for(ns.rule)
    lo, hi = ns.odd_range
    limits = OrbitLimits(max_steps=ns.step_limit, max_value_bits=ns.value_limit_bits)
    report = scan_range(
        lo, hi, rule, limits,
        workers=ns.workers,
        chunk_size=ns.chunk_size,
        checkpoint_path=ns.checkpoint,
    )
    sys.stdout.write(report.to_json())
    return EXIT_OK


def _cmd_claims(ns: argparse.Namespace) -> int:
    if ns.list:
        for claim_id, title, statement in claims_mod.list_claims():
            print(json.dumps(
                {"claim_id": claim_id, "title": title, "statement": statement},
                sort_keys=True,
            ))
        return EXIT_OK
    overrides: dict[str, dict] = {}
    if ns.params:
        try:
            overrides = json.loads(ns.params)
        except json.JSONDecodeError as exc:
            print(f"govlab claims: --params is not valid JSON: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if not isinstance(overrides, dict):
            print("govlab claims: --params must be a JSON object", file=sys.stderr)
            return EXIT_USAGE
    ids = ns.ids if ns.ids else [claim_id for claim_id, _, _ in claims_mod.list_claims()]
    results = []
    for claim_id in ids:
        params = dict(overrides.get(claim_id, {}))
        if "workers" in claims_mod.claim_defaults(claim_id):
            params.setdefault("workers", ns.workers)
        results.append(claims_mod.run_claim(claim_id, params))
    report = claims_mod.ClaimReport(results=tuple(results))
    sys.stdout.write(report.to_json())
    return EXIT_CLAIM_FAILURE if report.any_failed else EXIT_OK


_HANDLERS = {
    "orbit": _cmd_orbit,
    "trace-governor": _cmd_trace_governor,
    "ancestors": _cmd_ancestors,
    "conditions": _cmd_conditions,
    "scan": _cmd_scan,
    "claims": _cmd_claims,
}


def execute(ns: argparse.Namespace) -> int:
    try:
        return _HANDLERS[ns.verb](ns)
    except (CheckpointError, OSError) as exc:
        print(f"govlab: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"govlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    ns = parse_args(sys.argv[1:] if argv is None else argv)
    return execute(ns)


if __name__ == "__main__":
    sys.exit(main())
