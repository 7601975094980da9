"""Command-line front end: analyze, construct, oracle, contract, export-dot.

Exit codes:
  0  success (feasible verdicts, code constructed, oracle found a code)
  1  malformed or invalid instance, bad arguments
  2  rate 1/3 infeasible (analyze) or no code exists (oracle)
  3  inconclusive (analyze) or oracle node budget exhausted
  4  construction ran out of retries
  5  no explored maximal contraction meets the construction conditions
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import __version__, gf, inference, oracle
from .constructor import construct_rate_third, theorem2_predicate
from .contraction import maximal_contraction
from .errors import BudgetExceeded, IcfeasError, NoQualifyingContraction, RetryExhausted
from .model import Problem, load_problem, problem_to_dict
from .structure import Inventory, alignment_sets, inventory, spic_alignment_sets, to_dot

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_UNKNOWN = 3
EXIT_RETRIES = 4
EXIT_NO_CONTRACTION = 5

_VERDICT_EXIT = {
    inference.RATE1: EXIT_OK,
    inference.RATE_HALF: EXIT_OK,
    inference.RATE_THIRD_INFEASIBLE: EXIT_INFEASIBLE,
    inference.INCONCLUSIVE: EXIT_UNKNOWN,
}


def _parse_subsets(text: str | None) -> list[frozenset[int]]:
    if not text:
        return []
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            out.append(frozenset(int(x) for x in chunk.split(",")))
    return out


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


# -- analyze -----------------------------------------------------------------------

def _full_inventory(p: Problem) -> Inventory:
    inv = inventory(p)
    pairs = inference.rate1_infeasible_pairs(p, inv.spic)
    return Inventory(
        inv.alignment, inv.alignment_sets, inv.triangular, inv.type2, inv.xtype2,
        inv.stic, inv.spic, tuple(spic_alignment_sets(p, inv.spic, pairs)),
    )


def build_report(p: Problem, q: int | None = None) -> dict[str, Any]:
    sets, _ = alignment_sets(p)
    inv = _full_inventory(p)
    matches: dict[str, list[Any]] = {k: [] for k in inv.counts()}
    for m in inv.all_matches():
        if not all(w is not None and w.holds(p) for w in m.witnesses):
            raise IcfeasError(f"{m.kind} match {sorted(m.members)} failed re-validation")
        matches[m.kind].append(m.to_dict())
    cert = inference.quick_verdict(p, q)
    return {
        "instance": {
            "n": p.n,
            "receivers": len(p.receivers),
            "conflicts": [list(c) for c in sorted(p.conflicts)],
            "alignment_sets": [sorted(s) for s in sets],
        },
        "patterns": {"counts": inv.counts(), "matches": matches},
        "verdict": cert.to_dict(),
        "theorem2": theorem2_predicate(p),
        "q": q,
    }


def _analyze_text(rep: dict[str, Any]) -> str:
    inst = rep["instance"]
    lines = [
        f"messages: {inst['n']}  receivers: {inst['receivers']}  conflicts: {len(inst['conflicts'])}",
        "alignment sets: " + " ".join("{" + ",".join(map(str, s)) + "}" for s in inst["alignment_sets"]),
        "patterns: " + ", ".join(f"{k}={v}" for k, v in rep["patterns"]["counts"].items()),
    ]
    for kind, ms in rep["patterns"]["matches"].items():
        for m in ms:
            lines.append(f"  {kind}: {m['members']}")
    v = rep["verdict"]
    lines.append(f"verdict: {v['verdict']} ({v['reason']})")
    for f in v["facts_used"]:
        lines.append(f"  fact {f['subset']} dims {f['allowed_dims']} via {f['rule']}")
    return "\n".join(lines)


def cmd_analyze(args: argparse.Namespace) -> int:
    p = load_problem(args.instance)
    rep = build_report(p, args.q)
    _emit(args, _analyze_text(rep) if args.text else _dump(rep))
    return _VERDICT_EXIT[rep["verdict"]["verdict"]]


# -- construct --------------------------------------------------------------------

def cmd_construct(args: argparse.Namespace) -> int:
    p = load_problem(args.instance)
    q = args.q if args.q is not None else 101
    policies = [x.strip() for x in args.policies.split(",") if x.strip()]
    try:
        res = construct_rate_third(p, gf.Field(q), seed=args.seed, max_retries=args.retries, policies=policies)
    except (RetryExhausted, NoQualifyingContraction) as exc:
        out = {"status": type(exc).__name__, "message": str(exc), "seed": args.seed, "q": q, "report": exc.report}
        _emit(args, _dump(out))
        return EXIT_RETRIES if isinstance(exc, RetryExhausted) else EXIT_NO_CONTRACTION
    d = res.to_dict()
    if args.text:
        lines = [f"verified rate-1/3 code over GF({q}), policy {res.policy}, seed {res.seed}, retries {res.retries_used}"]
        lines += [f"  W{m}: {tuple(v)}" for m, v in sorted(d["vectors"].items(), key=lambda kv: int(kv[0]))]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump(d))
    return EXIT_OK


# -- oracle -------------------------------------------------------------------------

def cmd_oracle(args: argparse.Namespace) -> int:
    p = load_problem(args.instance)
    q = args.q if args.q is not None else 2
    subsets = _parse_subsets(args.subsets)
    try:
        if subsets:
            res = oracle.classify_subset_dims(p, subsets, args.L or 3, q, args.budget, args.threads)
        elif args.L:
            res = oracle.feasible_rate(p, args.L, q, args.budget, args.threads)
        else:
            mr = oracle.minrank(p, q, 4, args.budget)
            _emit(args, _dump({"q": q, "minrank": mr, "max_L": 4}))
            return EXIT_OK if mr is not None else EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        _emit(args, _dump({"status": "BudgetExceeded", "nodes_explored": exc.nodes_explored, "budget": args.budget}))
        return EXIT_UNKNOWN
    d = res.to_dict(timing=args.timing)
    if args.text:
        lines = [f"L={res.L} over GF({q}): {'feasible' if res.feasible else 'infeasible'} after {res.nodes_explored} nodes"]
        for row in d.get("achievable_dims", []):
            lines.append(f"  {row['subset']}: dims {row['dims']}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump(d))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


# -- contract / export-dot ---------------------------------------------------------

def cmd_contract(args: argparse.Namespace) -> int:
    p = load_problem(args.instance)
    pc, cm = maximal_contraction(p, args.policy)
    _emit(args, _dump({"policy": args.policy, "problem": problem_to_dict(pc), "map": cm.to_dict()}))
    return EXIT_OK


def cmd_export_dot(args: argparse.Namespace) -> int:
    p = load_problem(args.instance)
    _emit(args, to_dot(p))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="icfeas",
        description="Rate-1/3 feasibility analysis for groupcast index coding problems.",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("instance", help="instance JSON file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--text", action="store_true", help="human-readable summary instead of JSON")

    a = sub.add_parser("analyze", help="patterns, strict-rate facts and a verdict")
    common(a)
    a.add_argument("--q", type=int, default=None, help="decide rate 1/2 exactly over GF(q)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("construct", help="build and verify a rate-1/3 code")
    common(c)
    c.add_argument("--q", type=int, default=101)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--retries", type=int, default=32)
    c.add_argument("--policies", default="lex", help="comma-separated: lex, random:<seed>")
    c.set_defaults(func=cmd_construct)

    o = sub.add_parser("oracle", help="exhaustive search for codes")
    common(o)
    o.add_argument("--q", type=int, default=2)
    o.add_argument("--L", type=int, default=None, help="code length; omit for minrank")
    o.add_argument("--subsets", help='subsets to classify, e.g. "2,3,5;1,2,3"')
    o.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    o.add_argument("--threads", type=int, default=1, help="worker processes")
    o.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    o.set_defaults(func=cmd_oracle)

    k = sub.add_parser("contract", help="maximal contraction and its map")
    common(k)
    k.add_argument("--policy", default="lex")
    k.set_defaults(func=cmd_contract)

    d = sub.add_parser("export-dot", help="alignment graph with dashed conflict stars")
    common(d)
    d.set_defaults(func=cmd_export_dot)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (IcfeasError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
