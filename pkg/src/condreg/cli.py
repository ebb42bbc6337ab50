"""Command-line front end: ``condreg plan|validate|progress|fixtures``.

Exit codes: 0 solution found or plan valid, 1 no solution or plan invalid,
2 usage or parse error, 3 resource cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fixtures, kernels
from .model import BOTTOM, ResourceLimitError
from .progression import is_progression_solution, progress_plan
from .regression import is_regression_solution, regress_plan
from .search import SearchOptions, solve
from .syntax import DomainError, ParseError, parse_domain, parse_plan, parse_problem, plan_to_json, render_plan

OK, FAILED, USAGE, LIMIT = 0, 1, 2, 3


def one_line(plan, vocab) -> str:
    return " ".join(part.strip() for part in render_plan(plan, vocab).splitlines())


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(args):
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain)
    return problem


def _trace_rows(frontier, indices, vocab):
    rows = []
    for i in indices:
        pair = frontier[i]
        rows.append({
            "index": i,
            "iteration": pair.iteration,
            "action": pair.action,
            "from": list(pair.sources),
            "pstate": vocab.format_state(pair.pstate),
            "plan": one_line(pair.plan, vocab),
        })
    return rows


def _print_table(rows, out):
    header = ("#", "iter", "action", "from", "p-state", "plan")
    cells = [header] + [
        (str(r["index"]), str(r["iteration"]), r["action"] or "",
         ",".join(map(str, r["from"])), r["pstate"], r["plan"])
        for r in rows
    ]
    widths = [max(len(c[k]) for c in cells) for k in range(len(header) - 1)]
    for c in cells:
        lead = "  ".join(c[k].ljust(widths[k]) for k in range(len(widths)))
        print(f"{lead}  {c[-1]}", file=out)


def cmd_plan(args, out) -> int:
    problem = _load(args)
    vocab = problem.vocab
    opts = SearchOptions(max_pairs=args.max_pairs, find_all=args.all,
                         trace=bool(args.trace), prune_subsumed=args.prune,
                         backend=args.backend)
    try:
        result = solve(problem, opts)
    except ResourceLimitError as exc:
        stats = getattr(exc, "stats", None)
        if args.json:
            json.dump({"status": "resource-limit", "plan": None, "message": str(exc),
                       "stats": stats.as_dict() if stats else {}}, out, indent=2)
            out.write("\n")
        else:
            print(f"resource limit: {exc}", file=out)
        return LIMIT

    rows = None
    if args.trace:
        if args.trace == "full":
            indices = range(len(result.frontier))
        elif result.found:
            indices = sorted({p for s in result.solutions
                              for p in _derivation_indices(result.frontier, s)})
        else:
            indices = range(len(result.frontier))
        rows = _trace_rows(result.frontier, indices, vocab)

    if args.json:
        doc = {
            "status": "solution" if result.found else "no-solution",
            "plan": plan_to_json(result.plan, vocab) if result.found else None,
            "stats": result.stats.as_dict(),
        }
        if result.found:
            doc["pstate"] = vocab.format_state(result.pstate)
            if args.all:
                doc["solutions"] = [plan_to_json(result.frontier[i].plan, vocab)
                                    for i in result.solutions]
        if rows is not None:
            doc["trace"] = rows
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        if rows is not None:
            _print_table(rows, out)
            print(file=out)
        if not result.found:
            print("NO SOLUTION", file=out)
        elif args.all:
            for n, i in enumerate(result.solutions, 1):
                print(f"; solution {n}", file=out)
                print(render_plan(result.frontier[i].plan, vocab), file=out)
        else:
            print(render_plan(result.plan, vocab), file=out)
        s = result.stats
        print(f"; iterations={s.iterations} pairs={s.pairs} millis={s.millis:.3f}", file=out)
    return OK if result.found else FAILED


def _derivation_indices(frontier, index):
    from .search import derivation

    return [frontier.seen[p.pstate] for p in derivation(frontier, index)]


def cmd_validate(args, out) -> int:
    problem = _load(args)
    plan = parse_plan(_read(args.plan), problem.domain)
    forward = is_progression_solution(plan, problem)
    backward = is_regression_solution(plan, problem)
    regressed = regress_plan(plan, problem.delta_goal)
    print(f"progression solution: {'yes' if forward else 'no'}", file=out)
    print(f"regression solution: {'yes' if backward else 'no'}", file=out)
    print(f"regressed goal: {problem.vocab.format_state(regressed)}", file=out)
    print("valid" if forward else "invalid", file=out)
    return OK if forward else FAILED


def cmd_progress(args, out) -> int:
    problem = _load(args)
    plan = parse_plan(_read(args.plan), problem.domain)
    states = progress_plan(plan, problem.sigma_init)
    for st in states:
        print(problem.vocab.format_state(st), file=out)
    return FAILED if BOTTOM in states else OK


def cmd_fixtures(args, out) -> int:
    if args.name is None:
        for name in fixtures.NAMES:
            print(name, file=out)
        return OK
    if args.name not in fixtures.NAMES:
        print(f"unknown fixture {args.name!r}", file=sys.stderr)
        return USAGE
    for suffix in ("dom", "prob", "plan"):
        p = fixtures.path(args.name, suffix)
        if p.is_file():
            print(p, file=out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condreg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="search for a conditional plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--all", action="store_true", help="keep searching and list every solution pair")
    p.add_argument("--trace", nargs="?", const="derivation", choices=("derivation", "full"),
                   help="print the frontier pairs behind the plan (or all of them)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--max-pairs", type=int, default=SearchOptions.max_pairs, metavar="N")
    p.add_argument("--prune", action="store_true",
                   help="skip p-states implied by one already found")
    p.add_argument("--backend", choices=("auto", "python", "compiled"), default="auto",
                   help=f"search kernels (auto is {kernels.BACKEND} here)")
    p.set_defaults(func=cmd_plan)

    for name, func, text in (("validate", cmd_validate, "check a plan against a problem"),
                             ("progress", cmd_progress, "print the a-states a plan reaches")):
        p = sub.add_parser(name, help=text)
        p.add_argument("domain")
        p.add_argument("problem")
        p.add_argument("plan")
        p.set_defaults(func=func)

    p = sub.add_parser("fixtures", help="list bundled fixtures or print a fixture's file paths")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return parser


def _version() -> str:
    from . import __version__

    return __version__


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if getattr(args, "max_pairs", 1) is not None and getattr(args, "max_pairs", 1) < 1:
        print("condreg: --max-pairs must be positive", file=sys.stderr)
        return USAGE
    try:
        return args.func(args, out)
    except (ParseError, DomainError) as exc:
        print(f"condreg: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"condreg: {exc}", file=sys.stderr)
        return USAGE
    except ResourceLimitError as exc:
        print(f"condreg: resource limit: {exc}", file=sys.stderr)
        return LIMIT


if __name__ == "__main__":
    sys.exit(main())
