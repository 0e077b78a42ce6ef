"""Command-line driver: ``qpor check|oracle-check|gen|dot``.

Exit codes: 0 clean, 1 assertion violations / blocked deadlocks / oracle
mismatch, 2 usage or parse error, 3 step or frame guard exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from qpor.alternatives import AltConfig, parse_k
from qpor.benchmarks import (
    EXAMPLE_FORMULA, Formula3Sat, generate_3sat_source, generate_writers_source, hard_formula,
)
from qpor.dsl import SourceProgram, parse
from qpor.errors import (
    ExecutionError, FrameLimitExceeded, OracleLimitExceeded, ParseError, StepLimitExceeded,
)
from qpor.explorer import Explorer
from qpor.export import export_dot, stats_json

EXIT_OK, EXIT_FOUND, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


def _k(text: str):
    try:
        return parse_k(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _read(path: str) -> SourceProgram:
    if path == "-":
        return parse(sys.stdin.read(), "<stdin>")
    return parse(Path(path).read_text(encoding="utf-8"), path)


def _explorer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", default="-", help="program file ('-' or omitted: stdin)")
    p.add_argument("--k", type=_k, default="inf", help="alternative size: positive integer or 'inf' (default)")
    p.add_argument("--skip-step", type=_positive, default=4, help="skip-link step of the causality trees")
    p.add_argument("--max-steps", type=_positive, default=100_000, help="step guard per run")
    p.add_argument("--max-frames", type=_positive, default=1_000_000, help="exploration frame guard")
    p.add_argument("--no-prune", action="store_true", help="keep every discovered event live")
    p.add_argument("--choice", choices=("min", "max"), default="min", help="event tie-break order")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpor", description="Partial-order-reduced model checker for mutex programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="explore every trace of a program")
    _explorer_args(c)
    c.add_argument("--stats-json", metavar="PATH", help="write statistics as JSON")
    c.add_argument("--dot", metavar="PATH", help="write the discovered unfolding as DOT")
    c.add_argument("--allow-deadlock", action="store_true", help="do not fail on blocked deadlocks")

    o = sub.add_parser("oracle-check", help="compare the explorer against brute-force enumeration")
    _explorer_args(o)
    o.add_argument("--oracle-limit", type=_positive, default=10_000, help="maximum trace classes to enumerate")

    d = sub.add_parser("dot", help="print the unfolding discovered by exploration as DOT")
    _explorer_args(d)
    d.add_argument("-o", "--output", help="output path (default stdout)")

    g = sub.add_parser("gen", help="generate benchmark programs")
    gsub = g.add_subparsers(dest="family", required=True)
    w = gsub.add_parser("writers", help="n writers, a counter and a master")
    w.add_argument("--n", type=_positive, default=3)
    s = gsub.add_parser("3sat", help="program encoding a CNF formula")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--formula", help="clauses separated by ',' with signed 1-based literals, e.g. '1 -2 3, -1 -2'")
    grp.add_argument("--hard", type=int, metavar="M", help="M free clauses followed by an unsatisfiable core")
    for q in (w, s):
        q.add_argument("-o", "--output", help="output path (default stdout)")
    return ap


def parse_formula(text: str) -> Formula3Sat:
    clauses = []
    nvars = 0
    for part in text.split(","):
        lits = []
        for tok in part.split():
            v = int(tok)
            if v == 0:
                raise ValueError("literal 0 is not allowed")
            nvars = max(nvars, abs(v))
            lits.append((abs(v) - 1, v > 0))
        if lits:
            clauses.append(tuple(lits))
    return Formula3Sat(nvars, clauses)


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _make_explorer(args, src: SourceProgram, **kw) -> Explorer:
    return Explorer(src.program, AltConfig(args.k), step=args.skip_step, prune=not args.no_prune,
                    choice=args.choice, max_steps=args.max_steps, max_frames=args.max_frames, **kw)


def _summary(st) -> str:
    return (f"max_configs={st.max_configs} ssbs={st.ssbs} events={st.events} "
            f"assert_violations={st.assert_violations} blocked_deadlocks={st.blocked_deadlocks} "
            f"time_ms={st.time_s * 1000:.1f}")


def cmd_check(args) -> int:
    src = _read(args.file)
    ex = _make_explorer(args, src)
    st = ex.run()
    print(_summary(st))
    prog = src.program
    for v in st.violations:
        where = f"{src.path}:{v.line}" if src.path else f"line {v.line}"
        print(f"violation: {where}: thread {prog.thread_names[v.thread]}: {v.text}")
        print("  witness: " + " ".join(prog.format_action(a) for a in v.witness))
    if args.stats_json:
        Path(args.stats_json).write_text(stats_json(st, prog) + "\n", encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(export_dot(ex.store), encoding="utf-8")
    if st.violations or (st.blocked_deadlocks and not args.allow_deadlock):
        return EXIT_FOUND
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from qpor.oracle import enumerate_classes

    src = _read(args.file)
    seen: set = set()
    ex = _make_explorer(args, src, on_maximal=lambda C: seen.add(C.members))
    st = ex.run()
    classes = enumerate_classes(src.program, args.oracle_limit)
    ok = len(seen) == len(classes) == st.max_configs
    print(f"explorer: {st.max_configs} maximal configurations ({len(seen)} distinct), {st.ssbs} SSBs")
    print(f"oracle:   {len(classes)} Mazurkiewicz classes")
    print("match" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_FOUND


def cmd_dot(args) -> int:
    src = _read(args.file)
    ex = _make_explorer(args, src)
    ex.run()
    _emit(export_dot(ex.store), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "writers":
        _emit(generate_writers_source(args.n), args.output)
        return EXIT_OK
    if args.hard is not None:
        phi = hard_formula(args.hard)
    elif args.formula:
        phi = parse_formula(args.formula)
    else:
        phi = EXAMPLE_FORMULA
    _emit(generate_3sat_source(phi), args.output)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "oracle-check": cmd_oracle_check, "dot": cmd_dot, "gen": cmd_gen}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StepLimitExceeded, FrameLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.prefix:
            print("  prefix: " + " ".join(str(a) for a in exc.prefix[:50]), file=sys.stderr)
        return EXIT_GUARD
    except OracleLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ExecutionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if not isinstance(exc, ExecutionError) else EXIT_FOUND


if __name__ == "__main__":
    sys.exit(main())
