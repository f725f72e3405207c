"""Command-line driver: ``uchoo run FILE`` and ``uchoo repl FILE``.

Exit codes: 0 success, 1 failure (no derivation), 2 parse error,
3 budget exceeded, 4 usage error.
"""

from __future__ import annotations

import argparse
import io as _io
import sys
from dataclasses import dataclass
from pathlib import Path

from . import oracle
from .engine import (
    Budget,
    BudgetExceeded,
    Failure,
    Program,
    StreamIO,
    Success,
    load,
    run,
)
from .parser import ParseError, parse_goal, parse_program
from .syntax import render_value
from .trace import render_json, render_text

EXIT_OK, EXIT_FAILURE, EXIT_PARSE, EXIT_BUDGET, EXIT_USAGE = range(5)

PROGRAMS_DIR = Path(__file__).parent / "programs"


@dataclass
class CliConfig:
    file: Path | None
    goal_override: str | None = None
    input_script: Path | None = None
    trace_mode: str = "off"
    max_steps: int = 10_000
    max_depth: int = 200
    repl: bool = False
    quiet_program: bool = False
    oracle: bool = False


class _UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgParser(prog="uchoo", description="Run C^uchoo programs.")
    sub = ap.add_subparsers(dest="command", parser_class=_ArgParser)

    def budget_flags(p):
        p.add_argument("--max-steps", type=_positive, default=10_000, metavar="N")
        p.add_argument("--max-depth", type=_positive, default=200, metavar="N")
        p.add_argument("--input", type=Path, metavar="FILE", help="values for read(), one per line")

    r = sub.add_parser("run", help="execute a file's main goal")
    r.add_argument("file", type=Path)
    r.add_argument("--goal", metavar="TEXT", help="run this goal instead of main")
    r.add_argument(
        "--trace", nargs="?", const="text", default="off", choices=["off", "text", "json"]
    )
    r.add_argument(
        "--quiet-program",
        action="store_true",
        help="suppress program output; a JSON trace then goes to stdout",
    )
    r.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    budget_flags(r)

    q = sub.add_parser("repl", help="query goals against a loaded program")
    q.add_argument("file", type=Path, nargs="?", help="optional; without it the program is empty")
    budget_flags(q)
    return ap


def parse_args(argv) -> CliConfig:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise _UsageError("uchoo: error: expected a command: run or repl")
    return CliConfig(
        file=ns.file,
        goal_override=getattr(ns, "goal", None),
        input_script=ns.input,
        trace_mode=getattr(ns, "trace", "off"),
        max_steps=ns.max_steps,
        max_depth=ns.max_depth,
        repl=ns.command == "repl",
        quiet_program=getattr(ns, "quiet_program", False),
        oracle=getattr(ns, "oracle", False),
    )


def resolve(path: Path) -> Path:
    """The file itself, or a bundled program of that name."""
    if path.exists():
        return path
    bundled = PROGRAMS_DIR / path.name
    if path.parent == Path(".") and bundled.exists():
        return bundled
    raise _UsageError(f"uchoo: error: no such file: {path}")


def _report_parse_error(where: str, exc: ParseError, stderr) -> None:
    print(f"{where}:{exc.line}:{exc.column}: parse error: expected {exc.expected}, found {exc.found}", file=stderr)


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
        path = resolve(cfg.file) if cfg.file is not None else None
        infile = open(cfg.input_script, encoding="utf-8") if cfg.input_script else stdin
    except _UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"uchoo: error: {exc}", file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    try:
        try:
            text = path.read_text(encoding="utf-8") if path else "main true"
            source = parse_program(text)
        except ParseError as exc:
            _report_parse_error(str(path), exc, stderr)
            return EXIT_PARSE
        program = load(source)
        budget = Budget(cfg.max_steps, cfg.max_depth)
        if cfg.repl:
            return repl_loop(program, infile if cfg.input_script else None, stdin, stdout, budget)
        goal = source.main
        if cfg.goal_override is not None:
            try:
                goal = parse_goal(cfg.goal_override)
            except ParseError as exc:
                _report_parse_error("--goal", exc, stderr)
                return EXIT_PARSE
        if cfg.oracle:
            return _run_oracle(program, goal, stdout, stderr)
        sink = _io.StringIO() if cfg.quiet_program else stdout
        outcome = run(program, goal, StreamIO(infile, sink), budget)
    finally:
        if cfg.input_script:
            infile.close()

    if cfg.trace_mode == "text":
        stderr.write(render_text(outcome.trace))
    elif cfg.trace_mode == "json":
        target = stdout if cfg.quiet_program else stderr
        target.write(render_json(outcome.trace) + "\n")

    if isinstance(outcome, Success):
        return EXIT_OK
    if isinstance(outcome, BudgetExceeded):
        print(f"budget exceeded: {outcome.reason}", file=stderr)
        return EXIT_BUDGET
    print("failure: no derivation", file=stderr)
    return EXIT_FAILURE


def _run_oracle(program: Program, goal, stdout, stderr) -> int:
    try:
        found = oracle.enumerate(program, goal)
    except (oracle.OracleUnsupported, oracle.OracleBoundExceeded) as exc:
        print(f"oracle: {exc}", file=stderr)
        return EXIT_USAGE
    for d in found:
        state = ", ".join(f"{k} = {render_value(v)}" for k, v in d.bindings.items())
        print(f"{list(d.vector.indices)}  {state}", file=stdout)
    return EXIT_OK if found else EXIT_FAILURE


def _delta(before, after) -> list[str]:
    return [
        f"{k} = {render_value(v)}"
        for k, v in after.bindings.items()
        if before.get(k) != v
    ]


def repl_loop(program: Program, inputs, stdin, stdout, budget: Budget | None = None) -> int:
    """Read goals line by line; answer ``yes`` (with the state change) or ``no``.

    A successful goal's state carries over to the next one.  ``read`` takes
    its values from ``inputs`` (the ``--input`` script) when given.
    """
    budget = budget or Budget()
    source = inputs if inputs is not None else _io.StringIO("")
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    while True:
        if interactive:
            stdout.write("> ")
            stdout.flush()
        line = stdin.readline()
        if not line:
            break
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        try:
            goal = parse_goal(text)
        except ParseError as exc:
            print(f"parse error: line {exc.line}, column {exc.column}: expected {exc.expected}, found {exc.found}", file=stdout)
            continue
        outcome = run(program, goal, StreamIO(source, stdout), budget)
        if isinstance(outcome, Success):
            changes = _delta(program.state, outcome.final.state)
            print("yes" + ("  " + ", ".join(changes) if changes else ""), file=stdout)
            program = outcome.final
        elif isinstance(outcome, Failure):
            print("no", file=stdout)
        else:
            print(f"budget exceeded: {outcome.reason}", file=stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
