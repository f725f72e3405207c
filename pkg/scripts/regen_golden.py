"""Rewrite tests/golden/ from the current engine.

Only run this after an intentional change to the trace format, then review
the diff by hand.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from conftest import GOLDEN, GOLDEN_RUNS, bundled_source  # noqa: E402

from uchoo.engine import Budget, ScriptedIO, load, run  # noqa: E402
from uchoo.parser import parse_program  # noqa: E402
from uchoo.trace import render_json, render_text  # noqa: E402


def golden_run(name):
    inputs, steps = GOLDEN_RUNS[name]
    source = parse_program(bundled_source(name))
    return run(load(source), source.main, ScriptedIO(inputs), Budget(max_steps=steps))


def main():
    GOLDEN.mkdir(exist_ok=True)
    for name in GOLDEN_RUNS:
        trace = golden_run(name).trace
        (GOLDEN / f"{name}.txt").write_text(render_text(trace), encoding="utf-8")
        (GOLDEN / f"{name}.json").write_text(render_json(trace) + "\n", encoding="utf-8")
        print(f"{name}: {len(trace.events)} events, {trace.outcome}")


if __name__ == "__main__":
    main()
