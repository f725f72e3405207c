"""Run the bundled programs and show their output and a trace summary."""

import argparse
from collections import Counter

from uchoo.cli import PROGRAMS_DIR
from uchoo.engine import Budget, ScriptedIO, load, run
from uchoo.parser import parse_program

SCENARIOS = [
    ("templeU", ["medical"], 10_000),
    ("templeU", ["english"], 10_000),
    ("templeU", ["law"], 10_000),
    ("switch", [], 10_000),
    ("smartphone", [], 200),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--smartphone-steps", type=int, default=200)
    args = ap.parse_args()
    for name, inputs, steps in SCENARIOS:
        if name == "smartphone":
            steps = args.smartphone_steps
        source = parse_program((PROGRAMS_DIR / f"{name}.uch").read_text(encoding="utf-8"))
        io = ScriptedIO(inputs)
        out = run(load(source), source.main, io, Budget(max_steps=steps))
        kinds = Counter(e.kind for e in out.trace.events)
        label = f"{name} {inputs}" if inputs else name
        print(f"== {label}: {out.trace.outcome}, {len(out.trace.events)} events")
        for line in io.output:
            print(f"   | {line}")
        print("   " + ", ".join(f"{k} {n}" for k, n in sorted(kinds.items())))


if __name__ == "__main__":
    main()
