"""Compare the engine with the brute-force oracle on many random programs.

Prints agreement counts and the first few disagreements, if any.
"""

import argparse
import random
import time

from uchoo import oracle
from uchoo.engine import Budget, Failure, State, Success, run
from uchoo.generate import random_case
from uchoo.syntax import pretty


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-choices", type=int, default=4)
    ap.add_argument("--max-branches", type=int, default=3)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    budget = Budget(100_000, 1_000)
    stats = dict(success=0, failure=0, over_bounds=0, mismatch=0)
    start = time.perf_counter()
    for i in range(args.cases):
        case = random_case(rng, args.max_choices, args.max_branches)
        try:
            found = oracle.enumerate(case.program, case.goal)
        except oracle.OracleBoundExceeded:
            stats["over_bounds"] += 1
            continue
        out = run(case.program, case.goal, budget=budget)
        if found:
            ok = isinstance(out, Success) and out.final.state == State(found[0].bindings)
        else:
            ok = isinstance(out, Failure)
        if ok:
            stats["success" if found else "failure"] += 1
            continue
        stats["mismatch"] += 1
        if stats["mismatch"] <= 3:
            print(f"-- mismatch in case {i}")
            print(f"   defs:  {pretty(case.program.defs)}")
            print(f"   state: {case.program.state.bindings}")
            print(f"   goal:  {pretty(case.goal)}")
            print(f"   oracle: {[d.bindings for d in found[:2]]}")
            print(f"   engine: {out}")
    secs = time.perf_counter() - start
    print(", ".join(f"{k} {v}" for k, v in stats.items()) + f"  ({secs:.1f}s)")


if __name__ == "__main__":
    main()
