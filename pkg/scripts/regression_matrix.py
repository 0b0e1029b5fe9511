"""Run the form regression matrix and print a table of verdicts and timings."""

import argparse
import time

from nijenhuis.forms import regression_matrix
from nijenhuis.verify import check_nijenhuis, check_trace_and_sigma, check_unity


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--series-order", type=int, default=8)
    p.add_argument("--jordan-last-sign", type=int, choices=(-1, 1), default=-1)
    args = p.parse_args(argv)
    start = time.perf_counter()
    failed = 0
    for form in regression_matrix(args.series_order, args.jordan_last_sign):
        t0 = time.perf_counter()
        reps = [check_nijenhuis(form.L), check_unity(*form), check_trace_and_sigma(*form)]
        ms = 1000 * (time.perf_counter() - t0)
        ok = all(r.passed for r in reps)
        failed += not ok
        verdicts = " ".join(f"{r.check}={r.verdict}" for r in reps)
        print(f"{'PASS' if ok else 'FAIL'} {form.name:18s} n={form.n}  {verdicts}  {ms:7.1f} ms  {form.params}")
    print(f"total {time.perf_counter() - start:.2f} s, {failed} failing")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
