"""Compare the two sign conventions for the last first-column entry of the
Jordan-type normal form and report which one is a Nijenhuis operator."""

import argparse

from nijenhuis.forms import jordan_unity_form
from nijenhuis.verify import check_nijenhuis, check_unity


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--residuals", action="store_true", help="print the torsion of failing variants")
    args = p.parse_args(argv)
    for n in range(1, args.max_n + 1):
        row = []
        for sign in (-1, 1):
            L, e = jordan_unity_form(n, 0, last_sign=sign)
            nij = check_nijenhuis(L)
            row.append(f"{'-' if sign < 0 else '+'}(n-2)u{n}: nijenhuis={nij.verdict} "
                       f"unity={check_unity(L, e).verdict}")
            if args.residuals and not nij.passed:
                print(nij.to_text())
        print(f"n={n}  " + "  |  ".join(row))


if __name__ == "__main__":
    main()
