"""Check the sign of the c^3_22 entry of the three-dimensional structure constants.

For each (k, sign, f, g) the structure constants are built with c^3_22 = -sign*h
("consistent") and with c^3_22 = h ("printed"); the script reports whether the
F-manifold axioms hold and whether E o reproduces the operator.
"""

import argparse

from nijenhuis.fman import (
    FManifoldModel,
    check_fmanifold_axioms,
    operator_from_mult,
    thm6_euler,
    thm6_h,
    thm6_multiplication,
)
from nijenhuis.forms import dim3_thm4_form
from nijenhuis.parser import format_elem, parse_expression
from nijenhuis.ring import NotDivisibleError
from nijenhuis.tensor import VectorField
from nijenhuis.verify import check_pde_thm4

NAMES = ["x1", "x2", "x3"]
DEFAULT_CASES = [("x2", "x2"), ("1", "0"), ("x2^2", "x2*x3"), ("x3", "x2^2")]


def run_case(k, sign, f_src, g_src):
    f, g = parse_expression(f_src, NAMES), parse_expression(g_src, NAMES)
    try:
        h = thm6_h(k, sign, f, g)
    except NotDivisibleError:
        return f"k={k} sign={sign:+d} f={f_src} g={g_src}: h not polynomial"
    L = dim3_thm4_form(k, 0, sign, f, g).L
    E = thm6_euler(k, 0, f)
    pde = check_pde_thm4(f, g, k).verdict
    parts = [f"k={k} sign={sign:+d} f={f_src} g={g_src} h={format_elem(h, NAMES)} pde_thm4={pde}"]
    for pairing in ("consistent", "printed"):
        circ = thm6_multiplication(k, sign, h, pairing)
        ok = check_fmanifold_axioms(FManifoldModel(circ, VectorField.coordinate(3, 0), E))
        same = operator_from_mult(circ, E) == L
        parts.append(f"  {pairing:10s} axioms={ok.verdict} reproduces L={same}")
    return "\n".join(parts)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--k", type=int, nargs="+", default=[2, 3])
    p.add_argument("--case", nargs=2, action="append", metavar=("F", "G"),
                   help="functional parameters f and g (repeatable)")
    args = p.parse_args(argv)
    for k in args.k:
        for sign in (1, -1):
            for f_src, g_src in args.case or DEFAULT_CASES:
                print(run_case(k, sign, f_src, g_src))


if __name__ == "__main__":
    main()
