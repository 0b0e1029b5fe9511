"""Command-line interface.

Exit status: 0 when every check passes, 1 on a mathematical failure,
2 on a usage, parse or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .fman import (
    FManifoldModel,
    FrameDegenerateError,
    check_fmanifold_axioms,
    check_frame_relations,
    multiplication_on_frame,
    structure_constants_3d,
    thm6_euler,
)
from .forms import FAMILIES, FormSpec, build, form_to_model
from .parser import ModelError, ModelFile, ParseError, dump_model, load_model_file
from .ring import NotDivisibleError
from .selftest import SelftestConfig, run_selftest
from .verify import (
    Report,
    check_2d_criterion,
    check_eigen_invariant,
    check_nijenhuis,
    check_pde_thm4,
    check_split,
    check_trace_and_sigma,
    check_unity,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandSpec:
    subcommand: str
    path: Optional[str] = None
    checks: Optional[List[str]] = None
    fmt: str = "text"
    series_order: Optional[int] = None
    output: Optional[str] = None
    form: Optional[FormSpec] = None

    def __post_init__(self):
        if self.subcommand not in ("verify", "generate", "derive", "selftest"):
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand in ("verify", "derive") and not self.path:
            raise UsageError(f"{self.subcommand} needs an input file")
        if self.subcommand == "generate" and self.form is None:
            raise UsageError("generate needs a form specification")
        if self.fmt not in ("text", "json"):
            raise UsageError("format must be text or json")


# ---------------------------------------------------------------- verify


def _need(model: ModelFile, *attrs):
    return all(getattr(model, a) is not None for a in attrs)


def _meta_thm4(model: ModelFile) -> Report:
    spec = model.meta["thm4"]
    try:
        k = int(spec["k"])
        f = model.parse(spec["f"])
        g = model.parse(spec["g"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"meta.thm4: {exc}") from None
    return check_pde_thm4(f, g, k)


def _meta_eigen(model: ModelFile) -> Report:
    lams = model.meta["eigenvalues"]
    if not isinstance(lams, list):
        raise ModelError("meta.eigenvalues must be a list of expressions")
    parts = [check_eigen_invariant(model.L, model.parse(s)) for s in lams]
    res = [((f"lambda{i + 1}",) + p, v) for i, r in enumerate(parts) for p, v in r.residuals]
    return Report("eigen", res)


def _meta_split(model: ModelFile) -> Report:
    part = model.meta["partition"]
    if not isinstance(part, list) or not all(isinstance(m, int) for m in part):
        raise ModelError("meta.partition must be a list of two block sizes")
    try:
        return check_split(model.L, model.e, part)
    except ValueError as exc:
        raise ModelError(str(exc)) from None


# name -> (applicable?, run)
CHECKS: Dict[str, tuple] = {
    "nijenhuis": (lambda m: _need(m, "L"), lambda m: check_nijenhuis(m.L)),
    "unity": (lambda m: _need(m, "L", "e"), lambda m: check_unity(m.L, m.e)),
    "sigma": (lambda m: _need(m, "L", "e"), lambda m: check_trace_and_sigma(m.L, m.e)),
    "criterion2d": (lambda m: _need(m, "L") and m.n == 2, lambda m: check_2d_criterion(m.L)),
    "eigen": (lambda m: _need(m, "L") and "eigenvalues" in m.meta, _meta_eigen),
    "split": (lambda m: _need(m, "L", "e") and "partition" in m.meta, _meta_split),
    "frame": (
        lambda m: _need(m, "L", "e"),
        lambda m: check_frame_relations(m.L, m.e, m.n - 1),
    ),
    "fmanifold": (
        lambda m: _need(m, "circ", "e", "E"),
        lambda m: check_fmanifold_axioms(FManifoldModel(m.circ, m.e, m.E)),
    ),
    "pde_thm4": (lambda m: "thm4" in m.meta and m.n == 3, _meta_thm4),
}


def run_verify(path: str, checks: Optional[Sequence[str]] = None,
               series_order: Optional[int] = None) -> List[Report]:
    model = load_model_file(path, series_order)
    if checks is None:
        names = [c for c, (ok, _) in CHECKS.items() if ok(model)]
    else:
        names = list(dict.fromkeys(checks))
        for c in names:
            if c not in CHECKS:
                raise UsageError(f"unknown check {c!r}; available: {', '.join(sorted(CHECKS))}")
            if not CHECKS[c][0](model):
                raise UsageError(f"check {c!r} does not apply to this model")
    reports = []
    for c in sorted(names):
        rep = CHECKS[c][1](model)
        rep.check = c
        rep.variables = list(model.variables)
        rep.series_order = model.order
        reports.append(rep)
    return reports


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args) -> int:
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    reports = run_verify(args.file, checks, args.series_order)
    ok = all(r.passed for r in reports)
    if args.format == "json":
        doc = {
            "model": args.file,
            "verdict": "pass" if ok else "fail",
            "reports": [r.to_dict() for r in reports],
        }
        _emit(json.dumps(doc, indent=2) + "\n", None)
    else:
        lines = [r.to_text() for r in reports]
        lines.append(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in reports)}/{len(reports)} checks")
        _emit("\n".join(lines) + "\n", None)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- generate / derive


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _sign(s: str) -> int:
    if s in ("+", "1", "+1", "plus"):
        return 1
    if s in ("-", "-1", "minus"):
        return -1
    raise argparse.ArgumentTypeError("sign must be + or -")


def spec_from_args(args) -> FormSpec:
    return FormSpec(
        family=args.family,
        n=args.n,
        s=args.s,
        lambda0=args.lambda0,
        a0=args.a0,
        b0=args.b0,
        sign=args.sign,
        k=args.k,
        d=args.d,
        f=args.f,
        g=args.g,
        F=args.F,
        order=args.series_order,
        last_sign=args.last_sign,
    )


def run_generate(spec: FormSpec) -> dict:
    try:
        form = build(spec)
    except (ParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return form_to_model(form)[1]


def _cmd_generate(args) -> int:
    doc = run_generate(spec_from_args(args))
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def run_derive(path: str, method: str = "frame", series_order: Optional[int] = None) -> dict:
    """Add structure constants and an Euler field to a model holding ``L`` and ``e``."""
    model = load_model_file(path, series_order)
    if model.L is None or model.e is None:
        raise ModelError("deriving structure constants needs both 'L' and 'e'")
    if method == "frame":
        circ = multiplication_on_frame(model.L, model.e)
        E = model.L @ model.e
    else:
        spec = model.meta.get("thm4")
        if model.n != 3 or not spec:
            raise ModelError("the thm6 method needs a three-dimensional model with meta.thm4")
        k = int(spec["k"])
        sign = int(model.meta.get("params", {}).get("sign", 1))
        lam = Fraction(model.meta.get("params", {}).get("lambda0", 0))
        f, g = model.parse(spec["f"]), model.parse(spec["g"])
        circ = structure_constants_3d(k, sign, f, g)
        E = thm6_euler(k, lam, f)
    out = ModelFile(model.variables, model.order, model.L, model.e, E, circ, dict(model.meta))
    return dump_model(out)


def _cmd_derive(args) -> int:
    try:
        doc = run_derive(args.file, args.method, args.series_order)
    except (FrameDegenerateError, NotDivisibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    cfg = SelftestConfig(jordan_last_sign=1 if args.jordan_variant == "alternative" else -1)
    results = run_selftest(cfg)
    failed = [r for r in results if not r.passed]
    for r in results:
        if args.verbose or not r.passed:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f"  ({r.detail})" if r.detail else ""))
    print(f"selftest: {len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nijenhuis",
        description="Exact checks for Nijenhuis operators with a unity and F-manifolds.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks on a model file")
    v.add_argument("file")
    v.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--series-order", type=int, help="truncation order for series-mode models")
    v.set_defaults(func=_cmd_verify)

    g = sub.add_parser("generate", help="emit a normal or semi-normal form as a model file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--s", type=int, help="number of complex blocks")
    g.add_argument("--lambda0", type=_fraction, default=Fraction(0))
    g.add_argument("--a0", type=_fraction, default=Fraction(0))
    g.add_argument("--b0", type=_fraction, default=Fraction(1))
    g.add_argument("--sign", type=_sign, default=1)
    g.add_argument("--k", type=int)
    g.add_argument("--d", type=_fraction)
    g.add_argument("--f", help="functional parameter f")
    g.add_argument("--g", help="functional parameter g")
    g.add_argument("--F", help="univariate polynomial in t (dim3-cor1)")
    g.add_argument("--series-order", type=int)
    g.add_argument("--last-sign", type=_sign, default=-1,
                   help="sign of the last first-column entry of the Jordan-type forms")
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_generate)

    d = sub.add_parser("derive", help="derive data from a model")
    d.add_argument("what", choices=("structure-constants",))
    d.add_argument("file")
    d.add_argument("--method", choices=("frame", "thm6"), default="frame")
    d.add_argument("--series-order", type=int)
    d.add_argument("-o", "--output")
    d.set_defaults(func=_cmd_derive)

    s = sub.add_parser("selftest", help="run the built-in regression suite")
    s.add_argument("--jordan-variant", choices=("default", "alternative"), default="default",
                   help="which sign of the Jordan-type form to ship as the fixture")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=_cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ModelError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
