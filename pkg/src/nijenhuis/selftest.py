"""Built-in regression suite run by ``nijenhuis selftest``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List

from .fman import (
    FManifoldModel,
    check_fmanifold_axioms,
    check_frame_relations,
    check_pde_thm6,
    g_from_h,
    multiplication_on_frame,
    operator_from_mult,
    thm6_model,
)
from .forms import (
    companion_dnd_form,
    dim3_thm4_form,
    direct_sum,
    jordan_unity_form,
    regression_matrix,
    toeplitz_form,
)
from .ring import MultiPoly, series_exp, variables
from .tensor import OperatorField, char_coefficients, ring_det
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


@dataclass
class SelftestConfig:
    seed: int = 20240611
    random_cases: int = 50
    series_order: int = 8
    # -1 ships the sign that makes the Jordan-type form Nijenhuis; +1 ships the other
    jordan_last_sign: int = -1


@dataclass
class Outcome:
    name: str
    passed: bool
    detail: str = ""
    reports: List[Report] = field(default_factory=list)


def _form_reports(form) -> List[Report]:
    L, e = form
    reps = [check_nijenhuis(L), check_unity(L, e), check_trace_and_sigma(L, e)]
    for lam in form.eigenvalues:
        reps.append(check_eigen_invariant(L, lam))
    if L.n == 2:
        reps.append(check_2d_criterion(L))
    if form.name.startswith("dim3-"):
        reps.append(check_pde_thm4(L[2, 0], L[2, 1], form.params["k"]))
    return reps


def _forms(cfg: SelftestConfig) -> List[Outcome]:
    out = []
    for form in regression_matrix(cfg.series_order, cfg.jordan_last_sign):
        reps = _form_reports(form)
        label = f"{form.name} {form.params}"
        out.append(Outcome(label, all(r.passed for r in reps), "", reps))
    return out


def _sign_discrepancy(cfg: SelftestConfig) -> Outcome:
    shipped = check_nijenhuis(jordan_unity_form(4, 0, last_sign=cfg.jordan_last_sign).L)
    other = check_nijenhuis(jordan_unity_form(4, 0, last_sign=-cfg.jordan_last_sign).L)
    ok = shipped.passed and not other.passed
    detail = f"shipped={shipped.verdict} alternative={other.verdict}"
    return Outcome("jordan sign variants (n=4)", ok, detail, [shipped])


def _frames() -> List[Outcome]:
    out = []
    for n in (2, 3, 4):
        for form in (companion_dnd_form(n), jordan_unity_form(n), toeplitz_form(n, 1)):
            L, e = form
            rep = check_frame_relations(L, e, n - 1)
            out.append(Outcome(f"frame {form.name} n={n}", rep.passed, "", [rep]))
    for n in (2, 3):
        L, e = jordan_unity_form(n, 1)
        circ = multiplication_on_frame(L, e)
        E = L @ e
        rep = check_fmanifold_axioms(FManifoldModel(circ, e, E))
        same = operator_from_mult(circ, E) == L
        out.append(Outcome(f"frame multiplication jordan n={n}", rep.passed and same, "", [rep]))
    return out


def _thm6() -> List[Outcome]:
    out = []
    x2 = MultiPoly.var(3, 1)
    for k in (2, 3):
        for a in (0, 1, 2):
            for c in (0, 1, 2):
                f = MultiPoly.const(3, a)
                h = x2 ** (k - 2) * c
                model = thm6_model(k, 1, f, h)
                reps = [check_pde_thm6(f, h, k), check_fmanifold_axioms(model)]
                L = operator_from_mult(model.circ, model.E)
                expected = dim3_thm4_form(k, 0, 1, f, g_from_h(k, 1, f, h)).L
                reps.append(check_nijenhuis(L))
                ok = all(r.passed for r in reps) and L == expected
                out.append(Outcome(f"thm6 k={k} a={a} c={c}", ok, "", reps))
    return out


def _splits() -> List[Outcome]:
    out = []
    makers = [jordan_unity_form, toeplitz_form, lambda n: companion_dnd_form(n)]
    for ma in makers:
        for mb in makers:
            for n1, n2 in ((2, 2), (2, 3)):
                s = direct_sum(ma(n1), mb(n2))
                rep = check_split(s.L, s.e, s.params["partition"])
                out.append(Outcome(f"split {s.name} {n1}+{n2}", rep.passed, "", [rep]))
    return out


def _random_poly(rng: random.Random, nvars: int, terms: int = 3, deg: int = 2) -> MultiPoly:
    d = {}
    for _ in range(rng.randint(0, terms)):
        e = tuple(rng.randint(0, deg) for _ in range(nvars))
        d[e] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return MultiPoly(nvars, d)


def _random_suites(cfg: SelftestConfig) -> List[Outcome]:
    rng = random.Random(cfg.seed)
    bad = []
    for case in range(cfg.random_cases):
        a, b, c = (_random_poly(rng, 2) for _ in range(3))
        if not ((a + b) * c == a * c + b * c and (a * b) * c == a * (b * c)):
            bad.append(f"ring case {case}")
        if not (a * b).diff(0) == a.diff(0) * b + a * b.diff(0):
            bad.append(f"leibniz case {case}")
        n = rng.randint(1, 3)
        M = OperatorField([[_random_poly(rng, 2, 2, 1) for _ in range(n)] for _ in range(n)], 2)
        # sigma_n is (-1)^n det
        if not char_coefficients(M)[-1] == ring_det(M.rows()) * (-1) ** n:
            bad.append(f"char case {case}")
        A = OperatorField([[_random_poly(rng, 2, 2, 1) for _ in range(2)] for _ in range(2)], 2)
        vacuous = (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]).is_zero()
        if not vacuous and check_2d_criterion(A).passed != check_nijenhuis(A).passed:
            bad.append(f"2d criterion case {case}")
    x = variables(1, cfg.series_order)[0]
    if not series_exp(x) * series_exp(-x) == 1:
        bad.append("exp(x) exp(-x)")
    return [Outcome("randomized properties", not bad, ", ".join(bad))]


SUITES: List[Callable[[SelftestConfig], List[Outcome]]] = [
    _forms,
    lambda cfg: [_sign_discrepancy(cfg)],
    lambda cfg: _frames(),
    lambda cfg: _thm6(),
    lambda cfg: _splits(),
    _random_suites,
]


def run_selftest(cfg: SelftestConfig = SelftestConfig()) -> List[Outcome]:
    results: List[Outcome] = []
    for suite in SUITES:
        results.extend(suite(cfg))
    return results
