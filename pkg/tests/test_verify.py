import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from nijenhuis.forms import (
    companion_dnd_form,
    cor1_g,
    dim2_form,
    dim3_cor2_form,
    dim3_thm4_form,
    direct_sum,
    jordan_unity_form,
    toeplitz_form,
)
from nijenhuis.ring import MultiPoly, series_exp, variables
from nijenhuis.tensor import OperatorField, VectorField, char_coefficients
from nijenhuis.verify import (
    DegenerateTransformError,
    Report,
    check_2d_criterion,
    check_eigen_invariant,
    check_equiv_2d,
    check_nijenhuis,
    check_pde_thm4,
    check_split,
    check_trace_and_sigma,
    check_transform_3d,
    check_unity,
    cubic_discriminant,
    depressed_cubic,
    merge_reports,
)
from strategies import operators


def diag_yx():
    x, y = variables(2)
    return OperatorField([[y, 0], [0, x]])


# ---------------------------------------------------------------- nijenhuis / unity


def test_nijenhuis_examples():
    assert check_nijenhuis(jordan_unity_form(4, 0).L).passed
    assert check_nijenhuis(OperatorField([[2, 1], [0, Fraction(1, 3)]], 2)).passed
    rep = check_nijenhuis(diag_yx())
    assert not rep.passed
    x, y = variables(2)
    assert rep.residual_map()[("N", 1, 1, 2)] == y - x


def test_unity_examples():
    assert check_unity(*companion_dnd_form(3)).passed
    assert check_unity(*toeplitz_form(3)).passed
    L = companion_dnd_form(3).L
    rep = check_unity(L, VectorField.zero(3, 3))
    assert rep.residual_map() == {("LeL-Id", i, i): MultiPoly.const(3, -1) for i in (1, 2, 3)}


# ---------------------------------------------------------------- sigma


def test_sigma_examples():
    (x,) = variables(1)
    assert check_trace_and_sigma(OperatorField([[x]]), VectorField([1], 1)).passed
    assert check_trace_and_sigma(*dim3_thm4_form(2, 0, 1, 0, 0)).passed
    x, y = variables(2)
    rep = check_trace_and_sigma(OperatorField([[x, 0], [0, y]]), VectorField([1, 0], 2))
    assert ("trace",) in rep.residual_map()
    assert ("sigma", 1) in rep.residual_map()


@pytest.mark.parametrize("form", [jordan_unity_form(3, 1), toeplitz_form(4), companion_dnd_form(4),
                                  dim3_cor2_form(3)], ids=lambda f: f.name)
def test_sigma_on_verified_forms(form):
    assert check_trace_and_sigma(*form).passed


# ---------------------------------------------------------------- eigenvalues


def test_eigen_examples():
    form = dim3_thm4_form(2, Fraction(1, 3), 1, 0, 0)
    x1, x2, x3 = variables(3)
    assert check_eigen_invariant(form.L, x1 + Fraction(1, 3)).passed
    assert check_eigen_invariant(form.L, x1 + x2 ** 2 + Fraction(1, 3)).passed
    minus = dim3_thm4_form(3, 0, -1, 0, 0)
    assert check_eigen_invariant(minus.L, x1 - x2 ** 3).passed
    (x,) = variables(1)
    assert not check_eigen_invariant(OperatorField.identity(1, 1), x).passed


def test_eigen_detects_wrong_second_row():
    # with l^2_1 = x2 instead of x2/k the shifted eigenvalue is no longer invariant
    form = dim3_thm4_form(2, 0, 1, 0, 0)
    x1, x2, x3 = variables(3)
    rows = form.L.rows()
    rows[1][0] = x2
    assert not check_eigen_invariant(OperatorField(rows, 3), x1 + x2 ** 2).passed


# ---------------------------------------------------------------- 2D criterion


def test_2d_criterion_examples():
    assert check_2d_criterion(dim2_form(2, 0, d=0).L).passed
    assert check_2d_criterion(dim2_form(3, 0, k=3, sign=1).L).passed
    rep = check_2d_criterion(diag_yx())
    x, y = variables(2)
    assert rep.residual_map() == {("component", 1): y * y - x * y, ("component", 2): x * x - x * y}


def test_2d_criterion_needs_2x2():
    with pytest.raises(ValueError):
        check_2d_criterion(OperatorField.identity(3, 3))


def test_2d_criterion_vacuous_when_det_vanishes():
    # nonzero torsion, yet det L = 0 makes both sides of the identity vanish
    x, y = variables(2)
    L = OperatorField([[-y, 0], [-y - Fraction(1, 3), 0]])
    assert not check_nijenhuis(L).passed
    rep = check_2d_criterion(L)
    assert rep.passed
    assert "vacuous" in rep.notes


@settings(max_examples=150, deadline=None)
@given(operators(2))
def test_2d_criterion_equivalence(L):
    det = L[0, 0] * L[1, 1] - L[0, 1] * L[1, 0]
    if det.is_zero():
        return
    assert check_2d_criterion(L).passed == check_nijenhuis(L).passed


# ---------------------------------------------------------------- split


def test_split_examples():
    s = direct_sum(jordan_unity_form(2, 0), jordan_unity_form(2, 1))
    assert check_split(s.L, s.e, [2, 2]).passed
    u = variables(4)
    e_bad = VectorField([s.e[0] + u[2], s.e[1], s.e[2], s.e[3]], 4)
    rep = check_split(s.L, e_bad, [2, 2])
    assert ("e-depends", 1, 3) in rep.residual_map()
    x1, x2 = variables(2)
    assert check_split(OperatorField([[x1, 0], [0, x2]]), VectorField([1, 1], 2), [1, 1]).passed


def test_split_detects_cross_block_L():
    s = direct_sum(toeplitz_form(2), companion_dnd_form(3))
    assert check_split(s.L, s.e, [2, 3]).passed
    rows = s.L.rows()
    rows[3][3] = rows[3][3] + MultiPoly.var(5, 0)
    rep = check_split(OperatorField(rows, 5), s.e, [2, 3])
    assert ("L-depends", 4, 4, 1) in rep.residual_map()
    rows = s.L.rows()
    rows[0][4] = MultiPoly.one(5)
    assert ("offdiag", 1, 5) in check_split(OperatorField(rows, 5), s.e, [2, 3]).residual_map()


def test_split_block_failure_reported():
    x1, x2 = variables(2)
    rep = check_split(OperatorField([[x1, 0], [0, x2]]), VectorField([1, 0], 2), [1, 1])
    assert ("block2", "unity", "LeL-Id", 1, 1) in rep.residual_map()


def test_split_bad_partition():
    with pytest.raises(ValueError):
        check_split(*jordan_unity_form(3), [1, 1])


# ---------------------------------------------------------------- PDE for f, g


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_pde_thm4_cor2(k):
    x1, x2, x3 = variables(3)
    assert check_pde_thm4(x3 * Fraction(1 - k, k), MultiPoly.one(3), k).passed


@pytest.mark.parametrize("k", [2, 3])
def test_pde_thm4_cor1(k):
    order = 8
    g = cor1_g(k, [1, 2, -1], order)
    f = MultiPoly.one(3).truncate(order)
    assert check_pde_thm4(f, g, k).passed


@pytest.mark.parametrize("k", [2, 3])
def test_pde_thm4_failure(k):
    x1, x2, x3 = variables(3)
    rep = check_pde_thm4(MultiPoly.zero(3), x3, k)
    assert rep.residual_map()[("pde",)] == x3 * Fraction(1 - k, k)


def test_pde_thm4_k1_is_not_vacuous():
    # for k = 1 the last term drops out but g = x3, f = 0 still solves it
    x1, x2, x3 = variables(3)
    assert check_pde_thm4(MultiPoly.zero(3), x3, 1).passed
    assert not check_pde_thm4(MultiPoly.zero(3), x2 * x3, 1).passed


def test_pde_accepts_two_variable_parameters():
    x2, x3 = variables(2)
    assert check_pde_thm4(x3 * Fraction(-1, 2), MultiPoly.one(2), 2).passed
    with pytest.raises(ValueError):
        check_pde_thm4(MultiPoly.var(3, 0), MultiPoly.one(3), 2)


# ---------------------------------------------------------------- coordinate changes


def test_equiv_2d():
    x, y = variables(2)
    assert check_equiv_2d(y, y, y * 2).passed
    assert check_equiv_2d(y ** 2, y ** 2, y).passed
    assert not check_equiv_2d(y, y ** 2, y * 2).passed
    with pytest.raises(DegenerateTransformError):
        check_equiv_2d(y, y, y ** 2)
    assert "h(0,0)" in check_equiv_2d(MultiPoly.one(2), MultiPoly.one(2), y + 1).notes


def test_transform_3d_identity():
    x1, x2, x3 = variables(3)
    f, g = x3 * Fraction(-1, 2), MultiPoly.one(3)
    assert check_transform_3d(f, g, f, g, x3, 2).passed
    rep = check_transform_3d(f, g, f, g * 2, x3, 2)
    assert set(rep.residual_map()) == {("g",)}


def _cor1_target(k: int, order: int):
    """Coefficients of e^{(k-1)t/k} / (1 - t/k) up to degree ``order``."""
    (t,) = variables(1, order)
    geo = sum((t ** m * Fraction(1, k ** m) for m in range(order + 1)), MultiPoly.zero(1).truncate(order))
    F = series_exp(t * Fraction(k - 1, k)) * geo
    return [F.terms.get((m,), Fraction(0)) for m in range(order + 1)]


@pytest.mark.parametrize("k", [2, 3])
def test_cor1_gauge(k):
    # x3 -> x3 + Q(t) with t = x2 exp(-x3/k) keeps f = 1; with Q(t) = t it maps
    # Fbar = 1 to F(t) = e^{(k-1)t/k} / (1 - t/k)
    order = 7
    x1, x2, x3 = variables(3, order)
    one = MultiPoly.one(3).truncate(order)
    h = x3 + x2 * series_exp(x3 * Fraction(-1, k))
    g = cor1_g(k, _cor1_target(k, order), order)
    gbar = cor1_g(k, [1], order)
    assert check_transform_3d(one, g, one, gbar, h, k).passed
    wrong = cor1_g(k, [1, 1], order)
    assert not check_transform_3d(one, wrong, one, gbar, h, k).passed


@pytest.mark.parametrize("k", [2, 3])
def test_cor1_shift_gauge_moves_f(k):
    # x3 -> x3 + x2 q(x2) does not preserve f = 1
    order = 7
    x1, x2, x3 = variables(3, order)
    one = MultiPoly.one(3).truncate(order)
    g = cor1_g(k, [1], order)
    rep = check_transform_3d(one, g, one, g, x3 + x2, k)
    assert ("f",) in rep.residual_map()


# ---------------------------------------------------------------- discriminant


def test_cubic_discriminant_examples():
    one = MultiPoly.one(1)
    # (t - 0)^2 (t - 1) = t^3 - t^2
    assert cubic_discriminant([-one, 0 * one, 0 * one]).is_zero()
    p, q = depressed_cubic([0 * one, -one, 0 * one])
    assert (p, q) == (-one, 0 * one)
    assert cubic_discriminant([0 * one, -one, 0 * one]) == 4
    # (t-1)(t-2)(t-3): discriminant ((1-2)(1-3)(2-3))^2 = 4
    assert cubic_discriminant([-6 * one, 11 * one, -6 * one]) == 4


@pytest.mark.parametrize("k", [1, 2, 3])
def test_thm4_discriminant_vanishes(k):
    x1, x2, x3 = variables(3)
    form = dim3_thm4_form(k, 0, 1, x3 * 2 + x2, x2 ** 2 - x3)
    assert cubic_discriminant(char_coefficients(form.L)).is_zero()


# ---------------------------------------------------------------- reports


def test_report_json_round_trip():
    rep = check_nijenhuis(diag_yx())
    rep.variables = ["x", "y"]
    back = Report.from_dict(json.loads(rep.to_json()))
    assert back.residuals == rep.residuals
    assert back.verdict == "fail"
    assert "[N,1,1,2]" in rep.to_text()


def test_report_verdict_consistency():
    d = check_nijenhuis(diag_yx()).to_dict()
    d["verdict"] = "pass"
    with pytest.raises(ValueError):
        Report.from_dict(d)


def test_merge_reports():
    a = check_nijenhuis(diag_yx())
    b = Report("unity")
    m = merge_reports("all", [a, b])
    assert not m.passed
    assert all(path[0] == "nijenhuis" for path, _ in m.residuals)
    assert "unity=pass" in m.notes
