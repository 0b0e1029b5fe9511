import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from nijenhuis.parser import (
    BinOp,
    ModelError,
    Neg,
    ParseError,
    Pow,
    default_series_order,
    dump_model,
    format_elem,
    load_model,
    parse_ast,
    parse_expression,
)
from nijenhuis.ring import MultiPoly, variables
from strategies import polys


def test_direct_reading():
    p = parse_expression("x1 + 2*x2^3", ["x1", "x2"])
    assert p.terms == {(1, 0): 1, (0, 3): 2}


def test_negated_coefficient():
    u3 = variables(3)[2]
    assert parse_expression("-1*u3", ["u1", "u2", "u3"]) == -u3


def test_exp_in_series_mode():
    x3 = variables(3, 2)[2]
    p = parse_expression("exp(-x3/3)", ["x1", "x2", "x3"], order=2)
    assert p == 1 - x3 / 3 + x3 ** 2 / 18
    assert p.order == 2


def test_precedence():
    node = parse_ast("a+b*c")
    assert isinstance(node, BinOp) and node.op == "+"
    assert isinstance(node.right, BinOp) and node.right.op == "*"
    node = parse_ast("-a^2")
    assert isinstance(node, Neg) and isinstance(node.operand, Pow)
    a = variables(1)[0]
    assert parse_expression("-a^2", ["a"]) == -(a ** 2)
    assert parse_expression("2^3", []) == MultiPoly.const(0, 8)
    assert parse_expression("x**2", ["x"]) == a ** 2


def test_rational_literals_and_division():
    x = variables(1)[0]
    assert parse_expression("3/2*x", ["x"]) == x * Fraction(3, 2)
    assert parse_expression("x/(2+1)", ["x"]) == x / 3
    with pytest.raises(ParseError, match="nonzero constants"):
        parse_expression("1/x", ["x"])
    with pytest.raises(ParseError, match="nonzero constants"):
        parse_expression("x/(1-1)", ["x"])


@pytest.mark.parametrize(
    "src, message",
    [
        ("x +", "end of input"),
        ("x $ y", "unexpected character"),
        ("x^y", "exponent"),
        ("x^2^3", "chained powers"),
        ("(x", r"expected '\)'"),
        ("x y", "unexpected 'y'"),
        ("z", "unknown identifier"),
        ("sin(x)", "unknown function"),
    ],
)
def test_syntax_errors_carry_position(src, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_expression(src, ["x", "y"])
    assert info.value.pos is not None


def test_exp_errors():
    with pytest.raises(ParseError, match="series mode"):
        parse_expression("exp(x)", ["x"])
    with pytest.raises(ParseError, match="nonzero constant term"):
        parse_expression("exp(1+x)", ["x"], order=3)


@settings(max_examples=200, deadline=None)
@given(polys(nvars=3))
def test_print_parse_round_trip(p):
    names = ["x1", "x2", "x3"]
    assert parse_expression(format_elem(p, names), names) == p


def test_canonical_printer():
    x, y = variables(2)
    assert format_elem(x ** 2 - y / 2 + 3, ["x", "y"]) == "x^2 - 1/2*y + 3"
    assert format_elem(MultiPoly.zero(2)) == "0"
    assert str(-x * y) == "-x1*x2"


def test_minimal_model():
    m = load_model({"variables": ["x1"], "L": [["x1"]], "e": ["1"]})
    assert m.n == 1 and m.mode == "poly"
    assert m.L[0, 0] == variables(1)[0]


def test_thm4_shaped_model():
    doc = {
        "variables": ["x1", "x2", "x3"],
        "L": [
            ["x1", "0", "0"],
            ["x2/2", "x2^2 + x1", "0"],
            ["-1/2*x3", "1", "x2^2 + x1"],
        ],
        "e": ["1", "0", "0"],
    }
    m = load_model(json.dumps(doc))
    x1, x2, x3 = variables(3)
    assert m.L[1, 0] == x2 / 2
    assert m.L[2, 0] == -x3 / 2
    assert m.L[0, 1].is_zero() and m.L[0, 2].is_zero() and m.L[1, 2].is_zero()


def test_asymmetric_circ_rejected():
    doc = {"variables": ["a", "b", "c"], "circ": {"1,2,3": "1", "1,3,2": "2"}}
    with pytest.raises(ModelError, match="asymmetric structure constants"):
        load_model(doc)
    ok = load_model({"variables": ["a", "b", "c"], "circ": {"1,2,3": "1", "1,3,2": "1"}})
    assert ok.circ.c(0, 2, 1) == 1


@pytest.mark.parametrize(
    "doc, message",
    [
        ("{", "invalid JSON"),
        ({"variables": []}, "non-empty"),
        ({"variables": ["x", "x"]}, "duplicate"),
        ({"variables": ["exp"]}, "bad variable"),
        ({"variables": ["x"], "L": [["x", "1"]]}, "1x1"),
        ({"variables": ["x"], "e": ["1", "2"]}, "list of 1"),
        ({"variables": ["x"], "L": [["x +"]]}, r"L\[1\]\[1\]"),
        ({"variables": ["x"], "junk": 1}, "unknown top-level"),
        ({"variables": ["x"], "mode": "fast"}, "unknown mode"),
        ({"variables": ["x"], "circ": {"1,2": "1"}}, "i,j,k"),
        ({"variables": ["x"], "circ": {"1,1,2": "1"}}, "out of range"),
    ],
)
def test_schema_errors(doc, message):
    with pytest.raises(ModelError, match=message):
        load_model(doc)


def test_series_mode_and_override(monkeypatch):
    doc = {"variables": ["x"], "mode": "series", "L": [["exp(x) - 1"]], "e": ["1"]}
    assert load_model(doc).order == default_series_order() == 8
    assert load_model(doc, series_order=3).order == 3
    assert load_model(dict(doc, mode={"series": 5})).order == 5
    monkeypatch.setenv("NIJENHUIS_SERIES_ORDER", "4")
    assert load_model(doc).order == 4
    monkeypatch.setenv("NIJENHUIS_SERIES_ORDER", "many")
    with pytest.raises(ValueError):
        default_series_order()


def test_dump_round_trip():
    doc = {
        "variables": ["u1", "u2"],
        "L": [["u1", "1"], ["u2", "0"]],
        "e": ["2", "-u1"],
        "E": ["u1", "2*u2"],
        "circ": {"1,1,1": "1", "2,1,2": "1"},
        "meta": {"name": "companion"},
    }
    m = load_model(doc)
    again = load_model(dump_model(m))
    assert again.L == m.L and again.e == m.e and again.E == m.E
    assert again.circ == m.circ and again.name == "companion"
