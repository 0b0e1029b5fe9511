"""Expression grammar and JSON model files.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | power
    power  := atom (('^' | '**') INTEGER)?
    atom   := INTEGER | NAME | 'exp' '(' expr ')' | '(' expr ')'

Division is only allowed by expressions that lower to nonzero constants, so
``3/2*x1`` and ``x2/k`` (with ``k`` a literal) are fine. ``exp`` is only
available when expressions are lowered into truncated series.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .ring import MultiPoly, series_exp, variables as _coords
from .tensor import OperatorField, VectorField

DEFAULT_SERIES_ORDER = 8
SERIES_ORDER_ENV = "NIJENHUIS_SERIES_ORDER"


class ModelError(ValueError):
    """Schema violation or expression error inside a model document."""


def default_series_order() -> int:
    raw = os.environ.get(SERIES_ORDER_ENV)
    if raw is None:
        return DEFAULT_SERIES_ORDER
    try:
        value = int(raw)
    except ValueError:
        raise ModelError(f"{SERIES_ORDER_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ModelError(f"{SERIES_ORDER_ENV} must be >= 0")
    return value


class ParseError(ValueError):
    def __init__(self, message: str, pos: Optional[int] = None, src: str = ""):
        self.pos = pos
        self.src = src
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}")


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: Any
    right: Any
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    operand: Any
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: Any
    exponent: int
    pos: int = 0


@dataclass(frozen=True)
class Call:
    func: str
    arg: Any
    pos: int = 0


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^(),]))")


def tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(src, pos)
        if not m:
            start = len(src) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[start]!r}", start, src)
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("num", num, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ParseError(f"expected {value!r}, got {text or 'end of input'!r}", pos, self.src)

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos, self.src)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            node = BinOp(op, node, self.factor(), pos)
        return node

    def factor(self):
        kind, text, pos = self.peek()
        if kind == "op" and text in "+-":
            self.take()
            inner = self.factor()
            return Neg(inner, pos) if text == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, epos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer literal", epos, self.src)
            base = Pow(base, int(text), pos)
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                raise ParseError("chained powers are ambiguous; add parentheses", self.peek()[2], self.src)
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(Fraction(int(text)), pos)
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg, pos)
            return Var(text, pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos, self.src)


def parse_ast(src: str):
    return _Parser(src).parse()


def lower(node, names: Sequence[str], order: Optional[int] = None, src: str = "") -> MultiPoly:
    """Turn an AST into a ring element over the coordinates ``names``."""
    index = {nm: i for i, nm in enumerate(names)}
    nv = len(names)
    coords = _coords(nv, order)
    one = MultiPoly.one(nv) if order is None else MultiPoly.one(nv).truncate(order)

    def go(n):
        if isinstance(n, Num):
            return one * n.value
        if isinstance(n, Var):
            if n.name not in index:
                raise ParseError(f"unknown identifier {n.name!r}", n.pos, src)
            return coords[index[n.name]]
        if isinstance(n, Neg):
            return -go(n.operand)
        if isinstance(n, Pow):
            return go(n.base) ** n.exponent
        if isinstance(n, BinOp):
            a, b = go(n.left), go(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if not b.is_constant() or b.is_zero():
                raise ParseError("division only by nonzero constants", n.pos, src)
            return a / b.constant_term()
        if isinstance(n, Call):
            if n.func != "exp":
                raise ParseError(f"unknown function {n.func!r}", n.pos, src)
            if order is None:
                raise ParseError("exp is only available in series mode", n.pos, src)
            arg = go(n.arg)
            if arg.constant_term():
                raise ParseError("exp of an argument with nonzero constant term", n.pos, src)
            return series_exp(arg, order)
        raise TypeError(f"unknown node {n!r}")

    return go(node)


def parse_expression(src: Union[str, int], names: Sequence[str], order: Optional[int] = None) -> MultiPoly:
    """Parse ``src`` into a polynomial (``order is None``) or a series of that order."""
    if isinstance(src, int) and not isinstance(src, bool):
        src = str(src)
    if not isinstance(src, str):
        raise ParseError(f"expression must be a string, got {type(src).__name__}")
    return lower(parse_ast(src), names, order, src)


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_elem(p: MultiPoly, names: Optional[Sequence[str]] = None) -> str:
    """Canonical printer; ``parse_expression(format_elem(p), names)`` gives back ``p``."""
    if names is None:
        names = [f"x{i + 1}" for i in range(p.nvars)]
    if p.is_zero():
        return "0"
    keys = sorted(p.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
    parts = []
    for n, e in enumerate(keys):
        c = p.terms[e]
        mono = "*".join(
            names[i] if m == 1 else f"{names[i]}^{m}" for i, m in enumerate(e) if m
        )
        mag = abs(c)
        if not mono:
            body = _fmt_coef(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coef(mag)}*{mono}"
        if n == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)


# ---------------------------------------------------------------- model files

MODEL_KEYS = {"variables", "mode", "L", "e", "E", "circ", "meta"}
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class ModelFile:
    variables: List[str]
    order: Optional[int] = None
    L: Optional[OperatorField] = None
    e: Optional[VectorField] = None
    E: Optional[VectorField] = None
    circ: Any = None  # fman.Multiplication
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def mode(self) -> str:
        return "poly" if self.order is None else f"series {self.order}"

    @property
    def name(self) -> str:
        return str(self.meta.get("name", ""))

    def parse(self, src) -> MultiPoly:
        return parse_expression(src, self.variables, self.order)


def _parse_mode(mode, series_order):
    if mode is None or mode == "poly":
        return None
    if mode == "series":
        return series_order if series_order is not None else default_series_order()
    if isinstance(mode, dict) and set(mode) == {"series"}:
        n = mode["series"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ModelError("mode.series must be a non-negative integer")
        return series_order if series_order is not None else n
    raise ModelError(f"unknown mode {mode!r}; expected 'poly', 'series' or {{'series': N}}")


def load_model(document: Union[str, bytes, Mapping], series_order: Optional[int] = None) -> ModelFile:
    """Parse a model document (JSON text or an already-decoded mapping).

    ``series_order`` overrides the truncation order of series-mode models.
    """
    from .fman import Multiplication

    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ModelError("model document must be a JSON object")
    extra = set(document) - MODEL_KEYS
    if extra:
        raise ModelError(f"unknown top-level keys: {sorted(extra)}")
    names = document.get("variables")
    if not isinstance(names, list) or not names:
        raise ModelError("'variables' must be a non-empty list of names")
    for nm in names:
        if not isinstance(nm, str) or not _IDENT.match(nm) or nm == "exp":
            raise ModelError(f"bad variable name {nm!r}")
    if len(set(names)) != len(names):
        raise ModelError("duplicate variable names")
    n = len(names)
    order = _parse_mode(document.get("mode", "poly"), series_order)

    def expr(src, path):
        if isinstance(src, bool) or not isinstance(src, (str, int)):
            raise ModelError(f"{path}: expression must be a string or integer")
        try:
            return parse_expression(src, names, order)
        except ParseError as exc:
            raise ModelError(f"{path}: {exc}") from None

    def vector(key):
        raw = document.get(key)
        if raw is None:
            return None
        if not isinstance(raw, list) or len(raw) != n:
            raise ModelError(f"'{key}' must be a list of {n} expressions")
        return VectorField([expr(s, f"{key}[{i + 1}]") for i, s in enumerate(raw)], n)

    L = None
    if document.get("L") is not None:
        raw = document["L"]
        if not isinstance(raw, list) or len(raw) != n or any(
            not isinstance(r, list) or len(r) != n for r in raw
        ):
            raise ModelError(f"'L' must be a {n}x{n} list of lists")
        L = OperatorField(
            [[expr(s, f"L[{i + 1}][{j + 1}]") for j, s in enumerate(r)] for i, r in enumerate(raw)],
            n,
        )

    circ = None
    if document.get("circ") is not None:
        raw = document["circ"]
        if not isinstance(raw, Mapping):
            raise ModelError("'circ' must map 'i,j,k' keys to expressions")
        entries = {}
        for key, src in raw.items():
            try:
                i, j, k = (int(t) for t in str(key).split(","))
            except ValueError:
                raise ModelError(f"circ key {key!r} is not of the form 'i,j,k'") from None
            if not all(1 <= t <= n for t in (i, j, k)):
                raise ModelError(f"circ key {key!r} out of range 1..{n}")
            entries[(i - 1, j - 1, k - 1)] = expr(src, f"circ[{key}]")
        try:
            circ = Multiplication.from_entries(n, entries, nvars=n, order=order)
        except ValueError as exc:
            raise ModelError(str(exc)) from None

    meta = document.get("meta") or {}
    if not isinstance(meta, Mapping):
        raise ModelError("'meta' must be an object")
    return ModelFile(
        variables=list(names),
        order=order,
        L=L,
        e=vector("e"),
        E=vector("E"),
        circ=circ,
        meta=dict(meta),
    )


def load_model_file(path: str, series_order: Optional[int] = None) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return load_model(text, series_order)


def dump_model(model: ModelFile, raw_exprs: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Serialise a model. ``raw_exprs`` can supply source strings (e.g. ones using
    ``exp``) that should be written instead of the expanded ring elements."""
    names = model.variables
    fmt = lambda p: format_elem(p.to_poly(), names)  # noqa: E731
    doc: Dict[str, Any] = {"variables": list(names)}
    doc["mode"] = "poly" if model.order is None else {"series": model.order}
    if model.L is not None:
        doc["L"] = [[fmt(x) for x in r] for r in model.L.entries]
    if model.e is not None:
        doc["e"] = [fmt(x) for x in model.e]
    if model.E is not None:
        doc["E"] = [fmt(x) for x in model.E]
    if model.circ is not None:
        doc["circ"] = {
            f"{i + 1},{j + 1},{k + 1}": fmt(v) for (i, j, k), v in model.circ.stored_entries()
        }
    if raw_exprs:
        for key, value in raw_exprs.items():
            doc[key] = value
    if model.meta:
        doc["meta"] = dict(model.meta)
    return doc
