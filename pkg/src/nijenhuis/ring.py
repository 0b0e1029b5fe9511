"""Exact coefficient rings: sparse multivariate polynomials over Q and
total-degree-truncated power series.

Every coordinate function, matrix entry and structure constant in the package
is a ``MultiPoly`` or a ``TruncSeries``. Both are immutable. A ``TruncSeries``
of order ``N`` only knows its terms of total degree ``<= N``; arithmetic between
series of different orders keeps the smaller order, and a polynomial mixed
into a series is truncated to the series order.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

Rational = Fraction
Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]

__all__ = [
    "Rational",
    "MultiPoly",
    "TruncSeries",
    "RingElem",
    "NotDivisibleError",
    "poly_arith",
    "partial_derivative",
    "substitute",
    "series_exp",
    "evaluate",
    "divide_exact",
    "variables",
]


class NotDivisibleError(ArithmeticError):
    """Raised when an exact division leaves a nonzero remainder."""


def _min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients.

    ``terms`` maps exponent tuples to nonzero ``Fraction`` coefficients.
    """

    __slots__ = ("nvars", "terms", "order")

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponent, Scalar]] = None):
        self._setup(nvars, terms, None)

    def _setup(self, nvars, terms, order):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != nvars or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent {exp} for {nvars} variables")
                if order is not None and sum(exp) > order:
                    continue
                c = Fraction(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("ring elements are immutable")

    # construction helpers

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Fraction], order: Optional[int]):
        obj = object.__new__(TruncSeries if order is not None else MultiPoly)
        object.__setattr__(obj, "nvars", nvars)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "order", order)
        return obj

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "MultiPoly":
        return MultiPoly(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return MultiPoly(nvars)

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[index] = 1
        return MultiPoly(nvars, {tuple(exp): 1})

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def is_series(self) -> bool:
        return self.order is not None

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero element."""
        return max((sum(e) for e in self.terms), default=-1)

    def depends_on(self, var: int) -> bool:
        return any(e[var] for e in self.terms)

    def leading_term(self) -> Tuple[Exponent, Fraction]:
        exp = max(self.terms)
        return exp, self.terms[exp]

    # conversions

    def truncate(self, order: int) -> "TruncSeries":
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        order = _min_order(self.order, order)
        terms = {e: c for e, c in self.terms.items() if sum(e) <= order}
        return MultiPoly._raw(self.nvars, terms, order)

    def to_poly(self) -> "MultiPoly":
        """Drop the truncation marker; the stored terms become an exact polynomial."""
        return MultiPoly._raw(self.nvars, dict(self.terms), None)

    def embed(self, nvars: int, offset: int = 0) -> "MultiPoly":
        """Re-home into a ring with ``nvars`` variables, shifting indices by ``offset``."""
        if offset < 0 or offset + self.nvars > nvars:
            raise ValueError("embedding does not fit")
        pad_l, pad_r = (0,) * offset, (0,) * (nvars - offset - self.nvars)
        terms = {pad_l + e + pad_r: c for e, c in self.terms.items()}
        return MultiPoly._raw(nvars, terms, self.order)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"variable-count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.nvars, other)
        return NotImplemented

    # arithmetic

    def _with_order(self, terms, order):
        if order is not None:
            terms = {e: c for e, c in terms.items() if sum(e) <= order}
        return MultiPoly._raw(self.nvars, terms, order)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return self._with_order(terms, _min_order(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()}, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly._raw(self.nvars, {}, self.order)
            return MultiPoly._raw(
                self.nvars, {e: c * other for e, c in self.terms.items()}, self.order
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = _min_order(self.order, other.order)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[Exponent, Fraction] = {}
        if order is None:
            for ea, ca in a.items():
                for eb, cb in b.items():
                    e = _add_exp(ea, eb)
                    out[e] = out.get(e, 0) + ca * cb
        else:
            bl = sorted(((sum(e), e, c) for e, c in b.items()), key=lambda t: t[0])
            for ea, ca in a.items():
                da = sum(ea)
                for db, eb, cb in bl:
                    if da + db > order:
                        break
                    e = _add_exp(ea, eb)
                    out[e] = out.get(e, 0) + ca * cb
        out = {e: c for e, c in out.items() if c}
        return MultiPoly._raw(self.nvars, out, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly) and other.is_constant() and not other.is_zero():
            other = other.constant_term()
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        raise TypeError("ring elements divide only by nonzero scalars; use divide_exact")

    def __pow__(self, m: int):
        if not isinstance(m, int) or m < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly._raw(self.nvars, {(0,) * self.nvars: Fraction(1)}, self.order)
        base = self
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.nvars != self.nvars:
            return False
        order = _min_order(self.order, other.order)
        if order is None:
            return self.terms == other.terms
        return (self - other).is_zero()

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    # calculus

    def diff(self, var: int) -> "MultiPoly":
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range for {self.nvars} variables")
        if self.order == 0:
            raise ValueError("cannot differentiate a series truncated at order 0")
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                ne = list(e)
                ne[var] -= 1
                out[tuple(ne)] = c * e[var]
        order = None if self.order is None else self.order - 1
        return MultiPoly._raw(self.nvars, out, order)

    def __call__(self, *point):
        return evaluate(self, point)

    def __repr__(self):
        from .parser import format_elem

        body = format_elem(self)
        if self.order is not None:
            return f"TruncSeries({body}, order={self.order})"
        return f"MultiPoly({body})"

    def __str__(self):
        from .parser import format_elem

        return format_elem(self)


class TruncSeries(MultiPoly):
    """Power series in ``nvars`` variables known up to total degree ``order``."""

    __slots__ = ()

    def __init__(self, nvars: int, order: int, terms: Optional[Mapping[Exponent, Scalar]] = None):
        if order is None or order < 0:
            raise ValueError("truncation order must be >= 0")
        self._setup(nvars, terms, order)

    @classmethod
    def from_poly(cls, p: MultiPoly, order: int) -> "TruncSeries":
        return p.truncate(order)


RingElem = MultiPoly


def variables(nvars: int, order: Optional[int] = None) -> Tuple[MultiPoly, ...]:
    """The coordinate functions ``x_0, ..., x_{nvars-1}``."""
    vs = tuple(MultiPoly.var(nvars, i) for i in range(nvars))
    if order is not None:
        vs = tuple(v.truncate(order) for v in vs)
    return vs


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Strict binary arithmetic: operands must share variable count and,
    for series, truncation order."""
    if a.nvars != b.nvars:
        raise ValueError(f"variable-count mismatch: {a.nvars} vs {b.nvars}")
    if a.order != b.order:
        raise ValueError(f"truncation-order mismatch: {a.order} vs {b.order}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def partial_derivative(p: MultiPoly, var: int) -> MultiPoly:
    return p.diff(var)


def substitute(p: MultiPoly, assignments: Mapping[int, MultiPoly]) -> MultiPoly:
    """Compose ``p`` with ``x_i -> assignments[i]``.

    Unassigned variables are left alone, which requires the images to live in
    the same ring as ``p``. When every variable is assigned the images may
    live in any ring (with a common variable count). A truncated series can
    only be composed with images whose constant term is zero.
    """
    if not assignments:
        return p
    vals = dict(assignments)
    for i in vals:
        if not 0 <= i < p.nvars:
            raise IndexError(f"variable index {i} out of range for {p.nvars} variables")
    counts = {v.nvars for v in vals.values() if isinstance(v, MultiPoly)}
    if len(counts) > 1:
        raise ValueError("incompatible dimensions among substituted values")
    target = counts.pop() if counts else p.nvars
    for i in range(p.nvars):
        if i not in vals:
            if target != p.nvars:
                raise ValueError(
                    "incompatible dimensions: unassigned variables need a same-size target ring"
                )
            vals[i] = MultiPoly.var(p.nvars, i)
        elif not isinstance(vals[i], MultiPoly):
            vals[i] = MultiPoly.const(target, vals[i])
    if p.order is not None:
        for i, v in vals.items():
            if p.depends_on(i) and v.constant_term():
                raise ValueError(
                    "cannot substitute a value with nonzero constant term into a truncated series"
                )
    order = p.order
    for v in vals.values():
        order = _min_order(order, v.order)
    if order is not None:
        vals = {i: v.truncate(order) for i, v in vals.items()}
    cache: Dict[Tuple[int, int], MultiPoly] = {}

    def power(i, m):
        key = (i, m)
        if key not in cache:
            cache[key] = vals[i] ** m if m < 2 else power(i, m - 1) * vals[i]
        return cache[key]

    one = MultiPoly._raw(target, {(0,) * target: Fraction(1)}, order)
    result = MultiPoly._raw(target, {}, order)
    for e, c in p.terms.items():
        term = one * c
        for i, m in enumerate(e):
            if m:
                term = term * power(i, m)
        result = result + term
    return result


def series_exp(p: MultiPoly, order: Optional[int] = None) -> TruncSeries:
    """``exp(p)`` truncated at total degree ``order`` (default: the order of ``p``)."""
    if order is None:
        if p.order is None:
            raise ValueError("series_exp needs a truncated series or an explicit order")
        order = p.order
    if p.constant_term():
        raise ValueError("series_exp requires a zero constant term")
    p = p.truncate(order)
    result = MultiPoly._raw(p.nvars, {(0,) * p.nvars: Fraction(1)}, p.order)
    term = result
    for m in range(1, p.order + 1):
        term = term * p / m
        if term.is_zero():
            break
        result = result + term
    return result


def evaluate(p: MultiPoly, point: Sequence[Scalar]) -> Fraction:
    """Exact value at a rational point (for a series: of its stored terms)."""
    if len(point) != p.nvars:
        raise ValueError(f"point has length {len(point)}, expected {p.nvars}")
    pt = [Fraction(x) for x in point]
    total = Fraction(0)
    for e, c in p.terms.items():
        v = c
        for x, m in zip(pt, e):
            if m:
                v *= x ** m
        total += v
    return total


def divide_exact(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Quotient ``a / b`` when ``b`` divides ``a`` exactly in the ring.

    Uses lexicographic leading terms; if ``b | a`` then ``lt(b) | lt(a)`` at
    every step, so any failure proves non-divisibility. Series may only be
    divided by monomials, which lowers the order by the monomial's degree.
    """
    if not isinstance(b, MultiPoly):
        b = MultiPoly.const(a.nvars, b)
    if a.nvars != b.nvars:
        raise ValueError(f"variable-count mismatch: {a.nvars} vs {b.nvars}")
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.order is not None or b.order is not None:
        if len(b.terms) != 1:
            raise NotDivisibleError("series can only be divided exactly by a monomial")
        (eb, cb), = b.terms.items()
        out = {}
        for e, c in a.terms.items():
            q = tuple(x - y for x, y in zip(e, eb))
            if min(q, default=0) < 0:
                raise NotDivisibleError("monomial does not divide series term")
            out[q] = c / cb
        order = _min_order(a.order, b.order)
        return MultiPoly._raw(a.nvars, out, None if order is None else order - sum(eb))
    eb, cb = b.leading_term()
    rem = a
    quot: Dict[Exponent, Fraction] = {}
    while not rem.is_zero():
        er, cr = rem.leading_term()
        q = tuple(x - y for x, y in zip(er, eb))
        if min(q, default=0) < 0:
            raise NotDivisibleError("not exactly divisible")
        cq = cr / cb
        quot[q] = cq
        rem = rem - MultiPoly._raw(a.nvars, {q: cq}, None) * b
    return MultiPoly._raw(a.nvars, quot, None)


def monomials(nvars: int, max_degree: int) -> Iterable[Exponent]:
    """All exponent tuples of total degree ``<= max_degree``."""
    for e in _iproduct(range(max_degree + 1), repeat=nvars):
        if sum(e) <= max_degree:
            yield e
