"""Normal and semi-normal forms of Nijenhuis operators with a unity.

Every constructor returns a :class:`Form`, which unpacks as ``L, e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

from .parser import format_elem, parse_expression
from .ring import MultiPoly, series_exp, substitute, variables
from .tensor import OperatorField, VectorField

Param = Union[str, int, Fraction, MultiPoly]

FAMILIES = (
    "jordan",
    "complex-block",
    "toeplitz",
    "complex-toeplitz",
    "companion",
    "dim2-case1",
    "dim2-case2",
    "dim2-case3",
    "dim2-case4",
    "dim3-thm4",
    "dim3-cor1",
    "dim3-cor2",
)


@dataclass
class Form:
    name: str
    L: OperatorField
    e: VectorField
    variables: List[str]
    order: Optional[int] = None
    eigenvalues: List[MultiPoly] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)
    # source strings for entries that read better unexpanded (exp calls)
    raw_entries: Dict[tuple, str] = field(default_factory=dict)

    def __iter__(self):
        return iter((self.L, self.e))

    @property
    def n(self) -> int:
        return self.L.n


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def _elem(p: Param, names: Sequence[str], order: Optional[int] = None) -> MultiPoly:
    nv = len(names)
    if isinstance(p, str):
        return parse_expression(p, names, order)
    if isinstance(p, MultiPoly):
        if p.nvars == nv:
            return p
        if nv == 3 and p.nvars == 2:
            return p.embed(3, offset=1)
        raise ValueError(f"parameter has {p.nvars} variables, expected {nv}")
    return MultiPoly.const(nv, Fraction(p))


def _names(prefix: str, n: int) -> List[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


def jordan_unity_form(n: int, lambda0=0, last_sign: int = -1) -> Form:
    """Single real eigenvalue, Jordan-type normal form with ``e = d/du1``.

    Column one below the subdiagonal reads ``-u3, -2 u4, ..., -(n-2) un``;
    ``last_sign=+1`` flips the sign of the final entry only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = Fraction(lambda0)
    u = variables(n)
    rows = [[MultiPoly.zero(n)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = u[0] + lam
        if i >= 1:
            rows[i][i - 1] = MultiPoly.one(n)
        if i >= 2:
            coef = -(i - 1)
            if i == n - 1 and last_sign > 0:
                coef = i - 1
            rows[i][0] = u[i] * coef
    params = {"n": n, "lambda0": lam}
    if last_sign > 0:
        params["last_sign"] = 1
    return Form("jordan", OperatorField(rows, n), VectorField.coordinate(n, 0), _names("u", n),
                eigenvalues=[u[0] + lam], params=params)


def toeplitz_form(n: int, lambda0=0) -> Form:
    """Lower-triangular Toeplitz form with first column ``(u1+l0, u2+1, u3, ..., un)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = Fraction(lambda0)
    u = variables(n)
    diag = [u[0] + lam] + ([u[1] + 1] if n > 1 else []) + list(u[2:])
    rows = [[diag[i - j] if i >= j else MultiPoly.zero(n) for j in range(n)] for i in range(n)]
    return Form("toeplitz", OperatorField(rows, n), VectorField.coordinate(n, 0), _names("u", n),
                eigenvalues=[u[0] + lam], params={"n": n, "lambda0": lam})


def _complex_names(s: int) -> List[str]:
    out = []
    for p in range(1, s + 1):
        out += [f"x{p}", f"y{p}"]
    return out


def _cblock(s: int, p: int):
    """``C^p`` as a 2x2 list (``p`` is 1-based)."""
    nv = 2 * s
    x, y = MultiPoly.var(nv, 2 * (p - 1)), MultiPoly.var(nv, 2 * p - 1)
    return [[x, -y], [y, x]]


def _assemble(blocks: Dict[tuple, list], s: int) -> OperatorField:
    nv = 2 * s
    rows = [[MultiPoly.zero(nv)] * nv for _ in range(nv)]
    for (bi, bj), blk in blocks.items():
        for r in range(2):
            for c in range(2):
                rows[2 * bi + r][2 * bj + c] = blk[r][c]
    return OperatorField(rows, nv)


def _badd(a, b):
    return [[a[r][c] + b[r][c] for c in range(2)] for r in range(2)]


def _bscale(a, k):
    return [[a[r][c] * k for c in range(2)] for r in range(2)]


def _lambda_block(s, a0, b0):
    nv = 2 * s
    a, b = Fraction(a0), Fraction(b0)
    return [[MultiPoly.const(nv, a), MultiPoly.const(nv, -b)],
            [MultiPoly.const(nv, b), MultiPoly.const(nv, a)]]


def _identity_block(s):
    nv = 2 * s
    return [[MultiPoly.one(nv), MultiPoly.zero(nv)], [MultiPoly.zero(nv), MultiPoly.one(nv)]]


def complex_block_form(s: int, a0=0, b0=1, last_sign: int = -1) -> Form:
    """Pair of complex conjugate eigenvalues ``a0 +- i b0``; block analogue of the Jordan form."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if Fraction(b0) == 0:
        raise ValueError("b0 must be nonzero for a complex eigenvalue")
    diag = _badd(_cblock(s, 1), _lambda_block(s, a0, b0))
    blocks = {}
    for q in range(s):
        blocks[(q, q)] = diag
        if q >= 1:
            blocks[(q, q - 1)] = _identity_block(s)
        if q >= 2:
            coef = -(q - 1)
            if q == s - 1 and last_sign > 0:
                coef = q - 1
            blocks[(q, 0)] = _bscale(_cblock(s, q + 1), coef)
    n = 2 * s
    params = {"s": s, "a0": Fraction(a0), "b0": Fraction(b0)}
    if last_sign > 0:
        params["last_sign"] = 1
    return Form("complex-block", _assemble(blocks, s), VectorField.coordinate(n, 0),
                _complex_names(s), params=params)


def complex_toeplitz_form(s: int, a0=0, b0=1) -> Form:
    if s < 1:
        raise ValueError("s must be >= 1")
    if Fraction(b0) == 0:
        raise ValueError("b0 must be nonzero for a complex eigenvalue")
    diag = [_badd(_cblock(s, 1), _lambda_block(s, a0, b0))]
    if s > 1:
        diag.append(_badd(_cblock(s, 2), _identity_block(s)))
    diag += [_cblock(s, p) for p in range(3, s + 1)]
    blocks = {(i, j): diag[i - j] for i in range(s) for j in range(i + 1)}
    n = 2 * s
    return Form("complex-toeplitz", _assemble(blocks, s), VectorField.coordinate(n, 0),
                _complex_names(s), params={"s": s, "a0": Fraction(a0), "b0": Fraction(b0)})


def companion_dnd_form(n: int) -> Form:
    """Differentially non-degenerate companion form with its polynomial unity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = variables(n)
    rows = [[MultiPoly.zero(n)] * n for _ in range(n)]
    for i in range(n):
        rows[i][0] = u[i]
        if i + 1 < n:
            rows[i][i + 1] = MultiPoly.one(n)
    e = [MultiPoly.const(n, n)] + [u[i - 1] * (-(n - i)) for i in range(1, n)]
    return Form("companion", OperatorField(rows, n), VectorField(e, n), _names("u", n),
                params={"n": n})


_DIM2_PARAMS = {1: set(), 2: {"d"}, 3: {"k", "sign"}, 4: {"f"}}


def dim2_form(case: int, lambda0=0, **params) -> Form:
    """The four two-dimensional semi-normal forms, ``e = d/dx``.

    Case 2 takes ``d``; case 3 takes ``k`` and ``sign`` (``det L = (x+l0)^2 + sign*y^k``);
    case 4 takes the functional parameter ``f``, which must not depend on ``x``.
    """
    if case not in _DIM2_PARAMS:
        raise ValueError(f"unknown 2D case {case!r}")
    want = _DIM2_PARAMS[case]
    given = set(params)
    if given != want:
        missing, extra = want - given, given - want
        raise ValueError(
            f"case {case}: missing params {sorted(missing)}, unexpected params {sorted(extra)}"
        )
    names = ["x", "y"]
    x, y = variables(2)
    lam = Fraction(lambda0)
    diag = x + lam
    zero = MultiPoly.zero(2)
    info: Dict[str, Any] = {"case": case, "lambda0": lam}
    if case == 1:
        rows = [[diag, zero], [zero, diag]]
    elif case == 2:
        d = Fraction(params["d"])
        rows = [[diag, MultiPoly.const(2, Fraction(-1, 2))], [(y + d) * 2, diag]]
        info["d"] = d
    elif case == 3:
        k, s = int(params["k"]), _sign(params["sign"])
        if k < 1:
            raise ValueError("k must be >= 1")
        rows = [[diag, y ** (k - 1) * Fraction(-s * k, 2)], [y * Fraction(2, k), diag]]
        info.update(k=k, sign=s)
    else:
        f = _elem(params["f"], names)
        if f.depends_on(0):
            # e = d/dx is a unity only if the lower-left entry is free of x
            raise ValueError("case 4: f must be a function of y alone for e = d/dx to be a unity")
        rows = [[diag, zero], [f, diag]]
        info["f"] = format_elem(f, names)
    eig = [diag] if case in (1, 4) else []
    return Form(f"dim2-case{case}", OperatorField(rows, 2), VectorField.coordinate(2, 0), names,
                eigenvalues=eig, params=info)


_DIM3 = ["x1", "x2", "x3"]


def _dim3(name, k, lambda0, sign, f, g, order=None, extra=None):
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _sign(sign)
    lam = Fraction(lambda0)
    x1, x2, x3 = variables(3)
    a = x1 + lam
    b = x2 ** k * s + x1 + lam
    zero = MultiPoly.zero(3)
    rows = [[a, zero, zero], [x2 / k, b, zero], [f, g, b]]
    params = {"k": k, "lambda0": lam, "sign": s}
    params.update(extra or {})
    return Form(name, OperatorField(rows, 3), VectorField.coordinate(3, 0), list(_DIM3),
                order=order, eigenvalues=[a, b], params=params)


def dim3_thm4_form(k: int, lambda0=0, sign=1, f: Param = 0, g: Param = 0) -> Form:
    """Three-dimensional semi-normal form with functional parameters ``f, g`` of ``(x2, x3)``.

    No PDE is enforced here so that violating pairs can be built as negative fixtures.
    """
    order = next((p.order for p in (f, g) if isinstance(p, MultiPoly) and p.order is not None), None)
    fe, ge = _elem(f, _DIM3, order), _elem(g, _DIM3, order)
    for p in (fe, ge):
        if p.depends_on(0):
            raise ValueError("f and g must depend on (x2, x3) only")
    return _dim3("dim3-thm4", k, lambda0, sign, fe, ge, order,
                 {"f": format_elem(fe.to_poly(), _DIM3), "g": format_elem(ge.to_poly(), _DIM3)})


def _univariate(F) -> List[Fraction]:
    if isinstance(F, MultiPoly):
        if F.nvars != 1:
            raise ValueError("F must be univariate")
        deg = max(F.degree(), 0)
        return [F.terms.get((m,), Fraction(0)) for m in range(deg + 1)]
    if isinstance(F, str):
        return _univariate(parse_expression(F, ["t"]))
    if isinstance(F, (int, Fraction)):
        return [Fraction(F)]
    return [Fraction(c) for c in F]


def cor1_g(k: int, F, order: int) -> MultiPoly:
    """``F(x2 exp(-x3/k)) exp((k-1) x3 / k)`` as a series in ``(x1, x2, x3)``."""
    coeffs = _univariate(F)
    x1, x2, x3 = variables(3, order)
    arg = x2 * series_exp(x3 * Fraction(-1, k))
    Fpoly = MultiPoly(1, {(m,): c for m, c in enumerate(coeffs)})
    inner = substitute(Fpoly, {0: arg})
    return inner * series_exp(x3 * Fraction(k - 1, k))


def _cor1_source(k: int, coeffs: Sequence[Fraction]) -> str:
    fk = Fraction(1, k)
    arg = f"(x2*exp(-{fk}*x3))"
    terms = []
    for m, c in enumerate(coeffs):
        if c:
            terms.append(f"({c})" if m == 0 else f"({c})*{arg}^{m}")
    inner = " + ".join(terms) or "0"
    return f"({inner})*exp({Fraction(k - 1, k)}*x3)"


def dim3_cor1_form(k: int, lambda0=0, sign=1, F=1, order: int = 8) -> Form:
    """``f = 1`` and ``g = F(x2 e^{-x3/k}) e^{(k-1) x3/k}`` for a polynomial ``F``,
    assembled in series mode of the given order."""
    coeffs = _univariate(F)
    g = cor1_g(k, coeffs, order)
    f = MultiPoly.one(3).truncate(order)
    Fsrc = format_elem(MultiPoly(1, {(m,): c for m, c in enumerate(coeffs)}), ["t"])
    form = _dim3("dim3-cor1", k, lambda0, sign, f, g, order, {"F": Fsrc})
    form.raw_entries[(2, 1)] = _cor1_source(k, coeffs)
    return form


def dim3_cor2_form(k: int, lambda0=0, sign=1) -> Form:
    x3 = MultiPoly.var(3, 2)
    f = x3 * Fraction(1 - k, k)
    return _dim3("dim3-cor2", k, lambda0, sign, f, MultiPoly.one(3))


def direct_sum(a: Form, b: Form) -> Form:
    """Block-diagonal sum on the product of the two coordinate spaces."""
    n1, n2 = a.n, b.n
    n = n1 + n2
    order = a.order if b.order is None else (b.order if a.order is None else min(a.order, b.order))
    rows = [[MultiPoly.zero(n)] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            rows[i][j] = a.L[i, j].embed(n, 0)
    for i in range(n2):
        for j in range(n2):
            rows[n1 + i][n1 + j] = b.L[i, j].embed(n, n1)
    e = [c.embed(n, 0) for c in a.e] + [c.embed(n, n1) for c in b.e]
    names = [f"{v}_1" for v in a.variables] + [f"{v}_2" for v in b.variables]
    return Form(f"{a.name}+{b.name}", OperatorField(rows, n), VectorField(e, n), names,
                order=order, params={"partition": [n1, n2]})


# ---------------------------------------------------------------- specs


@dataclass
class FormSpec:
    family: str
    n: Optional[int] = None
    s: Optional[int] = None
    lambda0: Fraction = Fraction(0)
    a0: Fraction = Fraction(0)
    b0: Fraction = Fraction(1)
    sign: int = 1
    k: Optional[int] = None
    d: Optional[Fraction] = None
    f: Optional[str] = None
    g: Optional[str] = None
    F: Optional[str] = None
    order: Optional[int] = None
    last_sign: int = -1

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        fam = self.family
        needs_n = fam in ("jordan", "toeplitz", "companion")
        needs_s = fam in ("complex-block", "complex-toeplitz")
        if needs_n and (self.n is None or self.n < 1):
            raise ValueError(f"{fam} needs n >= 1")
        if needs_s and (self.s is None or self.s < 1):
            raise ValueError(f"{fam} needs s >= 1")
        if needs_s and Fraction(self.b0) == 0:
            raise ValueError("b0 must be nonzero")
        if fam in ("dim2-case3", "dim3-thm4", "dim3-cor1", "dim3-cor2") and (
            self.k is None or self.k < 1
        ):
            raise ValueError(f"{fam} needs k >= 1")
        if fam == "dim2-case2" and self.d is None:
            raise ValueError("dim2-case2 needs d")
        if fam == "dim2-case4" and self.f is None:
            raise ValueError("dim2-case4 needs f")
        if fam == "dim3-thm4" and (self.f is None or self.g is None):
            raise ValueError("dim3-thm4 needs f and g")
        if self.last_sign not in (1, -1):
            raise ValueError("last_sign must be +1 or -1")


def build(spec: FormSpec) -> Form:
    spec.validate()
    fam = spec.family
    if fam == "jordan":
        return jordan_unity_form(spec.n, spec.lambda0, spec.last_sign)
    if fam == "toeplitz":
        return toeplitz_form(spec.n, spec.lambda0)
    if fam == "companion":
        return companion_dnd_form(spec.n)
    if fam == "complex-block":
        return complex_block_form(spec.s, spec.a0, spec.b0, spec.last_sign)
    if fam == "complex-toeplitz":
        return complex_toeplitz_form(spec.s, spec.a0, spec.b0)
    if fam == "dim2-case1":
        return dim2_form(1, spec.lambda0)
    if fam == "dim2-case2":
        return dim2_form(2, spec.lambda0, d=spec.d)
    if fam == "dim2-case3":
        return dim2_form(3, spec.lambda0, k=spec.k, sign=spec.sign)
    if fam == "dim2-case4":
        return dim2_form(4, spec.lambda0, f=spec.f)
    if fam == "dim3-thm4":
        order = spec.order
        f = parse_expression(spec.f, _DIM3, order)
        g = parse_expression(spec.g, _DIM3, order)
        return dim3_thm4_form(spec.k, spec.lambda0, spec.sign, f, g)
    if fam == "dim3-cor1":
        from .parser import default_series_order

        order = spec.order if spec.order is not None else default_series_order()
        return dim3_cor1_form(spec.k, spec.lambda0, spec.sign, spec.F or "1", order)
    return dim3_cor2_form(spec.k, spec.lambda0, spec.sign)


def form_to_model(form: Form):
    """Wrap a form as a :class:`~nijenhuis.parser.ModelFile` plus its JSON document."""
    from .parser import ModelFile, dump_model

    meta: Dict[str, Any] = {"name": form.name, "family": form.name}
    meta["params"] = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in form.params.items()}
    if form.eigenvalues:
        meta["eigenvalues"] = [format_elem(p.to_poly(), form.variables) for p in form.eigenvalues]
    if "partition" in form.params:
        meta["partition"] = list(form.params["partition"])
    if form.name.startswith("dim3-"):
        meta["thm4"] = {
            "k": form.params["k"],
            "f": form.raw_entries.get((2, 0), format_elem(form.L[2, 0].to_poly(), form.variables)),
            "g": form.raw_entries.get((2, 1), format_elem(form.L[2, 1].to_poly(), form.variables)),
        }
    model = ModelFile(form.variables, form.order, form.L, form.e, None, None, meta)
    doc = dump_model(model)
    if form.raw_entries:
        for (i, j), src in form.raw_entries.items():
            doc["L"][i][j] = src
    return model, doc


# ---------------------------------------------------------------- fixtures


def thm4_power_solution(k: int, p: int, C=1, phi: Param = 0, violate: bool = False):
    """``g = C x2^p`` with ``f = ((p-k+1)/k) x3 + phi(x2)`` solves the PDE;
    ``violate=True`` shifts the ``x3`` coefficient of ``f`` by one."""
    x1, x2, x3 = variables(3)
    beta = Fraction(p - k + 1, k) + (1 if violate else 0)
    f = x3 * beta + _elem(phi, _DIM3)
    g = x2 ** p * Fraction(C)
    return f, g


def thm4_kernel_solution(k: int, P: Param = 1, violate: bool = False):
    """``f = 0`` and ``g = x2^{k-1} P(x3)``; ``violate=True`` uses ``x2^k P``."""
    x1, x2, x3 = variables(3)
    Pe = _elem(P, _DIM3)
    if Pe.depends_on(0) or Pe.depends_on(1):
        raise ValueError("P must be a function of x3")
    return MultiPoly.zero(3), x2 ** (k if violate else k - 1) * Pe


def regression_matrix(series_order: int = 8, jordan_last_sign: int = -1) -> List[Form]:
    """Every constructor over the parameter grid used for regression."""
    out: List[Form] = []
    half = Fraction(1, 2)
    for n in range(1, 6):
        out.append(jordan_unity_form(n, half if n % 2 else 1, last_sign=jordan_last_sign))
        out.append(toeplitz_form(n, -1 if n % 2 else 0))
        out.append(companion_dnd_form(n))
    for s in (1, 2):
        out.append(complex_block_form(s, 0, 1, last_sign=jordan_last_sign))
        out.append(complex_toeplitz_form(s, half, 2))
    out.append(dim2_form(1, half))
    out.append(dim2_form(2, 0, d=0))
    out.append(dim2_form(2, 1, d=Fraction(-3, 2)))
    for k in (1, 2, 3):
        for sign in (1, -1):
            out.append(dim2_form(3, k, k=k, sign=sign))
    out.append(dim2_form(4, 0, f="0"))
    out.append(dim2_form(4, 2, f="y^3 - 2*y + 1/3"))
    for k in (1, 2, 3):
        f, g = thm4_power_solution(k, k + 1, 3, "x2^2")
        out.append(dim3_thm4_form(k, 0, 1, f, g))
        f, g = thm4_kernel_solution(k, "1 + x3^2")
        out.append(dim3_thm4_form(k, half, -1, f, g))
        out.append(dim3_cor2_form(k, 1, 1 if k % 2 else -1))
    for k in (2, 3):
        for F in ([1], [0, 1], [1, 1]):
            out.append(dim3_cor1_form(k, 0, 1, F, series_order))
    return out
