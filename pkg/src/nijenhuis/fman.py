"""F-manifold layer: multiplications of vector fields, frame fields ``X_i = L^i e``,
the F-manifold axioms and the three-dimensional structure constants.

Structure constants are ``c[i, j, k] = c^i_{jk}`` with ``d_j o d_k = c^i_{jk} d_i``;
indices are 0-based in code and 1-based in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Optional, Tuple

from .ring import MultiPoly, NotDivisibleError, divide_exact
from .tensor import (
    OperatorField,
    VectorField,
    commutator,
    lie_derivative_operator,
    operator_power,
    ring_adjugate,
    ring_det,
)
from .verify import DegenerateTransformError, Report, _origin, merge_reports

Index = Tuple[int, int, int]


class FrameDegenerateError(ValueError):
    """The frame ``e, Le, ..., L^{n-1} e`` has identically vanishing determinant."""


class Multiplication:
    """Commutative multiplication on vector fields given by its structure constants.

    Only entries with ``j <= k`` are stored; ``c(i, k, j)`` reads ``c(i, j, k)``.
    """

    __slots__ = ("n", "nvars", "_c")

    def __init__(self, n: int, nvars: int, constants: Mapping[Index, MultiPoly]):
        self.n = n
        self.nvars = nvars
        self._c: Dict[Index, MultiPoly] = {}
        for (i, j, k), v in constants.items():
            if j > k:
                j, k = k, j
            if not v.is_zero():
                self._c[(i, j, k)] = v

    @classmethod
    def from_entries(cls, n: int, entries: Mapping[Index, MultiPoly], nvars: Optional[int] = None,
                     order: Optional[int] = None) -> "Multiplication":
        """Build from possibly redundant entries; ``c^i_{jk}`` and ``c^i_{kj}`` must agree."""
        nvars = n if nvars is None else nvars
        norm: Dict[Index, MultiPoly] = {}
        for (i, j, k), v in entries.items():
            if not all(0 <= t < n for t in (i, j, k)):
                raise ValueError(f"structure constant index {(i, j, k)} out of range")
            if not isinstance(v, MultiPoly):
                v = MultiPoly.const(nvars, v)
            if v.nvars != nvars:
                raise ValueError("structure constant lives in the wrong ring")
            if order is not None:
                v = v.truncate(order)
            key = (i, min(j, k), max(j, k))
            if key in norm and not norm[key] == v:
                raise ValueError(
                    f"asymmetric structure constants at {i + 1},{j + 1},{k + 1}"
                )
            norm[key] = v
        return cls(n, nvars, norm)

    def c(self, i: int, j: int, k: int) -> MultiPoly:
        if j > k:
            j, k = k, j
        v = self._c.get((i, j, k))
        return v if v is not None else MultiPoly.zero(self.nvars)

    def stored_entries(self) -> List[Tuple[Index, MultiPoly]]:
        return sorted(self._c.items(), key=lambda kv: kv[0])

    def product(self, xi: VectorField, eta: VectorField) -> VectorField:
        n = self.n
        out = [MultiPoly.zero(self.nvars) for _ in range(n)]
        for (i, j, k), v in self._c.items():
            if j == k:
                term = xi[j] * eta[j]
            else:
                term = xi[j] * eta[k] + xi[k] * eta[j]
            if not term.is_zero():
                out[i] = out[i] + v * term
        return VectorField(out, self.nvars)

    def __eq__(self, other):
        if not isinstance(other, Multiplication):
            return NotImplemented
        if self.n != other.n:
            return False
        keys = set(self._c) | set(other._c)
        return all(self.c(*key) == other.c(*key) for key in keys)

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{i + 1},{j + 1},{k + 1}: {v}" for (i, j, k), v in self.stored_entries())
        return f"Multiplication(n={self.n}, {{{body}}})"


@dataclass
class FManifoldModel:
    circ: Multiplication
    e: VectorField
    E: VectorField

    def __post_init__(self):
        if not (self.circ.n == self.e.n == self.E.n):
            raise ValueError("multiplication, unity and Euler field have different dimensions")


# ---------------------------------------------------------------- frame fields


def frame_fields(L: OperatorField, e: VectorField, m: int) -> List[VectorField]:
    """``[e, L e, ..., L^m e]``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    out = [e]
    for _ in range(m):
        out.append(L @ out[-1])
    return out


def check_frame_relations(L: OperatorField, e: VectorField, m: int) -> Report:
    """``L_{X_i}(L^j) = j L^{i+j-1}`` and ``[X_i, X_j] = (j-i) X_{i+j-1}`` for ``0 <= i, j <= m``."""
    X = frame_fields(L, e, max(2 * m, 1))
    powers = [operator_power(L, 0)]
    for _ in range(2 * m):
        powers.append(powers[-1] @ L)
    nv = L.nvars
    res = []
    for i in range(m + 1):
        for j in range(m + 1):
            lhs = lie_derivative_operator(X[i], powers[j])
            rhs = powers[i + j - 1] * j if i + j >= 1 else OperatorField.zero(L.n, nv)
            for a, b, v in (lhs - rhs).nonzero_entries():
                res.append((("lie", i, j, a + 1, b + 1), v))
            if i < j:
                br = commutator(X[i], X[j]) - X[i + j - 1] * (j - i)
                for a, v in enumerate(br):
                    if not v.is_zero():
                        res.append((("bracket", i, j, a + 1), v))
    return Report("frame", res, f"m={m}")


def multiplication_on_frame(L: OperatorField, e: VectorField) -> Multiplication:
    """The multiplication with ``X_i o X_j = X_{i+j}`` written in coordinates.

    With ``F`` the frame matrix (columns ``X_0..X_{n-1}``) and ``A = adj F``,
    ``c^i_{jk} = sum_{a,b} A[a][j] A[b][k] X_{a+b}^i / det(F)^2``; the division
    must be exact, otherwise the multiplication is not polynomial here.
    """
    n, nv = L.n, L.nvars
    X = frame_fields(L, e, 2 * n - 2)
    F = [[X[a][i] for a in range(n)] for i in range(n)]
    det = ring_det(F)
    if det.is_zero():
        raise FrameDegenerateError(
            "frame e, Le, ..., L^(n-1)e is degenerate: its determinant vanishes identically, "
            "so the frame is only non-degenerate at points where that determinant is nonzero"
        )
    A = ring_adjugate(F)
    det2 = det * det
    consts = {}
    for j in range(n):
        for k in range(j, n):
            for i in range(n):
                num = MultiPoly.zero(nv)
                for a in range(n):
                    if A[a][j].is_zero():
                        continue
                    for b in range(n):
                        x = X[a + b][i]
                        if not x.is_zero() and not A[b][k].is_zero():
                            num = num + A[a][j] * A[b][k] * x
                if num.is_zero():
                    continue
                try:
                    consts[(i, j, k)] = divide_exact(num, det2)
                except NotDivisibleError:
                    raise NotDivisibleError(
                        f"structure constant c^{i + 1}_{{{j + 1}{k + 1}}} is not polynomial "
                        f"in these coordinates"
                    ) from None
    return Multiplication(n, nv, consts)


# ---------------------------------------------------------------- axioms


def _coord(n: int, i: int, nv: int) -> VectorField:
    return VectorField.coordinate(n, i, nv)


def _vec_residuals(label, v: VectorField):
    return [((*label, a + 1), x) for a, x in enumerate(v) if not x.is_zero()]


def check_commutativity(circ: Multiplication) -> Report:
    # storage only keeps j <= k, so c^i_{jk} - c^i_{kj} vanishes by construction
    res = []
    for i, j, k in product(range(circ.n), repeat=3):
        if j < k:
            r = circ.c(i, j, k) - circ.c(i, k, j)
            if not r.is_zero():
                res.append((("c", i + 1, j + 1, k + 1), r))
    return Report("commutativity", res)


def check_associativity(circ: Multiplication) -> Report:
    n, nv = circ.n, circ.nvars
    res = []
    for i, j, k, l in product(range(n), repeat=4):
        if i > k:  # the expression is antisymmetric under i <-> k
            continue
        r = MultiPoly.zero(nv)
        for a in range(n):
            r = r + circ.c(a, i, j) * circ.c(l, a, k) - circ.c(a, j, k) * circ.c(l, i, a)
        if not r.is_zero():
            res.append((("assoc", i + 1, j + 1, k + 1, l + 1), r))
    return Report("associativity", res)


def check_mult_unity(circ: Multiplication, e: VectorField) -> Report:
    n, nv = circ.n, circ.nvars
    res = []
    for i in range(n):
        for j in range(n):
            r = MultiPoly.zero(nv)
            for a in range(n):
                if not e[a].is_zero():
                    r = r + e[a] * circ.c(i, a, j)
            if i == j:
                r = r - 1
            if not r.is_zero():
                res.append((("e-c", i + 1, j + 1), r))
    return Report("unity", res)


def hertling_manin(circ: Multiplication, xi, eta, zeta, theta) -> VectorField:
    """The nine-term Hertling-Manin expression on four vector fields."""
    m, br = circ.product, commutator
    xe = m(xi, eta)
    zt = m(zeta, theta)
    return (
        br(xe, zt)
        - m(br(xe, zeta), theta)
        - m(zeta, br(xe, theta))
        - m(xi, br(eta, zt))
        + m(m(xi, br(eta, zeta)), theta)
        + m(m(xi, zeta), br(eta, theta))
        - m(eta, br(xi, zt))
        + m(m(eta, br(xi, zeta)), theta)
        + m(m(eta, zeta), br(xi, theta))
    )


def hertling_manin_printed_variant(circ: Multiplication, xi, eta, zeta, theta) -> VectorField:
    """Variant whose second term reads ``[zeta, xi o eta] o theta``; kept to show it is not
    the identity satisfied by F-manifolds."""
    xe = circ.product(xi, eta)
    return hertling_manin(circ, xi, eta, zeta, theta) + circ.product(commutator(xe, zeta), theta) * 2


def check_hertling_manin(circ: Multiplication, variant=hertling_manin) -> Report:
    """The identity is tensorial, so coordinate 4-tuples suffice. It is symmetric in
    ``(xi, eta)`` and in ``(zeta, theta)``, so only ordered pairs are visited."""
    n, nv = circ.n, circ.nvars
    d = [_coord(n, i, nv) for i in range(n)]
    res = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                for l in range(k, n):
                    v = variant(circ, d[i], d[j], d[k], d[l])
                    res += _vec_residuals(("HM", i + 1, j + 1, k + 1, l + 1), v)
    return Report("hertling_manin", res)


def check_euler(circ: Multiplication, E: VectorField) -> Report:
    """``[E, d_i o d_j] - [E, d_i] o d_j - d_i o [E, d_j] = d_i o d_j`` for ``i <= j``."""
    n, nv = circ.n, circ.nvars
    d = [_coord(n, i, nv) for i in range(n)]
    res = []
    for i in range(n):
        for j in range(i, n):
            p = circ.product(d[i], d[j])
            v = (
                commutator(E, p)
                - circ.product(commutator(E, d[i]), d[j])
                - circ.product(d[i], commutator(E, d[j]))
                - p
            )
            res += _vec_residuals(("euler", i + 1, j + 1), v)
    return Report("euler", res)


def fmanifold_subchecks(model: FManifoldModel) -> List[Report]:
    c = model.circ
    return [
        check_commutativity(c),
        check_associativity(c),
        check_mult_unity(c, model.e),
        check_hertling_manin(c),
        check_euler(c, model.E),
    ]


def check_fmanifold_axioms(model: FManifoldModel) -> Report:
    return merge_reports("fmanifold", fmanifold_subchecks(model))


def operator_from_mult(circ: Multiplication, E: VectorField) -> OperatorField:
    """``L^i_j = E^a c^i_{aj}``, i.e. ``L xi = E o xi``."""
    n, nv = circ.n, circ.nvars
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            v = MultiPoly.zero(nv)
            for a in range(n):
                if not E[a].is_zero():
                    v = v + E[a] * circ.c(i, a, j)
            row.append(v)
        rows.append(row)
    return OperatorField(rows, nv)


# ---------------------------------------------------------------- three-dimensional family


def _sgn(sign) -> int:
    if sign in (1, "+"):
        return 1
    if sign in (-1, "-"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def _lift3(p) -> MultiPoly:
    if not isinstance(p, MultiPoly):
        return MultiPoly.const(3, Fraction(p))
    if p.nvars == 3:
        if p.depends_on(0):
            raise ValueError("functional parameters must not depend on x1")
        return p
    if p.nvars == 2:
        return p.embed(3, offset=1)
    raise ValueError("functional parameters need 2 (x2, x3) or 3 (x1, x2, x3) variables")


def _common_order(*ps: MultiPoly) -> Optional[int]:
    orders = [p.order for p in ps if p.order is not None]
    return min(orders) if orders else None


def thm6_h(k: int, sign, f, g) -> MultiPoly:
    """``h = (k / x2) (k f x2^{k-1} -+ g)``; raises if ``x2`` does not divide the bracket."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _sgn(sign)
    f, g = _lift3(f), _lift3(g)
    x2 = MultiPoly.var(3, 1)
    num = (f * x2 ** (k - 1) * k - g * s) * k
    try:
        return divide_exact(num, x2)
    except NotDivisibleError:
        raise NotDivisibleError(
            "x2 does not divide k(k f x2^(k-1) -+ g): h is not polynomial"
        ) from None


def thm6_multiplication(k: int, sign, h, pairing: str = "consistent") -> Multiplication:
    """Structure constants of the three-dimensional family in terms of ``h``.

    ``c^2_22 = c^3_23 = +-k x2^{k-1}``, ``d_3 o d_3 = 0`` and ``e = d_1`` is the unity.
    With ``pairing="consistent"`` the entry ``c^3_22`` is ``-+h``, which is the value
    for which ``E o`` reproduces the operator and the axioms follow from the PDE
    on ``h``; ``pairing="printed"`` uses ``c^3_22 = h`` for both signs.
    """
    s = _sgn(sign)
    h = _lift3(h)
    if pairing == "consistent":
        c322 = h * (-s)
    elif pairing == "printed":
        c322 = h
    else:
        raise ValueError("pairing must be 'consistent' or 'printed'")
    order = h.order
    x2 = MultiPoly.var(3, 1)
    a = x2 ** (k - 1) * (s * k)
    one = MultiPoly.one(3)
    entries = {(1, 1, 1): a, (2, 1, 1): c322, (2, 1, 2): a}
    for i in range(3):
        entries[(i, 0, i)] = one
    if order is not None:
        entries = {key: v.truncate(order) for key, v in entries.items()}
    return Multiplication(3, 3, entries)


def structure_constants_3d(k: int, sign, f, g, pairing: str = "consistent") -> Multiplication:
    """Structure constants determined by the operator data ``(k, sign, f, g)``."""
    return thm6_multiplication(k, sign, thm6_h(k, sign, f, g), pairing)


def g_from_h(k: int, sign, f, h) -> MultiPoly:
    """Inverse relation ``g = -+(x2 h / k - k f x2^{k-1})``."""
    s = _sgn(sign)
    f, h = _lift3(f), _lift3(h)
    x2 = MultiPoly.var(3, 1)
    return (x2 * h / k - f * x2 ** (k - 1) * k) * (-s)


def thm6_euler(k: int, lambda0, f) -> VectorField:
    """``E = (x1 + l0) d_1 + (x2 / k) d_2 + f d_3``."""
    f = _lift3(f)
    x1, x2 = MultiPoly.var(3, 0), MultiPoly.var(3, 1)
    comps = [x1 + Fraction(lambda0), x2 / k, f]
    if f.order is not None:
        comps = [c.truncate(f.order) for c in comps]
    return VectorField(comps, 3)


def thm6_model(k: int, sign, f, h, lambda0=0, pairing: str = "consistent") -> FManifoldModel:
    circ = thm6_multiplication(k, sign, h, pairing)
    return FManifoldModel(circ, VectorField.coordinate(3, 0), thm6_euler(k, lambda0, f))


def _plane(*ps):
    return [_lift3(p) for p in ps]


def thm6_pde_residual(f, h, k: int, sign=None) -> MultiPoly:
    """``(x2/k) h_2 + f h_3 - k x2^{k-1} f_2 - h f_3 - (k-2)/k h``.

    Passing ``sign`` gives the variant matching the printed pairing of the
    structure constants, whose ``f_2`` term carries ``+sign`` instead of ``-1``.
    """
    f, h = _plane(f, h)
    x2 = MultiPoly.var(3, 1)
    coef = -1 if sign is None else _sgn(sign)
    return (
        x2 * h.diff(1) / k
        + f * h.diff(2)
        + f.diff(1) * x2 ** (k - 1) * (coef * k)
        - h * f.diff(2)
        - h * Fraction(k - 2, k)
    )


def check_pde_thm6(f, h, k: int, sign=None) -> Report:
    r = thm6_pde_residual(f, h, k, sign)
    return Report("pde_thm6", [] if r.is_zero() else [(("pde",), r)], f"k={k}")


def check_thm6_equivalence(f, h, fbar, hbar, r, k: int) -> Report:
    """``hbar(x2, r) = k x2^{k-1} r_2 + h r_3`` and ``fbar(x2, r) = (x2/k) r_2 + f r_3``."""
    from .ring import substitute

    f, h, fbar, hbar, r = _plane(f, h, fbar, hbar, r)
    r3 = r.diff(2)
    if _origin(r3) == 0:
        raise DegenerateTransformError("dr/dx3 vanishes at the origin")
    notes = "" if _origin(r) == 0 else "r(0,0) != 0"
    x2 = MultiPoly.var(3, 1)
    rh = substitute(hbar, {2: r}) - (x2 ** (k - 1) * r.diff(1) * k + h * r3)
    rf = substitute(fbar, {2: r}) - (x2 * r.diff(1) / k + f * r3)
    res = [(("h",), rh)] if not rh.is_zero() else []
    if not rf.is_zero():
        res.append((("f",), rf))
    return Report("thm6_equivalence", res, notes)
