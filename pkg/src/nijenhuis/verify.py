"""Identity checkers. Each returns a :class:`Report` carrying the exact
nonzero residuals; a report passes iff it has no residuals.

Residual index paths start with a label and use 1-based coordinate indices,
e.g. ``("N", 1, 1, 2)`` is the torsion component ``N^1_{12}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .ring import MultiPoly, evaluate, substitute
from .tensor import (
    OperatorField,
    VectorField,
    char_coefficients,
    differential,
    dual_apply,
    lie_derivative_operator,
    nijenhuis_torsion,
)

Residual = Tuple[Tuple[Any, ...], MultiPoly]


class DegenerateTransformError(ValueError):
    """A coordinate change whose Jacobian entry vanishes at the origin."""


@dataclass
class Report:
    check: str
    residuals: List[Residual] = field(default_factory=list)
    notes: str = ""
    variables: Optional[List[str]] = None
    series_order: Optional[int] = None

    @property
    def verdict(self) -> str:
        return "pass" if not self.residuals else "fail"

    @property
    def passed(self) -> bool:
        return not self.residuals

    def __bool__(self):
        return self.passed

    def residual_map(self) -> Dict[Tuple[Any, ...], MultiPoly]:
        return dict(self.residuals)

    def _names(self):
        if self.variables is not None:
            return self.variables
        nv = self.residuals[0][1].nvars if self.residuals else 0
        return [f"x{i + 1}" for i in range(nv)]

    def to_dict(self) -> Dict[str, Any]:
        from .parser import format_elem

        names = self._names()
        order = self.series_order
        if order is None:
            order = next((v.order for _, v in self.residuals if v.order is not None), None)
        return {
            "check": self.check,
            "verdict": self.verdict,
            "residuals": [
                {"index": list(path), "value": format_elem(v.to_poly(), names)}
                for path, v in self.residuals
            ],
            "notes": self.notes,
            "variables": list(names),
            "series_order": order,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Report":
        from .parser import parse_expression

        names = d.get("variables") or []
        order = d.get("series_order")
        residuals = [
            (tuple(r["index"]), parse_expression(r["value"], names, order))
            for r in d.get("residuals", [])
        ]
        rep = cls(d["check"], residuals, d.get("notes", ""), list(names), order)
        if rep.verdict != d.get("verdict", rep.verdict):
            raise ValueError("verdict field disagrees with residuals")
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        from .parser import format_elem

        names = self._names()
        head = f"{'PASS' if self.passed else 'FAIL'} {self.check}"
        lines = [head + (f"  ({self.notes})" if self.notes else "")]
        for path, v in self.residuals:
            label = ",".join(str(p) for p in path)
            lines.append(f"    [{label}] {format_elem(v.to_poly(), names)}")
        return "\n".join(lines)


def merge_reports(check: str, parts: Sequence[Report], notes: str = "") -> Report:
    residuals = []
    for rep in parts:
        residuals.extend(((rep.check,) + tuple(p), v) for p, v in rep.residuals)
    summary = ", ".join(f"{r.check}={r.verdict}" for r in parts)
    notes = f"{notes}; {summary}" if notes else summary
    return Report(check, residuals, notes)


# ---------------------------------------------------------------- operator checks


def check_nijenhuis(L: OperatorField) -> Report:
    N = nijenhuis_torsion(L)
    res = [(("N", i + 1, j + 1, k + 1), v) for i, j, k, v in N.nonzero()]
    return Report("nijenhuis", res)


def check_unity(L: OperatorField, e: VectorField) -> Report:
    R = lie_derivative_operator(e, L) - OperatorField.identity(L.n, L.nvars)
    res = [(("LeL-Id", i + 1, j + 1), v) for i, j, v in R.nonzero_entries()]
    return Report("unity", res)


def check_trace_and_sigma(L: OperatorField, e: VectorField) -> Report:
    """``e(tr L) = n`` and ``e(sigma_k) = -(n-k+1) sigma_{k-1}`` with ``sigma_0 = 1``."""
    n = L.n
    res = []
    tr = e(L.trace()) - n
    if not tr.is_zero():
        res.append((("trace",), tr))
    sig = [MultiPoly.one(L.nvars)] + char_coefficients(L)
    for k in range(1, n + 1):
        r = e(sig[k]) + sig[k - 1] * (n - k + 1)
        if not r.is_zero():
            res.append((("sigma", k), r))
    return Report("sigma", res)


def check_eigen_invariant(L: OperatorField, lam: MultiPoly) -> Report:
    """``(L - lam Id)^* d lam = 0``."""
    shifted = L - OperatorField.identity(L.n, L.nvars) * lam
    form = dual_apply(shifted, differential(lam))
    res = [(("component", j + 1), v) for j, v in enumerate(form) if not v.is_zero()]
    return Report("eigen", res)


def check_2d_criterion(L: OperatorField) -> Report:
    """``L^* d(det L) = det L * d(tr L)``, equivalent to vanishing torsion when n = 2
    and ``det L`` is not identically zero. For ``det L = 0`` both sides vanish and
    the identity says nothing; the report notes this."""
    if L.n != 2:
        raise ValueError("the 2D criterion needs a 2x2 operator")
    det = L[0, 0] * L[1, 1] - L[0, 1] * L[1, 0]
    lhs = dual_apply(L, differential(det))
    rhs = differential(L.trace()) * det
    diff = lhs - rhs
    res = [(("component", j + 1), v) for j, v in enumerate(diff) if not v.is_zero()]
    notes = "det L vanishes identically; the criterion is vacuous" if det.is_zero() else ""
    return Report("criterion2d", res, notes)


def _restrict(p: MultiPoly, block: Sequence[int]) -> MultiPoly:
    terms = {tuple(e[v] for v in block): c for e, c in p.terms.items()}
    out = MultiPoly(len(block), terms)
    return out if p.order is None else out.truncate(p.order)


def check_split(L: OperatorField, e: VectorField, partition: Sequence[int]) -> Report:
    """Block-diagonal splitting with each block depending on its own
    coordinates only and each block pair a Nijenhuis operator with unity."""
    if len(partition) != 2 or any(m < 1 for m in partition) or sum(partition) != L.n:
        raise ValueError(f"bad partition {list(partition)} for n={L.n}")
    m1 = partition[0]
    blocks = [list(range(m1)), list(range(m1, L.n))]
    which = [0] * m1 + [1] * (L.n - m1)
    res: List[Residual] = []
    for i in range(L.n):
        for j in range(L.n):
            x = L[i, j]
            if which[i] != which[j]:
                if not x.is_zero():
                    res.append((("offdiag", i + 1, j + 1), x))
                continue
            for v in range(L.n):
                if which[v] != which[i]:
                    dx = x.diff(v)
                    if not dx.is_zero():
                        res.append((("L-depends", i + 1, j + 1, v + 1), dx))
    for i in range(L.n):
        for v in range(L.n):
            if which[v] != which[i]:
                de = e[i].diff(v)
                if not de.is_zero():
                    res.append((("e-depends", i + 1, v + 1), de))
    if res:
        return Report("split", res, "block structure violated; block checks skipped")
    for b, block in enumerate(blocks, start=1):
        Lb = OperatorField([[_restrict(L[i, j], block) for j in block] for i in block], len(block))
        eb = VectorField([_restrict(e[i], block) for i in block], len(block))
        for sub in (check_nijenhuis(Lb), check_unity(Lb, eb)):
            for path, v in sub.residuals:
                res.append(((f"block{b}", sub.check) + path, v))
    return Report("split", res)


# ---------------------------------------------------------------- 2D / 3D semi-normal forms


def _plane_indices(*elems: MultiPoly) -> Tuple[int, int]:
    """Indices of the coordinates playing the roles of x^2 and x^3."""
    nv = elems[0].nvars
    if any(p.nvars != nv for p in elems):
        raise ValueError("functional parameters live in different rings")
    if nv == 2:
        return 0, 1
    if nv == 3:
        if any(p.depends_on(0) for p in elems):
            raise ValueError("functional parameters must not depend on x1")
        return 1, 2
    raise ValueError("functional parameters need 2 (x2, x3) or 3 (x1, x2, x3) variables")


def thm4_pde_residual(f: MultiPoly, g: MultiPoly, k: int) -> MultiPoly:
    """``(x2/k) g_2 + f g_3 - g f_3 - (k-1)/k g``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    a, b = _plane_indices(f, g)
    x2 = MultiPoly.var(f.nvars, a)
    k = Fraction(k)
    return x2 * g.diff(a) / k + f * g.diff(b) - g * f.diff(b) - g * ((k - 1) / k)


def check_pde_thm4(f: MultiPoly, g: MultiPoly, k: int) -> Report:
    r = thm4_pde_residual(f, g, k)
    return Report("pde_thm4", [] if r.is_zero() else [(("pde",), r)], f"k={k}")


def _origin(p: MultiPoly) -> Fraction:
    return evaluate(p, [0] * p.nvars)


def check_equiv_2d(f: MultiPoly, fbar: MultiPoly, h: MultiPoly) -> Report:
    """``fbar(x, h(x, y)) = h_y(x, y) f(x, y)`` with ``h_y(0, 0) != 0``."""
    hy = h.diff(1)
    if _origin(hy) == 0:
        raise DegenerateTransformError("dh/dy vanishes at the origin")
    notes = "" if _origin(h) == 0 else "h(0,0) != 0"
    r = substitute(fbar, {1: h}) - hy * f
    return Report("equiv_2d", [] if r.is_zero() else [(("f",), r)], notes)


def check_transform_3d(f, g, fbar, gbar, h, k: int) -> Report:
    """Transformation of ``(f, g)`` under ``x3 -> h(x2, x3)``:
    ``gbar(x2, h) = g h_3`` and ``fbar(x2, h) = (x2/k) h_2 + f h_3``."""
    a, b = _plane_indices(f, g, fbar, gbar, h)
    h3 = h.diff(b)
    if _origin(h3) == 0:
        raise DegenerateTransformError("dh/dx3 vanishes at the origin")
    notes = "" if _origin(h) == 0 else "h(0,0) != 0"
    x2 = MultiPoly.var(f.nvars, a)
    rg = substitute(gbar, {b: h}) - g * h3
    rf = substitute(fbar, {b: h}) - (x2 * h.diff(a) / k + f * h3)
    res = [(("g",), rg)] if not rg.is_zero() else []
    if not rf.is_zero():
        res.append((("f",), rf))
    return Report("transform_3d", res, notes)


def depressed_cubic(sigmas: Sequence[MultiPoly]) -> Tuple[MultiPoly, MultiPoly]:
    """``(p, q)`` with ``t^3 + s1 t^2 + s2 t + s3 = s^3 + p s + q`` under ``t = s - s1/3``."""
    if len(sigmas) != 3:
        raise ValueError("need exactly three characteristic coefficients")
    s1, s2, s3 = sigmas
    p = s2 - s1 * s1 / 3
    q = s1 * s1 * s1 * Fraction(2, 27) - s1 * s2 / 3 + s3
    return p, q


def cubic_discriminant(sigmas: Sequence[MultiPoly]) -> MultiPoly:
    """``-4 p^3 - 27 q^2`` of the depressed cubic; translation invariant, so it
    is also the discriminant of the original cubic."""
    p, q = depressed_cubic(sigmas)
    return p * p * p * (-4) - q * q * 27
