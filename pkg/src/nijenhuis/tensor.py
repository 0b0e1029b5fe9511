"""Coordinate tensor calculus on ring-valued fields.

Index conventions follow the usual ones: ``L[i, j]`` is ``L^i_j`` (row ``i``
carries the upper index), vector components are upper-indexed and covector
components lower-indexed. All indices are 0-based in code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, List, Sequence, Tuple

from .ring import MultiPoly, evaluate

__all__ = [
    "OperatorField",
    "VectorField",
    "CovectorField",
    "Torsion12",
    "nijenhuis_torsion",
    "lie_derivative_operator",
    "commutator",
    "char_coefficients",
    "dual_apply",
    "apply_operator",
    "operator_power",
    "differential",
    "directional",
    "gl_regular_at",
    "cyclic_at",
    "ring_det",
    "ring_adjugate",
    "rank_exact",
    "det_exact",
]


def _as_elem(x, nvars: int) -> MultiPoly:
    if isinstance(x, MultiPoly):
        if x.nvars != nvars:
            raise ValueError(f"entry has {x.nvars} variables, expected {nvars}")
        return x
    return MultiPoly.const(nvars, x)


class _Components:
    """Shared behaviour of vector and covector fields."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence, nvars: int = None):
        comps = list(components)
        if nvars is None:
            nvars = next((c.nvars for c in comps if isinstance(c, MultiPoly)), len(comps))
        object.__setattr__(self, "components", tuple(_as_elem(c, nvars) for c in comps))

    def __setattr__(self, name, value):
        raise AttributeError("fields are immutable")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars if self.components else 0

    def __len__(self):
        return len(self.components)

    def __iter__(self) -> Iterator[MultiPoly]:
        return iter(self.components)

    def __getitem__(self, i) -> MultiPoly:
        return self.components[i]

    def _check(self, other):
        if type(other) is not type(self) or other.n != self.n:
            raise ValueError("field shape mismatch")

    def __add__(self, other):
        self._check(other)
        return type(self)([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return type(self)([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return type(self)([-a for a in self])

    def __mul__(self, s):
        return type(self)([a * s for a in self])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.n == other.n and all(a == b for a, b in zip(self, other))

    __hash__ = None

    def __repr__(self):
        inner = ", ".join(str(c) for c in self.components)
        return f"{type(self).__name__}({inner})"


class VectorField(_Components):
    """Components ``xi^i`` of a vector field in the coordinate frame."""

    __slots__ = ()

    def __call__(self, f: MultiPoly) -> MultiPoly:
        return directional(self, f)

    @classmethod
    def coordinate(cls, n: int, i: int, nvars: int = None) -> "VectorField":
        nvars = n if nvars is None else nvars
        return cls([1 if a == i else 0 for a in range(n)], nvars)

    @classmethod
    def zero(cls, n: int, nvars: int = None) -> "VectorField":
        return cls([0] * n, n if nvars is None else nvars)


class CovectorField(_Components):
    """Components ``alpha_i`` of a 1-form in the coordinate coframe."""

    __slots__ = ()


class OperatorField:
    """Square matrix of ring elements; ``L[i, j]`` is ``L^i_j``."""

    __slots__ = ("entries",)

    def __init__(self, rows: Sequence[Sequence], nvars: int = None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("operator matrix must be square")
        if nvars is None:
            nvars = next(
                (x.nvars for r in rows for x in r if isinstance(x, MultiPoly)), n
            )
        object.__setattr__(
            self, "entries", tuple(tuple(_as_elem(x, nvars) for x in r) for r in rows)
        )

    def __setattr__(self, name, value):
        raise AttributeError("fields are immutable")

    @classmethod
    def identity(cls, n: int, nvars: int = None) -> "OperatorField":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                   n if nvars is None else nvars)

    @classmethod
    def zero(cls, n: int, nvars: int = None) -> "OperatorField":
        return cls([[0] * n for _ in range(n)], n if nvars is None else nvars)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def nvars(self) -> int:
        return self.entries[0][0].nvars if self.entries else 0

    def __getitem__(self, ij) -> MultiPoly:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> List[List[MultiPoly]]:
        return [list(r) for r in self.entries]

    def column(self, j: int) -> VectorField:
        return VectorField([r[j] for r in self.entries])

    def _check(self, other):
        if not isinstance(other, OperatorField) or other.n != self.n:
            raise ValueError("operator shape mismatch")

    def __add__(self, other):
        self._check(other)
        return OperatorField(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __sub__(self, other):
        self._check(other)
        return OperatorField(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __neg__(self):
        return OperatorField([[-a for a in r] for r in self.entries])

    def __mul__(self, s):
        if isinstance(s, (OperatorField, VectorField)):
            return self @ s
        return OperatorField([[a * s for a in r] for r in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other):
        n = self.n
        if isinstance(other, VectorField):
            if other.n != n:
                raise ValueError("vector length mismatch")
            return VectorField(
                [sum((self.entries[i][a] * other[a] for a in range(n)), MultiPoly.zero(self.nvars))
                 for i in range(n)]
            )
        self._check(other)
        zero = MultiPoly.zero(self.nvars)
        return OperatorField(
            [[sum((self.entries[i][a] * other.entries[a][j] for a in range(n)), zero)
              for j in range(n)] for i in range(n)]
        )

    def trace(self) -> MultiPoly:
        return sum((self.entries[i][i] for i in range(self.n)), MultiPoly.zero(self.nvars))

    def transpose(self) -> "OperatorField":
        return OperatorField([list(c) for c in zip(*self.entries)])

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def nonzero_entries(self) -> Iterator[Tuple[int, int, MultiPoly]]:
        for i, r in enumerate(self.entries):
            for j, x in enumerate(r):
                if not x.is_zero():
                    yield i, j, x

    def evaluate(self, point) -> List[List[Fraction]]:
        return [[evaluate(x, point) for x in r] for r in self.entries]

    def __eq__(self, other):
        if not isinstance(other, OperatorField):
            return NotImplemented
        return self.n == other.n and all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    __hash__ = None

    def __repr__(self):
        rows = "; ".join(", ".join(str(x) for x in r) for r in self.entries)
        return f"OperatorField([{rows}])"


@dataclass(frozen=True)
class Torsion12:
    """Components ``N^i_{jk}`` of a (1,2)-tensor skew in the lower pair."""

    n: int
    components: Tuple[Tuple[Tuple[MultiPoly, ...], ...], ...]

    def __post_init__(self):
        for i in range(self.n):
            for j in range(self.n):
                for k in range(j, self.n):
                    if not (self.components[i][j][k] + self.components[i][k][j]).is_zero():
                        raise AssertionError(f"torsion not antisymmetric at ({i},{j},{k})")

    def __getitem__(self, ijk) -> MultiPoly:
        i, j, k = ijk
        return self.components[i][j][k]

    def is_zero(self) -> bool:
        return all(x.is_zero() for a in self.components for b in a for x in b)

    def nonzero(self) -> Iterator[Tuple[int, int, int, MultiPoly]]:
        """Nonzero entries with ``j < k`` (the rest follow by antisymmetry)."""
        for i in range(self.n):
            for j in range(self.n):
                for k in range(j + 1, self.n):
                    x = self.components[i][j][k]
                    if not x.is_zero():
                        yield i, j, k, x


def _sum(items, nvars):
    total = MultiPoly.zero(nvars)
    for x in items:
        total = total + x
    return total


def _grad(L: OperatorField):
    """``dL[a][i][j] = d_a L^i_j``."""
    return [[[x.diff(a) for x in r] for r in L.entries] for a in range(L.nvars)]


def nijenhuis_torsion(L: OperatorField) -> Torsion12:
    n, nv = L.n, L.nvars
    if nv != n:
        raise ValueError("torsion needs one coordinate per dimension")
    d = _grad(L)
    zero = MultiPoly.zero(nv)
    comps = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                v = _sum((L[a, j] * d[a][i][k] - L[a, k] * d[a][i][j] for a in range(n)), nv)
                v = v - _sum((L[i, a] * (d[j][a][k] - d[k][a][j]) for a in range(n)), nv)
                comps[i][j][k] = v
                comps[i][k][j] = -v
    return Torsion12(n, tuple(tuple(tuple(r) for r in m) for m in comps))


def directional(xi: VectorField, f: MultiPoly) -> MultiPoly:
    """``xi(f) = xi^a d_a f``."""
    return _sum((xi[a] * f.diff(a) for a in range(xi.n) if not xi[a].is_zero()), f.nvars)


def commutator(xi: VectorField, eta: VectorField) -> VectorField:
    if xi.n != eta.n:
        raise ValueError("vector length mismatch")
    return VectorField([directional(xi, eta[i]) - directional(eta, xi[i]) for i in range(xi.n)])


def lie_derivative_operator(e: VectorField, L: OperatorField) -> OperatorField:
    """``(L_e L)^i_j = e^a d_a L^i_j - (d_a e^i) L^a_j + L^i_a d_j e^a``."""
    n, nv = L.n, L.nvars
    de = [[e[i].diff(a) for a in range(n)] for i in range(n)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            v = directional(e, L[i, j])
            v = v - _sum((de[i][a] * L[a, j] for a in range(n)), nv)
            v = v + _sum((L[i, a] * de[a][j] for a in range(n)), nv)
            row.append(v)
        rows.append(row)
    return OperatorField(rows, nv)


def apply_operator(L: OperatorField, xi: VectorField) -> VectorField:
    return L @ xi


def operator_power(L: OperatorField, m: int) -> OperatorField:
    if m < 0:
        raise ValueError("power must be non-negative")
    result = OperatorField.identity(L.n, L.nvars)
    for _ in range(m):
        result = result @ L
    return result


def differential(f: MultiPoly) -> CovectorField:
    return CovectorField([f.diff(a) for a in range(f.nvars)])


def dual_apply(L: OperatorField, alpha: CovectorField) -> CovectorField:
    """``(L* alpha)_j = L^i_j alpha_i``."""
    n = L.n
    return CovectorField([_sum((L[i, j] * alpha[i] for i in range(n)), L.nvars) for j in range(n)])


def char_coefficients(L: OperatorField) -> List[MultiPoly]:
    """``[sigma_1, ..., sigma_n]`` of ``det(t Id - L) = t^n + sigma_1 t^{n-1} + ...``.

    Faddeev-LeVerrier: ``M_k = L M_{k-1} + c_{n-k+1} Id`` and
    ``c_{n-k} = -tr(L M_k) / k``; only integer divisions occur.
    """
    n, nv = L.n, L.nvars
    ident = OperatorField.identity(n, nv)
    M = OperatorField.zero(n, nv)
    c_prev = MultiPoly.one(nv)
    sigmas = []
    for k in range(1, n + 1):
        M = L @ M + ident * c_prev
        c_prev = -(L @ M).trace() / k
        sigmas.append(c_prev)
    return sigmas


def ring_det(rows: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Division-free determinant by Laplace expansion with memoised minors."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    nv = rows[0][0].nvars
    # minors[mask] = det of rows[n-|mask|:] restricted to the columns in mask
    minors = {0: MultiPoly.one(nv)}
    for size in range(1, n + 1):
        r = n - size
        nxt = {}
        for mask, sub in minors.items():
            for c in range(n):
                if mask >> c & 1:
                    continue
                new = mask | (1 << c)
                # sign from the number of chosen columns left of c
                sign = -1 if bin(new & ((1 << c) - 1)).count("1") % 2 else 1
                term = rows[r][c] * sub
                if sign < 0:
                    term = -term
                nxt[new] = nxt.get(new, MultiPoly.zero(nv)) + term
        minors = nxt
    return minors[(1 << n) - 1]


def ring_adjugate(rows: Sequence[Sequence[MultiPoly]]) -> List[List[MultiPoly]]:
    """``adj[a][j]`` with ``M @ adj = det(M) Id``."""
    n = len(rows)
    nv = rows[0][0].nvars
    if n == 1:
        return [[MultiPoly.one(nv)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = ring_det(minor)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


def _bareiss(mat: List[List[Fraction]]) -> Tuple[int, Fraction]:
    """Fraction-free elimination; returns ``(rank, determinant-or-0)``."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    # scale each row to integers so every Bareiss division is exact
    m, scale = [], Fraction(1)
    for r in mat:
        r = [Fraction(x) for x in r]
        den = lcm(*(x.denominator for x in r)) if r else 1
        m.append([int(x * den) for x in r])
        scale /= den
    rank, prev, sign = 0, 1, 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c]), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            sign = -sign
        for r in range(rank + 1, rows):
            for k in range(c + 1, cols):
                m[r][k] = (m[r][k] * m[rank][c] - m[r][c] * m[rank][k]) // prev
            m[r][c] = 0
        prev = m[rank][c]
        rank += 1
        if rank == rows:
            break
    det = Fraction(0)
    if rows == cols and rank == rows:
        det = sign * prev * scale
    return rank, det


def rank_exact(mat: Sequence[Sequence]) -> int:
    if not mat:
        return 0
    return _bareiss([list(r) for r in mat])[0]


def det_exact(mat: Sequence[Sequence]) -> Fraction:
    if len(mat) != len(mat[0]):
        raise ValueError("determinant of a non-square matrix")
    return _bareiss([list(r) for r in mat])[1]


def gl_regular_at(L: OperatorField, point) -> bool:
    """Whether ``Id, L, ..., L^{n-1}`` are linearly independent at ``point``."""
    n = L.n
    Lp = [[Fraction(x) for x in r] for r in L.evaluate(point)]
    powers = []
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(n):
        powers.append([x for r in P for x in r])
        P = [[sum(P[i][a] * Lp[a][j] for a in range(n)) for j in range(n)] for i in range(n)]
    # rows are the flattened powers; rank is transpose-invariant
    return rank_exact(powers) == n


def cyclic_at(xi: VectorField, L: OperatorField, point) -> bool:
    """Whether ``xi, L xi, ..., L^{n-1} xi`` are linearly independent at ``point``."""
    n = L.n
    Lp = L.evaluate(point)
    v = [evaluate(c, point) for c in xi]
    cols = []
    for _ in range(n):
        cols.append(v)
        v = [sum(Lp[i][a] * v[a] for a in range(n)) for i in range(n)]
    return det_exact(cols) != 0
