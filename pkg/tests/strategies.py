"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from nijenhuis.ring import MultiPoly
from nijenhuis.tensor import OperatorField


def fractions(max_num=6, max_den=4):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


def polys(nvars=2, max_deg=3, max_terms=4):
    exps = st.tuples(*[st.integers(0, max_deg) for _ in range(nvars)])
    return st.dictionaries(exps, fractions(), max_size=max_terms).map(
        lambda d: MultiPoly(nvars, d)
    )


def series(nvars=2, order=4, max_deg=5, max_terms=5):
    return polys(nvars, max_deg, max_terms).map(lambda p: p.truncate(order))


def operators(n, nvars=None, max_deg=2, max_terms=2):
    nvars = n if nvars is None else nvars
    entry = polys(nvars, max_deg, max_terms)
    return st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: OperatorField(rows, nvars)
    )
