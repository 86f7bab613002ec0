from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qdomain import FiniteQOrder, TNorm
from qdomain.approach import ApproachTable, check_approach_axioms
from qdomain.order import check_q_order

GRID = 8


@st.composite
def tnorms(draw, allow_product=True):
    """Ordinal sums with piece bounds on the 1/8 grid."""
    cuts = sorted(draw(st.sets(st.integers(0, GRID), max_size=6)))
    kinds = ["lukasiewicz", "product"] if allow_product else ["lukasiewicz"]
    pieces = []
    for lo, hi in zip(cuts[::2], cuts[1::2]):
        if hi > lo and draw(st.booleans()):
            pieces.append((Fraction(lo, GRID), Fraction(hi, GRID), draw(st.sampled_from(kinds))))
    return TNorm(tuple((float(a), float(b), k) for a, b, k in pieces))


grid_values = st.integers(0, 4 * GRID).map(lambda i: Fraction(i, 4 * GRID))


@settings(max_examples=150, deadline=None)
@given(tnorms(allow_product=False), grid_values, grid_values, grid_values)
def test_adjunction_exact(t, x, y, z):
    assert (t.conj(x, z) <= y) == (z <= t.residuum(x, y))


@settings(max_examples=150, deadline=None)
@given(tnorms(allow_product=False), grid_values, grid_values, grid_values)
def test_associative_commutative_exact(t, x, y, z):
    assert t.conj(x, y) == t.conj(y, x)
    assert t.conj(t.conj(x, y), z) == t.conj(x, t.conj(y, z))
    assert t.conj(x, 1) == x


@settings(max_examples=150, deadline=None)
@given(tnorms(), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_monotone_float(t, x, y, z):
    lo, hi = min(y, z), max(y, z)
    assert t.conj(x, lo) <= t.conj(x, hi) + 1e-12
    assert t.residuum(x, lo) <= t.residuum(x, hi) + 1e-12
    assert t.residuum(hi, x) <= t.residuum(lo, x) + 1e-12


def closure_under(t, alpha):
    """Smallest [0,1]-order above ``alpha``: iterate max-& composition."""
    A = np.maximum(alpha, np.eye(len(alpha)))
    while True:
        B = np.maximum(A, t.compose(A, A))
        if np.array_equal(A, B):
            return A
        A = B


@settings(max_examples=60, deadline=None)
@given(tnorms(), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_transitive_closure_is_order(t, n, seed):
    alpha = np.random.default_rng(seed).integers(0, 5, (n, n)) / 4
    A = closure_under(t, alpha)
    assert check_q_order(A, t).valid
    T = ApproachTable.gamma(FiniteQOrder(t, A))
    assert check_approach_axioms(T).valid
