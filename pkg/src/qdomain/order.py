"""Finite [0,1]-ordered sets stored as value tables.

``alpha[x, y]`` is ``X(x, y)``: row is the source, column the target.  Tables
are float64 by default; an object array of :class:`~fractions.Fraction` gives
exact arithmetic (tolerance 0) for Goedel and Lukasiewicz data.

Elements are addressed by index everywhere; labels are kept for reports.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .tnorm import EPS, TNorm


class InputError(ValueError):
    """Malformed structure data (non-square table, unknown element, ...)."""


def _as_table(alpha):
    arr = np.asarray(alpha)
    if arr.dtype != object:
        arr = arr.astype(np.float64)
    return arr


def is_exact(arr):
    return isinstance(arr, np.ndarray) and arr.dtype == object


def tolerance(arr, eps=EPS):
    return 0 if is_exact(arr) else eps


class FiniteQOrder:
    """A finite [0,1]-ordered set ``(X, alpha)`` over a continuous t-norm."""

    def __init__(self, tnorm, alpha, elements=None):
        alpha = _as_table(alpha)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
            raise InputError(f"alpha must be a square table, got shape {alpha.shape}")
        if alpha.size and (alpha.min() < 0 or alpha.max() > 1):
            raise InputError("alpha entries must lie in [0, 1]")
        n = alpha.shape[0]
        if elements is None:
            elements = [str(i) for i in range(n)]
        elements = [str(e) for e in elements]
        if len(elements) != n:
            raise InputError(f"{len(elements)} labels for a {n}x{n} table")
        if len(set(elements)) != n:
            raise InputError("element labels must be distinct")
        self.tnorm = tnorm
        self.alpha = alpha
        self.alpha.flags.writeable = False
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}

    # -- construction -------------------------------------------------------

    @classmethod
    def omega(cls, tnorm, leq, elements=None):
        """The crisp [0,1]-order of a classical preorder ``leq`` (bool matrix)."""
        leq = np.asarray(leq, dtype=bool)
        return cls(tnorm, leq.astype(np.float64), elements)

    @classmethod
    def discrete(cls, tnorm, n, elements=None):
        return cls(tnorm, np.eye(n), elements)

    @classmethod
    def chain(cls, tnorm, n, elements=None):
        """The crisp chain ``0 < 1 < ... < n-1``."""
        idx = np.arange(n)
        return cls.omega(tnorm, idx[:, None] <= idx[None, :], elements)

    @classmethod
    def from_dict(cls, data):
        try:
            tnorm = TNorm.from_dict(data["tnorm"])
            alpha = data["alpha"]
        except KeyError as exc:
            raise InputError(f"structure file is missing the {exc.args[0]!r} field") from None
        return cls(tnorm, alpha, data.get("elements"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "tnorm": self.tnorm.to_dict(),
            "elements": list(self.elements),
            "alpha": [[float(v) for v in row] for row in self.alpha],
        }

    def exact(self):
        """Copy with Fraction entries (decimal-exact conversion of floats)."""
        conv = np.vectorize(lambda v: Fraction(repr(float(v))) if not isinstance(v, Fraction) else v,
                            otypes=[object])
        return FiniteQOrder(self.tnorm, conv(self.alpha), self.elements)

    # -- basic access -------------------------------------------------------

    def __len__(self):
        return self.alpha.shape[0]

    def __repr__(self):
        return f"FiniteQOrder(n={len(self)}, tnorm={self.tnorm})"

    @property
    def eps(self):
        return tolerance(self.alpha)

    @property
    def one(self):
        return Fraction(1) if is_exact(self.alpha) else 1.0

    @property
    def zero(self):
        return Fraction(0) if is_exact(self.alpha) else 0.0

    def index(self, x):
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            if not 0 <= x < len(self):
                raise InputError(f"element index {x} out of range")
            return int(x)
        try:
            return self._index[str(x)]
        except KeyError:
            raise InputError(f"unknown element {x!r}") from None

    def hom(self, x, y):
        return self.alpha[self.index(x), self.index(y)]

    def opposite(self):
        return FiniteQOrder(self.tnorm, self.alpha.T.copy(), self.elements)

    def underlying_order(self):
        """Boolean matrix ``leq[x, y]`` iff ``X(x, y) = 1``."""
        return self.alpha >= self.one - self.eps

    def is_separated(self):
        leq = self.underlying_order()
        iso = leq & leq.T
        return not (iso & ~np.eye(len(self), dtype=bool)).any()

    def subset(self, indices):
        idx = [self.index(i) for i in indices]
        return FiniteQOrder(self.tnorm, self.alpha[np.ix_(idx, idx)].copy(),
                            [self.elements[i] for i in idx])

    # -- weights ------------------------------------------------------------

    def yoneda(self, x):
        return Weight(self, self.alpha[:, self.index(x)].copy(), validate=False)

    def weight(self, values, validate=True):
        return Weight(self, values, validate=validate)

    def weight_violation(self, values):
        """``max_{x,y} phi(y) & X(x,y) - phi(x)``, clipped at 0."""
        v = _as_table(values)
        lhs = self.tnorm.conj_array(v[None, :], self.alpha)
        gap = lhs - v[:, None]
        worst = gap.max() if gap.size else 0
        return max(worst, self.zero)


@dataclass
class Weight:
    """A lower fuzzy set: ``phi(y) & X(x, y) <= phi(x)``."""

    over: FiniteQOrder
    values: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.values = _as_table(self.values)
        if self.values.shape != (len(self.over),):
            raise InputError(f"weight needs {len(self.over)} values, got shape {self.values.shape}")
        if self.validate:
            if self.values.size and (self.values.min() < 0 or self.values.max() > 1):
                raise InputError("weight values must lie in [0, 1]")
            gap = self.over.weight_violation(self.values)
            if gap > self.over.eps:
                raise InputError(f"not a weight: lower-set condition fails by {float(gap):.3g}")

    def __getitem__(self, i):
        return self.values[i]


def _values(phi):
    return phi.values if isinstance(phi, Weight) else _as_table(phi)


def _carrier_check(phi, psi):
    if isinstance(phi, Weight) and isinstance(psi, Weight) and phi.over is not psi.over:
        if len(phi.over) != len(psi.over):
            raise InputError("weights live on different carriers")
    a, b = _values(phi), _values(psi)
    if a.shape != b.shape:
        raise InputError(f"weights have different lengths {a.shape} and {b.shape}")
    return a, b


def _tnorm_of(*objs):
    for o in objs:
        if isinstance(o, Weight):
            return o.over.tnorm
    raise InputError("a t-norm is required when no argument is a Weight")


def sub(phi, psi, tnorm=None):
    """Fuzzy inclusion ``min_x phi(x) -> psi(x)``."""
    a, b = _carrier_check(phi, psi)
    t = tnorm or _tnorm_of(phi, psi)
    if a.size == 0:
        return Fraction(1) if is_exact(a) else 1.0
    return t.residuum_array(a, b).min()


def yoneda(X, x):
    return X.yoneda(x)


def inclusion_to_representables(X, phi):
    """``s[y] = sub(phi, X(-, y))`` for every ``y``."""
    v = _values(phi)
    return X.tnorm.inclusion_matrix(v[None, :], X.alpha.T)[0]


def suprema(X, phi, eps=None):
    """All ``a`` with ``X(a, y) = sub(phi, X(-, y))`` for every ``y``."""
    eps = X.eps if eps is None else eps
    target = inclusion_to_representables(X, phi)
    gap = np.abs(X.alpha - target[None, :])
    return [int(a) for a in np.flatnonzero((gap <= eps).all(axis=1))]


def supremum_of_weight(X, phi, eps=None):
    """Index of a supremum of ``phi`` (first one found), or None."""
    found = suprema(X, phi, eps)
    return found[0] if found else None


def infima(X, phi, eps=None):
    """Suprema in the opposite order, i.e. infima of a co-weight."""
    return suprema(X.opposite(), phi, eps)


def cotensor(X, p, y, eps=None):
    """Index of ``p >-> y`` with ``X(x, c) = p -> X(x, y)``, or None."""
    eps = X.eps if eps is None else eps
    yi = X.index(y)
    target = X.tnorm.residuum_array(np.full(len(X), p, dtype=X.alpha.dtype), X.alpha[:, yi])
    gap = np.abs(X.alpha - target[:, None])
    hits = np.flatnonzero((gap <= eps).all(axis=0))
    return int(hits[0]) if hits.size else None


def tensor(X, p, y, eps=None):
    """Index of ``p (x) y`` with ``X(c, x) = p -> X(y, x)``, or None."""
    return cotensor(X.opposite(), p, y, eps)


def product(Xs, tnorm=None):
    """Cartesian product with the componentwise-meet table."""
    Xs = list(Xs)
    if not Xs:
        if tnorm is None:
            raise InputError("empty product needs an explicit t-norm")
        return FiniteQOrder(tnorm, np.ones((1, 1)), ["()"])
    t = Xs[0].tnorm
    for X in Xs[1:]:
        if X.tnorm != t:
            raise InputError("product factors must share a t-norm")
    if len(Xs) == 1:
        return FiniteQOrder(t, Xs[0].alpha.copy(), Xs[0].elements)
    shape = [len(X) for X in Xs]
    tuples = list(itertools.product(*(range(s) for s in shape)))
    idx = np.array(tuples, dtype=np.intp)
    alpha = None
    for k, X in enumerate(Xs):
        block = X.alpha[np.ix_(idx[:, k], idx[:, k])]
        alpha = block if alpha is None else np.minimum(alpha, block)
    labels = ["(" + ",".join(X.elements[i] for X, i in zip(Xs, tup)) + ")" for tup in tuples]
    return FiniteQOrder(t, alpha, labels)


def power(X, k):
    return product([X] * k)


@dataclass
class OrderReport:
    valid: bool
    reflexivity_violations: list
    transitivity_violation: float
    transitivity_witness: tuple | None
    separated: bool
    underlying_order: list

    def to_dict(self, labels=None):
        def name(i):
            return labels[i] if labels else i
        return {
            "valid": self.valid,
            "reflexivity_violations": [name(i) for i in self.reflexivity_violations],
            "transitivity_violation": float(self.transitivity_violation),
            "transitivity_witness": None if self.transitivity_witness is None
            else [name(i) for i in self.transitivity_witness],
            "separated": self.separated,
            "underlying_order": self.underlying_order,
        }


def check_q_order(alpha, tnorm, eps=EPS):
    """Reflexivity, transitivity (with witness), separation, underlying order."""
    if isinstance(alpha, FiniteQOrder):
        alpha = alpha.alpha
    table = _as_table(alpha)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InputError(f"alpha must be a square table, got shape {table.shape}")
    eps = tolerance(table, eps)
    n = table.shape[0]
    diag = np.diagonal(table)
    refl = [int(i) for i in np.flatnonzero(diag < 1 - eps)]
    # gap[x, y, z] = alpha(y, z) & alpha(x, y) - alpha(x, z)
    gap = tnorm.conj_array(table[None, :, :], table[:, :, None]) - table[:, None, :]
    worst, witness = 0.0, None
    if n:
        flat = int(np.argmax(gap))
        g = gap.flat[flat]
        if g > eps:
            worst, witness = g, tuple(int(i) for i in np.unravel_index(flat, gap.shape))
    leq = table >= 1 - eps
    separated = not ((leq & leq.T) & ~np.eye(n, dtype=bool)).any()
    pairs = [[int(x), int(y)] for x, y in zip(*np.nonzero(leq))]
    return OrderReport(not refl and witness is None, refl, worst, witness, separated, pairs)


# -- maps -----------------------------------------------------------------


@dataclass
class QMap:
    source: FiniteQOrder
    target: FiniteQOrder
    assignment: tuple

    def __post_init__(self):
        self.assignment = tuple(self.target.index(v) for v in self.assignment)
        if len(self.assignment) != len(self.source):
            raise InputError("map must assign a target to every source element")

    def __call__(self, x):
        return self.assignment[self.source.index(x)]

    def pulled_back_table(self):
        """``Y(f(x), f(y))`` as a table over the source."""
        a = np.array(self.assignment, dtype=np.intp)
        return self.target.alpha[np.ix_(a, a)]

    def order_violation(self):
        """Largest ``X(x,y) - Y(f x, f y)`` and its witness pair."""
        gap = self.source.alpha - self.pulled_back_table()
        if gap.size == 0:
            return 0.0, None
        flat = int(np.argmax(gap))
        if gap.flat[flat] <= self.source.eps:
            return 0.0, None
        return gap.flat[flat], tuple(int(i) for i in np.unravel_index(flat, gap.shape))

    def preserves_order(self):
        return self.order_violation()[1] is None

    def image(self, phi):
        """``f->(phi)(y) = max_x phi(x) & Y(y, f(x))``."""
        v = _values(phi)
        cols = self.target.alpha[:, list(self.assignment)]
        if not len(self.assignment):
            return np.zeros(len(self.target), dtype=self.target.alpha.dtype)
        return self.target.tnorm.conj_array(v[None, :], cols).max(axis=1)

    def preimage(self, psi):
        """``f<-(psi)(x) = psi(f(x))``."""
        return _values(psi)[list(self.assignment)]


@dataclass
class AdjunctionReport:
    adjoint: bool
    witness: tuple | None
    f_preserves: bool
    g_preserves: bool
    underlying_adjoint: bool
    characterization: bool

    @property
    def criteria_agree(self):
        return self.adjoint == self.characterization

    def to_dict(self):
        return {
            "adjoint": self.adjoint,
            "witness": list(self.witness) if self.witness else None,
            "f_preserves_order": self.f_preserves,
            "g_preserves_order": self.g_preserves,
            "underlying_adjoint": self.underlying_adjoint,
            "characterization": self.characterization,
            "criteria_agree": self.criteria_agree,
        }


def check_adjunction(f, g, eps=None):
    """Decide ``f -| g`` from the hom equation and from the two-condition test."""
    X, Y = f.source, f.target
    if g.source is not Y and len(g.source) != len(Y):
        raise InputError("g must go from the target of f")
    if g.target is not X and len(g.target) != len(X):
        raise InputError("g must land in the source of f")
    eps = X.eps if eps is None else eps
    fa = np.array(f.assignment, dtype=np.intp)
    ga = np.array(g.assignment, dtype=np.intp)
    left = Y.alpha[fa, :]           # Y(f x, y)
    right = X.alpha[:, ga]          # X(x, g y)
    gap = np.abs(left - right)
    witness = None
    if gap.size and gap.max() > eps:
        witness = tuple(int(i) for i in np.unravel_index(int(np.argmax(gap)), gap.shape))
    leq_x, leq_y = X.underlying_order(), Y.underlying_order()
    under = bool((leq_y[fa, :] == leq_x[:, ga]).all())
    fp, gp = f.preserves_order(), g.preserves_order()
    return AdjunctionReport(witness is None, witness, fp, gp, under, fp and gp and under)


# -- lattice structure of finite snapshots --------------------------------


def _least(leq, candidates):
    """The least element (up to isomorphism) of ``candidates`` under ``leq``, or None."""
    cand = np.flatnonzero(candidates)
    if cand.size == 0:
        return None
    sub_leq = leq[np.ix_(cand, cand)]
    rows = np.flatnonzero(sub_leq.all(axis=1))
    return int(cand[rows[0]]) if rows.size else None


def join_table(X):
    """``J[a, b]`` = underlying-order join of ``a`` and ``b``, or -1 if absent."""
    leq = X.underlying_order()
    n = len(X)
    J = np.full((n, n), -1, dtype=np.intp)
    for a in range(n):
        for b in range(a, n):
            j = _least(leq, leq[a] & leq[b])
            if j is not None:
                J[a, b] = J[b, a] = j
    return J


def bottom(X):
    leq = X.underlying_order()
    return _least(leq, np.ones(len(X), dtype=bool))


@dataclass
class CompletenessReport:
    complete: bool
    reason: str = ""
    witness: object = None


def check_complete(X, extra_values=()):
    """Completeness of a finite snapshot, tested on a generating family of weights.

    Every weight is a join of tensors ``p & X(-, y)``; suprema of binary joins
    reduce to suprema of joins of two representables.  So it suffices to find
    suprema for those joins and for tensors with ``p`` drawn from the table's
    own values, ``0``, ``1`` and ``extra_values``.
    """
    if len(X) == 0:
        return CompletenessReport(False, "empty carrier")
    if not X.is_separated():
        return CompletenessReport(False, "not separated")
    if bottom(X) is None:
        return CompletenessReport(False, "underlying order has no bottom")
    J = join_table(X)
    if (J < 0).any():
        a, b = np.argwhere(J < 0)[0]
        return CompletenessReport(False, "underlying order is not a lattice", (int(a), int(b)))
    n = len(X)
    A = X.alpha
    for a in range(n):
        for b in range(a + 1, n):
            phi = np.maximum(A[:, a], A[:, b])
            if supremum_of_weight(X, phi) is None:
                return CompletenessReport(False, "join of representables has no supremum", (a, b))
    values = set(np.unique(A).tolist()) | {X.zero, X.one}
    values |= {Fraction(v) if is_exact(A) else float(v) for v in extra_values}
    for p in sorted(values):
        pa = np.full(n, p, dtype=A.dtype)
        for y in range(n):
            phi = X.tnorm.conj_array(pa, A[:, y])
            if supremum_of_weight(X, phi) is None:
                return CompletenessReport(False, "tensor has no supremum", (float(p), y))
    return CompletenessReport(True)


def is_complete(X, extra_values=()):
    return check_complete(X, extra_values).complete


def principal_ideals(X):
    """Down-sets ``{x : x <= a}``; on a finite carrier these are all the ideals."""
    return X.underlying_order().T.copy()
