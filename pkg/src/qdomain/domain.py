"""Forward Cauchy weights and the way-below relation.

Finite structures are handled exactly.  Every forward Cauchy weight of a
finite [0,1]-ordered set has the form ``max_{d in D} X(-, d)`` for an ideal
``D`` of the underlying order, so the defining meet of the way-below relation
can be evaluated by enumerating ideals.  Parametric structures use the closed
forms in :mod:`qdomain.interval` and are checked on grids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .interval import ParamStructure, Power
from .order import (
    FiniteQOrder,
    InputError,
    _values,
    bottom,
    check_complete,
    suprema,
    supremum_of_weight,
)
from .tnorm import EPS


def slack(grid_n, eps=EPS):
    return max(1.0 / grid_n, eps)


# -- forward Cauchy weights -------------------------------------------------


@dataclass
class ForwardCauchyResult:
    forward_cauchy: bool
    ideal: list
    mode: str
    reason: str = ""
    oracle: bool | None = None
    oracle_resolution: int | None = None

    @property
    def paths_agree(self):
        return self.oracle is None or self.oracle == self.forward_cauchy

    def __bool__(self):
        return self.forward_cauchy


def ideal_of(X, phi):
    """``{x : phi(x) = 1}``."""
    v = _values(phi)
    return [int(i) for i in np.flatnonzero(v >= X.one - X.eps)]


def _directed(leq, members):
    for a, b in itertools.combinations(members, 2):
        if not any(leq[a, c] and leq[b, c] for c in members):
            return False
    return True


def forward_cauchy_by_ideal(X, phi):
    """Decide forward Cauchy-ness through ``Lambda(phi)``.

    On a finite carrier a forward Cauchy net is eventually constant up to
    isomorphism, so ``phi`` is forward Cauchy iff ``Lambda(phi)`` is a non-empty
    directed set whose representables join to ``phi``.
    """
    v = _values(phi)
    lam = ideal_of(X, v)
    if not lam:
        return ForwardCauchyResult(False, lam, "ideal-derived", "phi never reaches 1")
    if not _directed(X.underlying_order(), lam):
        return ForwardCauchyResult(False, lam, "ideal-derived", "Lambda(phi) is not directed")
    joined = X.alpha[:, lam].max(axis=1)
    if (np.abs(joined - v) > X.eps).any():
        return ForwardCauchyResult(False, lam, "ideal-derived", "phi is not the join of representables over Lambda(phi)")
    return ForwardCauchyResult(True, lam, "ideal-derived")


def grid_weights(X, grid_n):
    """All weights of ``X`` with values in ``{0, 1/n, ..., 1}`` (rows of the result)."""
    n = len(X)
    if n == 0:
        return np.zeros((1, 0))
    levels = np.arange(grid_n + 1) / grid_n
    if X.eps == 0:
        from fractions import Fraction
        levels = np.array([Fraction(i, grid_n) for i in range(grid_n + 1)], dtype=object)
    cand = np.array(list(itertools.product(range(grid_n + 1), repeat=n)), dtype=np.intp)
    vals = levels[cand]
    # phi(y) & X(x, y) <= phi(x) for every row
    lhs = X.tnorm.conj_array(vals[:, None, :], X.alpha[None, :, :])
    ok = (lhs <= vals[:, :, None] + X.eps).all(axis=(1, 2))
    return vals[ok]


class IrreducibilityOracle:
    """Inhabited-and-irreducible test against all grid weights of ``X``.

    Precomputes ``S[i, j] = sub(W_i, W_j)`` over the grid weights ``W`` and the
    index table of pairwise joins; the weight set is closed under joins.
    """

    def __init__(self, X, grid_n):
        self.X = X
        self.grid_n = grid_n
        self.weights = grid_weights(X, grid_n)
        W = self.weights
        self.S = X.tnorm.inclusion_matrix(W, W)
        scale = grid_n
        keys = np.rint(np.asarray(W, dtype=np.float64) * scale).astype(np.int64)
        base = (grid_n + 1) ** np.arange(W.shape[1], dtype=np.int64)
        code = keys @ base
        lookup = {int(c): i for i, c in enumerate(code)}
        joins = np.maximum(keys[:, None, :], keys[None, :, :]) @ base
        self.join_index = np.vectorize(lookup.__getitem__, otypes=[np.intp])(joins)
        self._lookup, self._base = lookup, base

    def row(self, phi):
        v = _values(phi)
        return self.X.tnorm.inclusion_matrix(v[None, :], self.weights)[0]

    def is_irreducible(self, phi):
        s = self.row(phi)
        lhs = s[self.join_index]
        rhs = np.maximum(s[:, None], s[None, :])
        return bool((np.abs(lhs - rhs) <= self.X.eps).all())

    def irreducible_mask(self):
        """Irreducibility of every grid weight at once."""
        S = self.S
        lhs = S[:, self.join_index]
        rhs = np.maximum(S[:, :, None], S[:, None, :])
        return (np.abs(lhs - rhs) <= self.X.eps).all(axis=(1, 2))

    def inhabited(self, phi):
        v = _values(phi)
        return v.size > 0 and v.max() >= self.X.one - self.X.eps

    def is_forward_cauchy(self, phi):
        return self.inhabited(phi) and self.is_irreducible(phi)


ORACLE_MAX_CARRIER = 4
ORACLE_MAX_GRID = 4


def is_forward_cauchy(X, phi, grid_n=None, oracle=None):
    """Forward Cauchy test; optionally cross-validated by the irreducibility oracle.

    The oracle runs when ``oracle`` is true, or by default when ``|X|`` and
    ``grid_n`` are within the default bounds.
    """
    res = forward_cauchy_by_ideal(X, phi)
    if oracle is None:
        oracle = grid_n is not None and len(X) <= ORACLE_MAX_CARRIER and grid_n <= ORACLE_MAX_GRID
    if oracle:
        if grid_n is None:
            raise InputError("the irreducibility oracle needs grid_n")
        orc = oracle if isinstance(oracle, IrreducibilityOracle) else IrreducibilityOracle(X, grid_n)
        res.oracle = orc.is_forward_cauchy(phi)
        res.oracle_resolution = grid_n
    return res


def enumerate_ideals(X, limit=14):
    """Every non-empty directed lower set of the underlying order.

    Found by brute force over subsets, without assuming they are principal.
    Larger carriers fall back to principal down-sets.
    """
    n = len(X)
    leq = X.underlying_order()
    if n > limit:
        return [list(np.flatnonzero(leq[:, a])) for a in range(n)]
    out = []
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        lower = all(mask >> x & 1 for m in members for x in np.flatnonzero(leq[:, m]))
        if lower and _directed(leq, members):
            out.append(members)
    return out


def forward_cauchy_weights(X):
    """Rows ``max_{d in D} X(-, d)`` for every ideal ``D``, deduplicated."""
    rows = [X.alpha[:, D].max(axis=1) for D in enumerate_ideals(X)]
    uniq = []
    for r in rows:
        if not any((np.abs(r - u) <= X.eps).all() for u in uniq):
            uniq.append(r)
    return np.array(uniq, dtype=X.alpha.dtype)


# -- way below --------------------------------------------------------------


@dataclass
class WayBelowTable:
    w: np.ndarray
    mode: str
    points: list = field(default_factory=list)
    hom: np.ndarray | None = None

    def law_violations(self, tnorm, eps=EPS):
        """Largest violations of the three basic way-below laws."""
        w, X = self.w, self.hom
        out = {"below_hom": float(max(0, (w - X).max()))}
        # w(y,z) & X(x,y) <= w(x,z), indices (x, y, z)
        lhs = tnorm.conj_array(w[None, :, :], X[:, :, None])
        out["left_absorb"] = float(max(0, (lhs - w[:, None, :]).max()))
        # X(z,u) & w(y,z) <= w(y,u), indices (y, z, u)
        lhs = tnorm.conj_array(X[None, :, :], w[:, :, None])
        out["right_absorb"] = float(max(0, (lhs - w[:, None, :]).max()))
        return out


class NotCocomplete(InputError):
    """A forward Cauchy weight lacks a supremum in the snapshot."""


def way_below_finite(X):
    """``w(x,y) = min over forward Cauchy phi of X(y, sup phi) -> phi(x)``."""
    Phi = forward_cauchy_weights(X)
    sups = []
    for row in Phi:
        s = supremum_of_weight(X, row)
        if s is None:
            raise NotCocomplete(f"forward Cauchy weight {list(map(float, row))} has no supremum")
        sups.append(s)
    hom_to_sup = X.alpha[:, sups]                      # [y, m] = X(y, sup phi_m)
    w_yx = X.tnorm.inclusion_matrix(hom_to_sup, Phi.T)  # [y, x]
    return WayBelowTable(w_yx.T.copy(), "finite", list(range(len(X))), X.alpha)


def way_below(X, grid_n=32):
    """Way-below table of a finite structure, or of a grid for a parametric one."""
    if isinstance(X, FiniteQOrder):
        return way_below_finite(X)
    if isinstance(X, ParamStructure):
        if X.is_power:
            raise InputError("use way_below_power for power shapes")
        pts = X.grid_points(grid_n)
        return WayBelowTable(X.d_table(pts), "parametric", pts, X.hom_table(pts))
    raise InputError(f"unsupported structure {type(X).__name__}")


def is_compact(X, a, grid_n=32, table=None):
    """``w(-, a) = X(-, a)``; for parametric ``X`` sampled on the grid."""
    if isinstance(X, ParamStructure):
        pts = X.grid_points(grid_n)
        col = np.array([X.d_map(a, x) for x in pts])
        hom = np.array([X.hom(x, a) for x in pts])
        return bool((np.abs(col - hom) <= EPS).all())
    tab = table or way_below(X)
    i = X.index(a)
    return bool((np.abs(tab.w[:, i] - X.alpha[:, i]) <= X.eps).all())


# -- continuity --------------------------------------------------------------


@dataclass
class ContinuityReport:
    is_continuous_lattice: bool
    chacl_agreement: bool
    conditions: dict
    witness: dict | None = None
    resolution: int | None = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "is_continuous_lattice": self.is_continuous_lattice,
            "chacl_agreement": self.chacl_agreement,
            "conditions": self.conditions,
            "witness": self.witness,
            "resolution": self.resolution,
            "notes": self.notes,
        }


def check_continuity(X, grid_n=32):
    if isinstance(X, FiniteQOrder):
        return _continuity_finite(X)
    if isinstance(X, ParamStructure):
        if X.is_power:
            raise InputError("continuity of powers follows from the base; check the base shape")
        return _continuity_param(X, grid_n)
    raise InputError(f"unsupported structure {type(X).__name__}")


def _continuity_finite(X):
    comp = check_complete(X)
    if not comp.complete:
        return ContinuityReport(False, True, {"complete": False}, {"reason": comp.reason, "at": comp.witness})
    tnorm, A, eps = X.tnorm, X.alpha, max(X.eps, 0)
    tab = way_below_finite(X)
    w = tab.w
    n = len(X)
    # (1) w(-, x) is forward Cauchy with supremum x
    c1 = all(forward_cauchy_by_ideal(X, w[:, x]).forward_cauchy and x in suprema(X, w[:, x]) for x in range(n))
    # on a finite lattice y << x in X0 iff y <= x
    leq = X.underlying_order()
    Phi = forward_cauchy_weights(X)
    c2 = True
    for row in Phi:
        s = supremum_of_weight(X, row)
        for x in range(n):
            below = np.flatnonzero(leq[:, x])
            rhs = row[below].min() if below.size else X.one
            if abs(A[x, s] - rhs) > eps:
                c2 = False
    # (3) d(x) = max_{y << x} X(-, y) preserves order
    D = np.array([A[:, np.flatnonzero(leq[:, x])].max(axis=1) for x in range(n)], dtype=A.dtype)
    incl = tnorm.inclusion_matrix(D, D)
    c3 = bool((A <= incl + eps).all())
    laws = tab.law_violations(tnorm)
    return ContinuityReport(
        c1, c1 == c2 == c3,
        {"complete": True, "underlying_continuous_lattice": True,
         "left_adjoint": c1, "sup_formula": c2, "d_preserves_order": c3,
         "way_below_laws": laws},
    )


def _continuity_param(S, grid_n):
    pts = S.grid_points(grid_n)
    d = S.d_table(pts)            # d[x, t] = d(t)(x)
    H = S.hom_table(pts)          # H[t, s] = hom(t, s)
    tn = S.tnorm
    # (3): hom(t, s) <= min_x d(t)(x) -> d(s)(x)
    incl = tn.inclusion_matrix(d.T, d.T)      # [t, s]
    gap = H - incl
    flat = int(np.argmax(gap))
    c3 = bool(gap.flat[flat] <= EPS)
    witness = None
    if not c3:
        t_i, s_i = np.unravel_index(flat, gap.shape)
        witness = _witness_payload(S, pts[t_i], pts[s_i], d[:, t_i], d[:, s_i])
        better = _preferred_witness(S, grid_n)
        if better is not None:
            witness = better
    notes = []
    conditions = {"d_preserves_order": c3}
    if S.shape == "xinf":
        # not complete, so never a continuous lattice; d preserving order makes it a domain
        notes.append("xinf is not a complete lattice; only the order-preservation of d is tested")
        conditions.update(complete=False, domain=c3)
        return ContinuityReport(False, True, conditions, witness, grid_n, notes)
    # (2): X(x, s) = min_{y << x} d(s)(y).  d(s) is monotone along the chain,
    # so the meet is a one-sided limit at x, read off just beside x.
    sl = slack(grid_n) + EPS
    c2 = True
    for xi, x in enumerate(pts):
        near = _approach_from_below(S, x)
        rhs = np.array([S.d_map(s, near) for s in pts])
        if (np.abs(H[xi, :] - rhs) > sl).any():
            c2 = False
            break
    conditions["sup_formula"] = c2
    return ContinuityReport(c3, c2 == c3, conditions, witness, grid_n, notes)


LIMIT_OFFSET = 1e-7


def _approach_from_below(S, x):
    """A point way below ``x`` and as close to it as the offset allows."""
    if S.shape == "alphaL":
        return x - LIMIT_OFFSET if x > 0 else x
    return x + LIMIT_OFFSET if x < 1 else x


def _witness_payload(S, t, p, dt, dp):
    tn = S.tnorm
    meet = tn.residuum_array(dt, dp).min()
    return {"t": float(t), "p": float(p), "meet": float(meet), "hom": float(S.hom(t, p))}


def _preferred_witness(S, grid_n):
    """For alphaL with a Lukasiewicz piece ``[p, q]``, ``p > 0``: the pair ``(t, p)``
    with ``t = p + 0.6 (q - p)``, evaluated with ``x`` on the grid plus ``t``."""
    if S.shape != "alphaL":
        return None
    for piece in S.tnorm.pieces:
        if piece.kind == "lukasiewicz" and piece.lo > 0:
            p, q = piece.lo, piece.hi
            t = p + 0.6 * (q - p)
            xs = sorted(set(S.grid_points(grid_n)) | {t})
            dt = np.array([S.d_map(t, x) for x in xs])
            dp = np.array([S.d_map(p, x) for x in xs])
            return _witness_payload(S, t, p, dt, dp)
    return None


# -- interpolation and products ---------------------------------------------


@dataclass
class InterpolationReport:
    max_excess: float
    max_deficit: float
    slack: float
    witness: tuple | None

    @property
    def passed(self):
        return self.max_excess <= EPS and self.max_deficit <= self.slack

    def to_dict(self):
        return {"max_excess": self.max_excess, "max_deficit": self.max_deficit,
                "slack": self.slack, "passed": self.passed,
                "witness": list(self.witness) if self.witness else None}


def check_interpolation(X, grid_n=32):
    """Compare ``max_z w(z,y) & w(x,z)`` with ``w(x,y)``.

    Finite structures use every ``z``.  Parametric ones sample ``x, y`` on the
    ``1/n`` grid and ``z`` on the ``1/(2n)`` grid.
    """
    if isinstance(X, FiniteQOrder):
        tab = way_below_finite(X)
        w_xz = w_zy = tab.w
        w = tab.w
        sl = X.eps
        tn = X.tnorm
    else:
        pts = X.grid_points(grid_n)
        zs = X.grid_points(2 * grid_n)
        w = X.d_table(pts)                  # [x, y]
        w_xz = X.d_table(zs, pts)           # [x, z] = d(z)(x)
        w_zy = X.d_table(pts, zs)           # [z, y] = d(y)(z)
        sl = slack(grid_n)
        tn = X.tnorm
    best = tn.compose(w_xz, w_zy)           # max_z w(x,z) & w(z,y)
    diff = best - w
    excess = float(max(0, diff.max()))
    deficit = float(max(0, (-diff).max()))
    witness = None
    if excess > EPS or deficit > sl:
        witness = tuple(int(i) for i in np.unravel_index(int(np.argmax(np.abs(diff))), diff.shape))
    return InterpolationReport(excess, deficit, float(sl), witness)


@dataclass
class PowerBound:
    upper_bound: float
    equality: bool
    coordinates: list


def way_below_power(S, xs, ys, grid_n=32):
    """``w(x, y) <= min_i w(x_i, y_i)`` in a finite power, with equality for finite index sets.

    ``S`` is a power :class:`ParamStructure` or a finite base snapshot.
    """
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise InputError("coordinate vectors differ in length")
    if isinstance(S, ParamStructure):
        base = S.base
        if isinstance(S.shape, Power) and len(xs) != S.shape.k:
            raise InputError(f"points of {S.shape} need {S.shape.k} coordinates")
        if base.bottom() is None:
            raise InputError(f"{base.shape} has no bottom element")
        comps = [base.d_map(y, x) for x, y in zip(xs, ys)]
    else:
        if bottom(S) is None:
            raise InputError("base structure has no bottom element")
        tab = way_below_finite(S)
        comps = [tab.w[S.index(x), S.index(y)] for x, y in zip(xs, ys)]
    # every coordinate outside a finite set is bottom, trivially so here
    return PowerBound(float(min(comps)) if comps else 1.0, True, [float(c) for c in comps])
