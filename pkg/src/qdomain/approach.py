"""Finite [0,1]-approach spaces.

A table ``delta`` of shape ``(n, 2**n)`` holds ``delta(x, A)`` with ``A``
encoded as a bitmask (bit ``i`` set iff element ``i`` is in ``A``).  Closed sets
of the associated cotopology are the maps ``lam`` that are continuous into the
space K, tested by :func:`kappa_membership`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .order import FiniteQOrder, InputError, is_exact, tolerance
from .tnorm import EPS, TNorm

MAX_POINTS = 12


def _mask_members(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def subset_mask(indices):
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def _low_bit_fill(n, first, op, start):
    """``out[:, B] = op over b in B of first[:, b]``, ``out[:, 0] = start``, by dynamic programming."""
    m = 1 << n
    out = np.empty((first.shape[0], m), dtype=first.dtype)
    out[:, 0] = start
    for B in range(1, m):
        low = B & -B
        out[:, B] = op(out[:, B ^ low], first[:, low.bit_length() - 1])
    return out


class ApproachTable:
    def __init__(self, tnorm, delta, elements=None, defaulted_masks=()):
        delta = np.asarray(delta)
        if delta.dtype != object:
            delta = delta.astype(np.float64)
        if delta.ndim != 2:
            raise InputError("delta must be a 2-d table (point x subset mask)")
        n = delta.shape[0]
        if n > MAX_POINTS:
            raise InputError(f"approach tables are limited to {MAX_POINTS} points, got {n}")
        if delta.shape[1] != 1 << n:
            raise InputError(f"delta needs {1 << n} subset columns for {n} points, got {delta.shape[1]}")
        self.tnorm = tnorm
        self.delta = delta
        self.elements = [str(e) for e in (elements if elements is not None else range(n))]
        if len(self.elements) != n:
            raise InputError("label count does not match the table")
        self.defaulted_masks = sorted(defaulted_masks)

    def __len__(self):
        return self.delta.shape[0]

    def __repr__(self):
        return f"ApproachTable(n={len(self)}, tnorm={self.tnorm})"

    @property
    def eps(self):
        return tolerance(self.delta)

    @property
    def one(self):
        return Fraction(1) if is_exact(self.delta) else 1.0

    @property
    def zero(self):
        return Fraction(0) if is_exact(self.delta) else 0.0

    def dist(self, x, A):
        return self.delta[x, subset_mask(A)]

    # -- constructors -------------------------------------------------------

    @classmethod
    def gamma(cls, X):
        """``Gamma(alpha)(x, A) = max_{a in A} alpha(x, a)``."""
        if len(X) > MAX_POINTS:
            raise InputError(f"approach tables are limited to {MAX_POINTS} points")
        delta = _low_bit_fill(len(X), X.alpha, np.maximum, X.zero)
        return cls(X.tnorm, delta, X.elements)

    @classmethod
    def from_dict(cls, data):
        try:
            tnorm = TNorm.from_dict(data["tnorm"])
            elements = list(data["elements"])
            rows = data["delta"]
        except KeyError as exc:
            raise InputError(f"approach file is missing the {exc.args[0]!r} field") from None
        n = len(elements)
        if n > MAX_POINTS:
            raise InputError(f"approach tables are limited to {MAX_POINTS} points")
        m = 1 << n
        given = {}
        for key, vec in rows.items():
            try:
                mask = int(key)
            except ValueError:
                raise InputError(f"delta key {key!r} is not an integer bitmask") from None
            if not 0 <= mask < m:
                raise InputError(f"delta key {mask} out of range for {n} points")
            if len(vec) != n:
                raise InputError(f"delta[{mask}] has {len(vec)} values, expected {n}")
            given[mask] = [float(v) for v in vec]
        delta = np.zeros((n, m))
        defaulted = []
        for mask in range(1, m):
            if mask in given:
                delta[:, mask] = given[mask]
                continue
            members = _mask_members(mask)
            if len(members) == 1:
                raise InputError(f"singleton mask {mask} is required")
            delta[:, mask] = np.max([given[1 << i] for i in members], axis=0)
            defaulted.append(mask)
        if 0 in given:
            delta[:, 0] = given[0]
        return cls(tnorm, delta, elements, defaulted)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "tnorm": self.tnorm.to_dict(),
            "elements": list(self.elements),
            "delta": {str(m): [float(v) for v in self.delta[:, m]] for m in range(self.delta.shape[1])},
        }

    # -- derived structure --------------------------------------------------

    def specialization(self):
        """``Omega(delta)(x, y) = delta(x, {y})``."""
        cols = [1 << i for i in range(len(self))]
        return FiniteQOrder(self.tnorm, self.delta[:, cols].copy(), self.elements)

    def subspace(self, indices):
        idx = sorted({int(i) for i in indices})
        k = len(idx)
        cols = [subset_mask(idx[j] for j in range(k) if sub >> j & 1) for sub in range(1 << k)]
        return ApproachTable(self.tnorm, self.delta[np.ix_(idx, cols)].copy(),
                             [self.elements[i] for i in idx])

    def exact(self):
        conv = np.vectorize(lambda v: v if isinstance(v, Fraction) else Fraction(repr(float(v))),
                            otypes=[object])
        return ApproachTable(self.tnorm, conv(self.delta), self.elements, self.defaulted_masks)


def gamma(X):
    return ApproachTable.gamma(X)


def omega(T):
    return T.specialization()


def space_K(tnorm, grid_n, exact=False):
    """The space K on ``{0, 1/n, ..., 1}``: ``delta(x, A) = min A -> x``."""
    if grid_n < 1:
        raise InputError("grid_n must be at least 1")
    if grid_n + 1 > MAX_POINTS:
        raise InputError(f"space_K table needs grid_n + 1 <= {MAX_POINTS}; use k_distance for larger grids")
    pts = [Fraction(i, grid_n) if exact else i / grid_n for i in range(grid_n + 1)]
    vals = np.array(pts, dtype=object if exact else np.float64)
    n = len(pts)
    # min A by dynamic programming over masks, top for the empty set
    mins = _low_bit_fill(n, vals[None, :], np.minimum, vals[-1])[0]
    delta = tnorm.residuum_array(mins[None, :], vals[:, None])
    delta = np.asarray(delta, dtype=vals.dtype)
    delta[:, 0] = 0
    labels = [str(p) if exact else f"{p:g}" for p in pts]
    return ApproachTable(tnorm, delta, labels)


def k_distance(tnorm, x, A):
    """``delta_K(x, A)`` for an arbitrary finite subset ``A`` of [0,1]."""
    A = list(A)
    return tnorm.residuum(min(A), x) if A else 0 * x


# -- axioms -----------------------------------------------------------------


@dataclass
class ApproachReport:
    valid: bool
    violations: dict
    witnesses: dict
    separated: bool
    defaulted_masks: list = field(default_factory=list)

    def to_dict(self, labels=None):
        def name(w):
            if w is None or labels is None:
                return w
            x, *masks = w
            return [labels[x]] + [[labels[i] for i in _mask_members(m)] for m in masks]
        return {
            "valid": self.valid,
            "violations": {k: float(v) for k, v in self.violations.items()},
            "witnesses": {k: name(v) for k, v in self.witnesses.items()},
            "separated": self.separated,
            "defaulted_masks": self.defaulted_masks,
        }


def _violations_generic(T):
    """Union and transitivity violations for exact (object) tables."""
    d, tn = T.delta, T.tnorm
    n, m = d.shape
    masks = np.arange(m)
    union = masks[:, None] | masks[None, :]
    a3, a3_w = 0, None
    for x in range(n):
        row = d[x]
        diff = np.abs(row[union] - np.maximum(row[:, None], row[None, :]))
        idx = int(np.argmax(diff))
        if diff.flat[idx] > a3:
            a3, a3_w = diff.flat[idx], (x, idx // m, idx % m)
    meet_b = _low_bit_fill(n, d.T, np.minimum, T.one)   # [A, B] = min_{b in B} d(b, A)
    a4, a4_w = 0, None
    for A in range(m):
        viol = tn.conj_array(meet_b[A][None, :], d) - d[:, A][:, None]
        idx = int(np.argmax(viol))
        if viol.flat[idx] > a4:
            a4, a4_w = viol.flat[idx], (idx // m, A, idx % m)
    return a3, a3_w, a4, a4_w


def check_approach_axioms(T, eps=EPS):
    eps = tolerance(T.delta, eps)
    d = T.delta
    n = len(T)
    violations, witnesses = {}, {}
    diag = np.array([d[x, 1 << x] for x in range(n)], dtype=d.dtype)
    gap1 = T.one - diag
    i = int(np.argmax(gap1)) if n else 0
    violations["A1"] = max(gap1[i], 0) if n else 0
    witnesses["A1"] = (i, 1 << i) if n and gap1[i] > eps else None
    gap2 = d[:, 0]
    i = int(np.argmax(gap2)) if n else 0
    violations["A2"] = abs(gap2[i]) if n else 0
    witnesses["A2"] = (i, 0) if n and abs(gap2[i]) > eps else None
    if is_exact(d):
        a3, w3, a4, w4 = _violations_generic(T)
    else:
        a3, w3, a4, w4 = kernels.approach_violations(d, *T.tnorm.piece_arrays)
    violations["A3"], witnesses["A3"] = a3, (w3 if a3 > eps else None)
    violations["A4"], witnesses["A4"] = a4, (w4 if a4 > eps else None)
    valid = bool(all(v <= eps for v in violations.values()))
    return ApproachReport(valid, violations, witnesses,
                          T.specialization().is_separated(), list(T.defaulted_masks))


# -- closure and closed sets --------------------------------------------------


def _vec(T, lam):
    v = np.asarray(lam)
    if is_exact(T.delta) and v.dtype != object:
        v = np.array([Fraction(repr(float(a))) for a in v], dtype=object)
    elif not is_exact(T.delta):
        v = v.astype(np.float64)
    if v.shape != (len(T),):
        raise InputError(f"vector needs {len(T)} entries, got shape {v.shape}")
    return v


def level_mask(lam, p):
    return subset_mask(np.flatnonzero(lam >= p))


def closure(T, lam):
    """``max_p p & delta(-, {lam >= p})`` over ``p`` in the values of ``lam`` plus 0 and 1."""
    v = _vec(T, lam)
    levels = sorted(set(v.tolist()) | {T.zero, T.one})
    out = np.full(len(T), T.zero, dtype=T.delta.dtype)
    for p in levels:
        col = T.delta[:, level_mask(v, p)]
        out = np.maximum(out, T.tnorm.conj_array(np.full(len(T), p, dtype=T.delta.dtype), col))
    return out


def closure_of_indicator(T, A):
    v = np.full(len(T), T.zero, dtype=T.delta.dtype)
    v[list(A)] = T.one
    return closure(T, v)


def _subset_mins(T, v):
    return _low_bit_fill(len(T), v[None, :], np.minimum, T.one)[0]


def kappa_violation(T, lam):
    """Largest ``delta(x, A) - (min lam(A) -> lam(x))`` over ``x`` and non-empty ``A``."""
    v = _vec(T, lam)
    mins = _subset_mins(T, v)
    bound = T.tnorm.residuum_array(mins[None, :], v[:, None])
    gap = T.delta - np.asarray(bound, dtype=T.delta.dtype)
    gap[:, 0] = T.zero
    flat = int(np.argmax(gap))
    return gap.flat[flat], (flat // gap.shape[1], flat % gap.shape[1])


def kappa_membership(T, lam, eps=EPS):
    """Is ``lam`` a continuous map into K, i.e. a closed set of kappa(T)?"""
    gap, _ = kappa_violation(T, lam)
    return bool(gap <= tolerance(T.delta, eps))


def kappa_witness(T, lam, eps=EPS):
    gap, where = kappa_violation(T, lam)
    return None if gap <= tolerance(T.delta, eps) else where


def grid_vectors(n, grid_n, exact=False):
    levels = [Fraction(i, grid_n) if exact else i / grid_n for i in range(grid_n + 1)]
    arr = np.array(list(itertools.product(levels, repeat=n)), dtype=object if exact else np.float64)
    return arr


def kappa_family(T, grid_n):
    """Closed sets of kappa(T) among the grid vectors, plus every ``delta(-, A)``."""
    vecs = grid_vectors(len(T), grid_n, is_exact(T.delta))
    keep = [v for v in vecs if kappa_membership(T, v)]
    keep.extend(T.delta[:, A].copy() for A in range(T.delta.shape[1]))
    return np.array(keep, dtype=T.delta.dtype)


def zeta(family, n, tnorm, exact=False):
    """Approach table of a cotopology given by a family of closed sets.

    ``zeta(x, A)`` is the least ``phi(x)`` over family members with ``phi = 1``
    on ``A``; the family must contain the closures of indicators for this to be
    exact (meets of closed sets are closed).
    """
    fam = np.asarray(family)
    one = Fraction(1) if exact else 1.0
    eps = 0 if exact else EPS
    m = 1 << n
    delta = np.empty((n, m), dtype=object if exact else np.float64)
    for A in range(m):
        members = _mask_members(A)
        ok = (fam[:, members] >= one - eps).all(axis=1) if members else np.ones(len(fam), dtype=bool)
        if not ok.any():
            delta[:, A] = one
        else:
            delta[:, A] = fam[ok].min(axis=0)
    delta[:, 0] = 0
    return ApproachTable(tnorm, delta)


@dataclass
class CotopologyPredicate:
    """A [0,1]-cotopology given by a membership test on value vectors."""

    n: int
    is_closed: object
    tnorm: TNorm
    generators: list = field(default_factory=list)

    def family(self, grid_n, exact=False):
        vecs = [v for v in grid_vectors(self.n, grid_n, exact) if self.is_closed(v)]
        vecs.extend(np.asarray(g) for g in self.generators)
        return np.array(vecs, dtype=object if exact else np.float64)


def kappa_predicate(T):
    return CotopologyPredicate(len(T), lambda v: kappa_membership(T, v), T.tnorm,
                               [T.delta[:, A].copy() for A in range(T.delta.shape[1])])


@dataclass
class RoundTripReport:
    zeta_kappa_identity: bool
    zeta_kappa_gap: float
    kappa_zeta_identity: bool
    kappa_zeta_mismatch: list
    omega_gamma_identity: bool
    resolution: int

    @property
    def passed(self):
        return self.zeta_kappa_identity and self.kappa_zeta_identity and self.omega_gamma_identity

    def to_dict(self):
        return {"zeta_kappa_identity": self.zeta_kappa_identity,
                "zeta_kappa_gap": float(self.zeta_kappa_gap),
                "kappa_zeta_identity": self.kappa_zeta_identity,
                "kappa_zeta_mismatch": [[float(a) for a in v] for v in self.kappa_zeta_mismatch[:5]],
                "omega_gamma_identity": self.omega_gamma_identity,
                "resolution": self.resolution, "passed": self.passed}


def functor_round_trips(T, tau=None, grid_n=4):
    """``zeta(kappa(T)) = T``, ``kappa(zeta(tau)) = tau`` on grid vectors, ``Omega(Gamma(X)) = X``."""
    exact = is_exact(T.delta)
    eps = tolerance(T.delta)
    fam = kappa_family(T, grid_n)
    back = zeta(fam, len(T), T.tnorm, exact)
    gap = np.abs(back.delta - T.delta).max()
    tau = tau or kappa_predicate(T)
    tau_fam = tau.family(grid_n, exact)
    from_tau = zeta(tau_fam, tau.n, tau.tnorm, exact)
    mismatch = []
    for v in grid_vectors(tau.n, grid_n, exact):
        if kappa_membership(from_tau, v) != bool(tau.is_closed(v)):
            mismatch.append(v)
    X = T.specialization()
    og = np.abs(ApproachTable.gamma(X).specialization().alpha - X.alpha).max()
    return RoundTripReport(bool(gap <= eps), gap, not mismatch, mismatch, bool(og <= eps), grid_n)


# -- closure axioms -----------------------------------------------------------


def closure_axiom_violations(T, vectors, scalars):
    """Largest violations of (cl1)-(cl6) over the given vectors and scalars."""
    tn = T.tnorm
    vecs = [_vec(T, v) for v in vectors]
    closed = [closure(T, v) for v in vecs]
    zero = np.full(len(T), T.zero, dtype=T.delta.dtype)
    out = {"cl1": np.abs(closure(T, zero)).max() if len(T) else 0}
    out["cl2"] = max((max(0, (v - c).max()) for v, c in zip(vecs, closed)), default=0)
    out["cl4"] = max((np.abs(closure(T, c) - c).max() for c in closed), default=0)
    cl3 = cl5 = cl6 = 0
    for i, (a, ca) in enumerate(zip(vecs, closed)):
        for b, cb in zip(vecs[i:], closed[i:]):
            cl3 = max(cl3, np.abs(closure(T, np.maximum(a, b)) - np.maximum(ca, cb)).max())
            lhs = tn.residuum_array(a, b).min()
            rhs = tn.residuum_array(ca, cb).min()
            cl5 = max(cl5, lhs - rhs)
        for p in scalars:
            pv = np.full(len(T), p, dtype=T.delta.dtype)
            cl6 = max(cl6, np.abs(closure(T, tn.conj_array(pv, a)) - tn.conj_array(pv, ca)).max())
    out.update(cl3=cl3, cl5=max(cl5, 0), cl6=cl6)
    return {k: out[k] for k in sorted(out)}


def subbasis_gap(T, lam, ns=(2, 4, 8, 16)):
    """Distance between ``lam`` and ``min_n max_i (i+1)/n & closure(lam_[i/n])``."""
    v = _vec(T, lam)
    tn = T.tnorm
    best = None
    for n in ns:
        acc = np.full(len(T), T.zero, dtype=T.delta.dtype)
        for i in range(n):
            p = Fraction(i, n) if is_exact(T.delta) else i / n
            q = Fraction(i + 1, n) if is_exact(T.delta) else (i + 1) / n
            ind = np.where(v >= p, T.one, T.zero).astype(T.delta.dtype)
            term = tn.conj_array(np.full(len(T), q, dtype=T.delta.dtype), closure(T, ind))
            acc = np.maximum(acc, term)
        best = acc if best is None else np.minimum(best, acc)
    return float(np.abs(best - v).max())
