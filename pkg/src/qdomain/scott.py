"""Scott closed weights, the Scott approach structure, and injectivity of Sigma(alphaL).

On a finite snapshot every forward Cauchy weight is representable, so every
weight is Scott closed and the Scott approach structure is Gamma of the table.
The checks here still compute everything from the way-below relation so that
the collapse is observed rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .approach import ApproachTable, _low_bit_fill, _mask_members
from .domain import (
    check_continuity,
    forward_cauchy_by_ideal,
    forward_cauchy_weights,
    grid_weights,
    way_below_finite,
)
from .interval import ALPHA_L, ALPHA_R, ParamStructure
from .order import FiniteQOrder, InputError, _values, power, sub, suprema, supremum_of_weight
from .tnorm import EPS, LUKASIEWICZ, TNorm

CERTIFICATE_VERSION = 1


class NotContinuous(InputError):
    """The structure is not a continuous [0,1]-lattice, so the closure formula does not apply."""


# -- Scott closed weights -----------------------------------------------------


@dataclass
class ScottClosedResult:
    closed: bool
    witness: object = None
    gap: float = 0.0
    resolution: int | None = None
    missing_supremum: object = None

    def __bool__(self):
        return bool(self.closed)


def is_scott_closed(X, phi, grid_n=32):
    """``sub(lam, phi) = phi(sup lam)`` for every forward Cauchy ``lam``.

    ``X`` finite: all forward Cauchy weights are enumerated; one without a
    supremum yields ``closed=None`` and the weight in ``missing_supremum``.
    ``X`` a parametric ``alphaR``/``alphaL`` structure: ``phi`` is a callable
    on [0,1] and ``lam`` ranges over ``d(c)`` and ``X(-, c)`` for grid points
    ``c``, with the inclusion taken on a grid four times finer.
    """
    if isinstance(X, FiniteQOrder):
        v = _values(phi)
        worst, witness = 0.0, None
        for lam in forward_cauchy_weights(X):
            s = supremum_of_weight(X, lam)
            if s is None:
                return ScottClosedResult(None, missing_supremum=lam)
            gap = abs(sub(lam, v, X.tnorm) - v[s])
            if gap > worst:
                worst, witness = gap, lam
        return ScottClosedResult(bool(worst <= X.eps), witness if worst > X.eps else None, float(worst))
    if isinstance(X, ParamStructure) and X.shape in (ALPHA_L, ALPHA_R):
        pts = X.grid_points(grid_n)
        fine = X.grid_points(4 * grid_n)
        tol = 1.0 / (4 * grid_n) + EPS
        phi_fine = np.array([phi(x) for x in fine])
        worst, witness = 0.0, None
        for c in pts:
            for kind, lam in (("d", [X.d_map(c, x) for x in fine]), ("yoneda", [X.hom(x, c) for x in fine])):
                incl = X.tnorm.residuum_array(np.array(lam), phi_fine).min()
                gap = abs(incl - phi(c))
                if gap > worst + EPS:
                    worst, witness = gap, {"family": kind, "c": float(c)}
        closed = bool(worst <= tol)
        return ScottClosedResult(closed, None if closed else witness, float(worst), 4 * grid_n)
    raise InputError(f"unsupported structure {X!r}")


def _require_continuous(X):
    rep = check_continuity(X)
    if not rep.is_continuous_lattice:
        raise NotContinuous("the closure formula needs a continuous [0,1]-lattice")


def scott_closure(X, phi, grid_n=32, table=None, checked=False):
    """``closure(phi)(a) = sub(w(-, a), phi)``.

    ``X`` finite: ``phi`` is a vector over the carrier.  ``X`` parametric:
    ``phi`` is a vector over ``X.grid_points(grid_n)`` and ``w`` is the closed
    form sampled there.
    """
    if isinstance(X, FiniteQOrder):
        if not checked:
            _require_continuous(X)
        w = (table or way_below_finite(X)).w
        v = _values(phi)
        return X.tnorm.inclusion_matrix(w.T, v[None, :])[:, 0]
    if isinstance(X, ParamStructure):
        if not checked and not check_continuity(X, grid_n).is_continuous_lattice:
            raise NotContinuous(f"{X} is not a continuous [0,1]-lattice")
        pts = X.grid_points(grid_n)
        w = X.d_table(pts) if table is None else table
        v = np.asarray(phi, dtype=np.float64)
        return X.tnorm.inclusion_matrix(w.T, v[None, :])[:, 0]
    raise InputError(f"unsupported structure {X!r}")


def indicator_weight(X, A, grid_n=32):
    """Smallest weight above ``1_A``: ``max_{a in A} X(-, a)``."""
    if isinstance(X, FiniteQOrder):
        idx = [X.index(a) for a in A]
        if not idx:
            return np.zeros(len(X), dtype=X.alpha.dtype)
        return X.alpha[:, idx].max(axis=1)
    pts = X.grid_points(grid_n)
    if not A:
        return np.zeros(len(pts))
    return np.array([max(X.hom(y, a) for a in A) for y in pts])


def sigma_delta(X, x, A, grid_n=32, table=None, checked=False):
    """Scott approach distance: closure of ``1_A`` evaluated at ``x``.

    For finite ``X``, ``x`` and ``A`` are elements; for a parametric ``X``
    they are points of [0,1] and ``x`` must be a grid point.
    """
    A = list(A)
    if not A:
        return 0.0
    if isinstance(X, FiniteQOrder):
        cl = scott_closure(X, indicator_weight(X, A), table=table, checked=checked)
        return cl[X.index(x)]
    if not checked and not check_continuity(X, grid_n).is_continuous_lattice:
        raise NotContinuous(f"{X} is not a continuous [0,1]-lattice")
    # the grid plus x and A, so the evaluation point is always sampled
    pts = sorted(set(X.grid_points(grid_n)) | {x} | set(A))
    phi = np.array([max(X.hom(y, a) for a in A) for y in pts])
    w = X.d_table(pts)
    cl = X.tnorm.inclusion_matrix(w.T, phi[None, :])[:, 0]
    return cl[pts.index(x)]


def sigma_table(X):
    """The whole Scott approach table of a finite continuous snapshot."""
    _require_continuous(X)
    tab = way_below_finite(X)
    n = len(X)
    delta = np.empty((n, 1 << n), dtype=X.alpha.dtype)
    delta[:, 0] = X.zero
    for A in range(1, 1 << n):
        delta[:, A] = scott_closure(X, indicator_weight(X, _mask_members(A)), table=tab, checked=True)
    return ApproachTable(X.tnorm, delta, X.elements)


# -- sobriety -----------------------------------------------------------------


@dataclass
class SobrietyWitness:
    lam: np.ndarray
    down_lambda: np.ndarray
    sup_point: int | None
    valid: bool
    checks: dict = field(default_factory=dict)
    resolution: int | None = None

    def to_dict(self, labels=None):
        return {
            "lambda": [float(v) for v in self.lam],
            "down_lambda": [float(v) for v in self.down_lambda],
            "sup_point": (labels[self.sup_point] if labels and self.sup_point is not None else self.sup_point),
            "valid": self.valid,
            "checks": self.checks,
            "resolution": self.resolution,
        }


class PreconditionError(InputError):
    """The closed set passed to sobriety_witness is not inhabited, closed or irreducible."""


def closed_family(X, grid_n, limit=20000):
    """Scott closed weights used to probe irreducibility.

    Tensors ``p & X(-, y)`` and constants, with ``p`` from the grid and from
    the table's own values, plus every grid weight when that family is small.
    """
    ps = set((np.arange(grid_n + 1) / grid_n).tolist()) | set(np.unique(X.alpha).tolist())
    rows = [X.tnorm.conj_array(np.full(len(X), p), X.alpha[:, y]) for p in ps for y in range(len(X))]
    rows += [np.full(len(X), p) for p in ps]
    if (grid_n + 1) ** len(X) <= limit:
        rows += list(grid_weights(X, grid_n))
    return np.unique(np.array(rows, dtype=np.float64), axis=0)


def _irreducible(X, lam, family):
    """``sub(lam, a v b) = sub(lam, a) v sub(lam, b)`` for every pair of family members."""
    tn = X.tnorm
    lam = np.asarray(lam, dtype=np.float64)
    single = tn.inclusion_matrix(lam[None, :], family)[0]
    tol = X.eps + EPS
    for i in range(len(family)):
        joined = np.maximum(family[i][None, :], family[i:])
        lhs = tn.residuum_array(lam[None, :], joined).min(axis=1)
        if (np.abs(lhs - np.maximum(single[i], single[i:])) > tol).any():
            return False
    return True


def sobriety_witness(X, lam, grid_n=4, check_irreducible=True):
    """Build ``down(lam) = max_a lam(a) & w(-, a)`` and recover the point ``lam`` represents."""
    v = _values(lam)
    tn = X.tnorm
    _require_continuous(X)
    if v.max() < X.one - max(X.eps, EPS):
        raise PreconditionError("lambda is not inhabited: its largest value is below 1")
    closed = is_scott_closed(X, v)
    if closed.closed is None:
        raise PreconditionError("a forward Cauchy weight has no supremum")
    if not closed.closed:
        raise PreconditionError("lambda is not Scott closed")
    checks = {}
    if check_irreducible:
        fam = closed_family(X, grid_n)
        if not _irreducible(X, v, fam):
            raise PreconditionError(f"lambda is reducible among closed sets at resolution {grid_n}")
        checks["irreducible_family_size"] = int(len(fam))
    w = way_below_finite(X).w
    down = tn.conj_array(v[None, :], w).max(axis=1)
    fc = forward_cauchy_by_ideal(X, down)
    checks["forward_cauchy"] = fc.forward_cauchy
    b = supremum_of_weight(X, down) if fc.forward_cauchy else None
    checks["has_supremum"] = b is not None
    ok = b is not None and bool((np.abs(X.alpha[:, b] - v) <= max(X.eps, EPS)).all())
    checks["lambda_is_representable"] = ok
    return SobrietyWitness(v, down, b, ok, checks, grid_n if check_irreducible else None)


# -- continuity of maps --------------------------------------------------------


def scott_continuous(f):
    """``f`` preserves order and sends the supremum of every forward Cauchy weight
    to a supremum of its image."""
    if not f.preserves_order():
        return False
    X, Y = f.source, f.target
    for lam in forward_cauchy_weights(X):
        s = supremum_of_weight(X, lam)
        if s is None:
            raise InputError("a forward Cauchy weight of the source has no supremum")
        if f.assignment[s] not in suprema(Y, f.image(lam)):
            return False
    return True


def approach_continuous(f, TX, TY, eps=EPS):
    """``TX(x, A) <= TY(f(x), f(A))`` for every point and subset of the source."""
    a = f.assignment
    for A in range(1, 1 << len(TX)):
        fA = 0
        for i in _mask_members(A):
            fA |= 1 << a[i]
        if (TX.delta[:, A] > TY.delta[list(a), fA] + eps).any():
            return False
    return True


# -- products -----------------------------------------------------------------


@dataclass
class SigmaProductReport:
    passed: bool
    max_gap: float
    witness: tuple | None
    decomposition_ok: bool
    sizes: dict

    def to_dict(self):
        return {"passed": self.passed, "max_gap": self.max_gap,
                "witness": list(self.witness) if self.witness else None,
                "decomposition_ok": self.decomposition_ok, "sizes": self.sizes}


MAX_PRODUCT_POINTS = 10


def product_of_sigma(X, k, probe_values=None):
    """Approach table of ``(Sigma X)^k`` from the subbasic closed sets ``w(z, -) -> p``.

    Singleton distances are ``min_{i, z, p} s(a_i) -> s(x_i)`` with
    ``s = w(z, -) -> p``; larger subsets follow from the union axiom.
    """
    tn = X.tnorm
    w = way_below_finite(X).w
    ps = set(np.unique(X.alpha).tolist()) | {0.0, 1.0}
    if probe_values is not None:
        ps |= set(probe_values)
    ps = np.array(sorted(ps))
    # closed sets s[z, p, :] of Sigma X
    S = tn.residuum_array(w[:, None, :], ps[None, :, None]).reshape(-1, len(X))
    # on a single factor: single[x, a] = min_s s(a) -> s(x)
    single = tn.residuum_array(S[:, None, :], S[:, :, None]).min(axis=0)   # [x, a]
    tuples = list(itertools.product(range(len(X)), repeat=k))
    idx = np.array(tuples, dtype=np.intp)
    alpha = None
    for i in range(k):
        block = single[np.ix_(idx[:, i], idx[:, i])]
        alpha = block if alpha is None else np.minimum(alpha, block)
    N = len(tuples)
    return _low_bit_fill(N, alpha, np.maximum, 0.0)


def _decomposition_ok(X, k):
    """Check the pieces ``lam^r_y = r /\\ min_i w(x_i, -)`` used for products."""
    P = power(X, k)
    wP = way_below_finite(P).w
    w = way_below_finite(X).w
    tuples = list(itertools.product(range(len(X)), repeat=k))
    idx = np.array(tuples, dtype=np.intp)
    comp = None
    for i in range(k):
        block = w[np.ix_(idx[:, i], idx[:, i])]
        comp = block if comp is None else np.minimum(comp, block)   # [x, z] = min_i w(x_i, z_i)
    for x in range(len(tuples)):
        joined = np.zeros(len(tuples))
        for y in range(len(tuples)):
            r = wP[x, y]
            lam = np.minimum(r, comp[x])
            if abs(lam[y] - r) > EPS or (lam > wP[x] + EPS).any():
                return False
            joined = np.maximum(joined, lam)
        if (np.abs(joined - wP[x]) > EPS).any():
            return False
    return True


def sigma_product_check(X, k=2, eps=EPS):
    """Compare ``Sigma(X^k)`` with ``(Sigma X)^k`` entrywise."""
    if k < 1:
        raise InputError("k must be positive")
    N = len(X) ** k
    if N > MAX_PRODUCT_POINTS:
        raise InputError(f"|X|^k = {N} exceeds the bound {MAX_PRODUCT_POINTS}")
    left = sigma_table(power(X, k)).delta.astype(np.float64)
    right = product_of_sigma(X, k)
    gap = np.abs(left - right)
    flat = int(np.argmax(gap))
    worst = float(gap.flat[flat])
    witness = None if worst <= eps else (flat // gap.shape[1], flat % gap.shape[1])
    dec = _decomposition_ok(X, k)
    return SigmaProductReport(worst <= eps and dec, worst, witness, dec, {"points": N, "subsets": 1 << N})


# -- injectivity ----------------------------------------------------------------


@dataclass
class InjectivityVerdict:
    tnorm: TNorm
    verdict: str
    certificate: dict

    def to_dict(self):
        return {"tnorm": self.tnorm.to_dict(), "verdict": self.verdict, "certificate": self.certificate}


POSITIVE = "injective-all-continuous-lattices"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"


def _lukasiewicz_certificate(t, grid_n):
    lo, hi, kind = t.grid_scaled(grid_n)
    from . import kernels
    v = np.arange(grid_n + 1, dtype=np.float64)
    top = float(grid_n)
    res = lambda a, b: kernels.residuum(a, b, lo, hi, kind, top)
    alpha_l = res(v[:, None], v[None, :])
    flipped = grid_n - v
    alpha_r_flipped = res(flipped[None, :], flipped[:, None])   # alphaR(1-x, 1-y) = (1-y) -> (1-x)
    neg = res(v, np.zeros_like(v))
    return {
        "kind": "lukasiewicz-isomorphism",
        "grid_n": grid_n,
        "map": "x -> (x -> 0)",
        "negation_is_1_minus_x": bool(np.array_equal(neg, grid_n - v)),
        "max_deviation": float(np.abs(alpha_l - alpha_r_flipped).max() / grid_n),
        "arithmetic": "exact integer numerators",
    }


def _first_non_lukasiewicz_segment(t):
    for lo, hi, kind in t.segments():
        if kind != LUKASIEWICZ:
            return lo, hi, kind
    return None


def _extension_trace(t, p, q, grid_n):
    """Bounds ``f(x) <= alphaR(x, q) -> f(q) = (q -> x) -> p`` for grid ``x`` in ``(p, q)``."""
    xs = [i / grid_n for i in range(grid_n + 1) if p < i / grid_n < q]
    return [{"x": x, "bound": float(t.residuum(t.residuum(q, x), p))} for x in xs]


def _counterexample_certificate(t, p, q, kind, grid_n):
    K = ParamStructure(t, ALPHA_R)        # specialization order of K
    L = ParamStructure(t, ALPHA_L)
    pts = [p, q]
    f = {p: q, q: p}
    preserves = all(K.hom(a, b) <= L.hom(f[a], f[b]) + EPS for a in pts for b in pts)
    trace = _extension_trace(t, p, q, grid_n)
    sup_bound = max((e["bound"] for e in trace), default=p)
    return {
        "kind": "non-extendable-map",
        "segment": {"lo": p, "hi": q, "kind": kind},
        "subspace": [p, q],
        "map": [[p, q], [q, p]],
        "preserves_specialization_order": bool(preserves),
        "grid_n": grid_n,
        "trace": trace,
        "sup_bound": float(sup_bound),
        "chain_holds": bool(preserves and sup_bound <= p + EPS and p < q),
    }


def _noncontinuity_certificate(t, grid_n):
    rep = check_continuity(ParamStructure(t, ALPHA_L), grid_n)
    wit = rep.witness or {}
    return {
        "kind": "alphaL-not-continuous",
        "grid_n": grid_n,
        "witness": wit,
        "chain_holds": bool(not rep.is_continuous_lattice and wit
                            and wit["meet"] <= wit["p"] + 1.0 / grid_n
                            and wit["meet"] < wit["hom"] - EPS),
    }


def classify_injectivity(t, grid_n=100):
    if t.is_lukasiewicz():
        return InjectivityVerdict(t, POSITIVE, _lukasiewicz_certificate(t, grid_n))
    if not t.satisfies_condition_s():
        cert = _noncontinuity_certificate(t, min(grid_n, 64))
        return InjectivityVerdict(t, COUNTEREXAMPLE if cert["chain_holds"] else INCONCLUSIVE, cert)
    seg = _first_non_lukasiewicz_segment(t)
    if seg is None:
        return InjectivityVerdict(t, INCONCLUSIVE, {"kind": "none", "reason": "no non-Lukasiewicz segment found"})
    cert = _counterexample_certificate(t, seg[0], seg[1], seg[2], grid_n)
    return InjectivityVerdict(t, COUNTEREXAMPLE if cert["chain_holds"] else INCONCLUSIVE, cert)


def verify_certificate(payload):
    """Replay a serialized verdict; returns ``(verdict, reproduced)``."""
    try:
        t = TNorm.from_dict(payload["tnorm"])
        claimed = payload["verdict"]
        cert = payload["certificate"]
        kind = cert["kind"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed certificate: {exc}") from None
    if kind == "lukasiewicz-isomorphism":
        if not t.is_lukasiewicz():
            return INCONCLUSIVE, False
        again = _lukasiewicz_certificate(t, int(cert["grid_n"]))
        ok = again["max_deviation"] == 0 and again["negation_is_1_minus_x"] and claimed == POSITIVE
        return (POSITIVE if ok else INCONCLUSIVE), ok
    if kind == "non-extendable-map":
        seg = cert["segment"]
        again = _counterexample_certificate(t, seg["lo"], seg["hi"], seg["kind"], int(cert["grid_n"]))
        ok = again["chain_holds"] and again["trace"] == cert["trace"] and claimed == COUNTEREXAMPLE
        return (COUNTEREXAMPLE if again["chain_holds"] else INCONCLUSIVE), ok
    if kind == "alphaL-not-continuous":
        again = _noncontinuity_certificate(t, int(cert["grid_n"]))
        ok = again["chain_holds"] and claimed == COUNTEREXAMPLE
        return (COUNTEREXAMPLE if again["chain_holds"] else INCONCLUSIVE), ok
    return INCONCLUSIVE, claimed == INCONCLUSIVE
