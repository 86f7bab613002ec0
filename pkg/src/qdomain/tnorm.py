"""Continuous t-norms as ordinal sums of Lukasiewicz and product pieces.

A :class:`TNorm` is a list of disjoint intervals ``[lo, hi]``; on each one the
conjunction is a rescaled copy of the Lukasiewicz or product t-norm, and
everywhere else it is ``min``.  The empty list is the Goedel t-norm.

Scalar methods accept floats or :class:`fractions.Fraction` and stay exact on
fractions.  Array methods run through :mod:`qdomain.kernels`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels

EPS = 1e-9

LUKASIEWICZ = "lukasiewicz"
PRODUCT = "product"
_KIND_CODES = {LUKASIEWICZ: 0, PRODUCT: 1}
_KIND_ALIASES = {
    "lukasiewicz": LUKASIEWICZ, "łukasiewicz": LUKASIEWICZ, "l": LUKASIEWICZ, "luk": LUKASIEWICZ,
    "product": PRODUCT, "p": PRODUCT, "prod": PRODUCT,
}


def _exact(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(repr(float(v)))


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    kind: str

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown piece kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError(f"piece bounds must satisfy 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")

    @cached_property
    def exact_bounds(self):
        return _exact(self.lo), _exact(self.hi)

    def contains_open(self, x):
        return self.lo < x < self.hi


@dataclass(frozen=True)
class TNorm:
    """A continuous t-norm in ordinal-sum normal form."""

    pieces: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        pieces = []
        for p in self.pieces:
            if isinstance(p, Piece):
                pieces.append(p)
            elif isinstance(p, dict):
                pieces.append(Piece(p["lo"], p["hi"], p.get("kind", p.get("archetype"))))
            else:
                pieces.append(Piece(*p))
        pieces.sort(key=lambda p: p.lo)
        for a, b in zip(pieces, pieces[1:]):
            if b.lo < a.hi:
                raise ValueError(f"overlapping pieces [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}]")
        object.__setattr__(self, "pieces", tuple(pieces))

    # -- constructors -------------------------------------------------------

    @classmethod
    def godel(cls):
        return cls((), name="godel")

    @classmethod
    def lukasiewicz(cls):
        return cls(((0.0, 1.0, LUKASIEWICZ),), name="lukasiewicz")

    @classmethod
    def product(cls):
        return cls(((0.0, 1.0, PRODUCT),), name="product")

    @classmethod
    def ordinal_sum(cls, *pieces, name=""):
        return cls(tuple(pieces), name=name)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "pieces" not in data:
            raise ValueError('t-norm spec must be an object with a "pieces" list')
        return cls(tuple(data["pieces"]), name=data.get("name", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {"pieces": [{"lo": p.lo, "hi": p.hi, "kind": p.kind} for p in self.pieces]}

    def __str__(self):
        if self.name:
            return self.name
        if not self.pieces:
            return "godel"
        inner = ", ".join(f"{p.kind[0].upper()}@[{p.lo:g},{p.hi:g}]" for p in self.pieces)
        return f"ordinal_sum({inner})"

    # -- evaluation ---------------------------------------------------------

    def _piece_bounds(self, p, *values):
        if any(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values):
            return p.exact_bounds
        return p.lo, p.hi

    def conj(self, x, y):
        """``x & y``."""
        for p in self.pieces:
            lo, hi = self._piece_bounds(p, x, y)
            if lo < x < hi and lo < y < hi:
                if p.kind == LUKASIEWICZ:
                    return max(lo, x + y - hi)
                return lo + (x - lo) * (y - lo) / (hi - lo)
        return min(x, y)

    def residuum(self, x, y):
        """``x -> y``: the largest ``z`` with ``x & z <= y``."""
        if x <= y:
            return Fraction(1) if isinstance(x, Fraction) or isinstance(y, Fraction) else 1.0
        for p in self.pieces:
            lo, hi = self._piece_bounds(p, x, y)
            if lo <= y and x < hi:
                if p.kind == LUKASIEWICZ:
                    return hi - x + y
                return lo + (hi - lo) * (y - lo) / (x - lo)
        return y

    @cached_property
    def piece_arrays(self):
        lo = np.array([p.lo for p in self.pieces], dtype=np.float64)
        hi = np.array([p.hi for p in self.pieces], dtype=np.float64)
        kind = np.array([_KIND_CODES[p.kind] for p in self.pieces], dtype=np.int_)
        return lo, hi, kind

    @cached_property
    def _object_ufuncs(self):
        return np.frompyfunc(self.conj, 2, 1), np.frompyfunc(self.residuum, 2, 1)

    def conj_array(self, x, y):
        if _is_object(x) or _is_object(y):
            return self._object_ufuncs[0](x, y)
        return kernels.conj(x, y, *self.piece_arrays)

    def residuum_array(self, x, y):
        if _is_object(x) or _is_object(y):
            return self._object_ufuncs[1](x, y)
        return kernels.residuum(x, y, *self.piece_arrays)

    def compose(self, A, B):
        """``C[i, j] = max_k A[i, k] & B[k, j]``."""
        if _is_object(A) or _is_object(B):
            A = np.asarray(A, dtype=object)
            B = np.asarray(B, dtype=object)
            return self.conj_array(A[:, :, None], B[None, :, :]).max(axis=1)
        return kernels.compose_max(A, B, *self.piece_arrays)

    def inclusion_matrix(self, A, B):
        """``C[i, j] = min_k A[i, k] -> B[j, k]``, i.e. sub(row i of A, row j of B)."""
        if _is_object(A) or _is_object(B):
            A = np.asarray(A, dtype=object)
            B = np.asarray(B, dtype=object)
            if A.shape[1] == 0:
                return np.full((A.shape[0], B.shape[0]), Fraction(1), dtype=object)
            return self.residuum_array(A[:, None, :], B[None, :, :]).min(axis=2)
        return kernels.residuum_meet(A, B, *self.piece_arrays)

    # -- structure ----------------------------------------------------------

    @property
    def has_product(self):
        return any(p.kind == PRODUCT for p in self.pieces)

    def is_idempotent(self, x):
        return not any(p.contains_open(x) for p in self.pieces)

    def segments(self):
        """Ordered cover of [0,1] by pieces and non-degenerate Goedel intervals.

        Returns ``(lo, hi, kind)`` triples, kind being ``"godel"`` for the
        stretches made of idempotents.
        """
        out = []
        cursor = 0.0
        for p in self.pieces:
            if p.lo > cursor:
                out.append((cursor, p.lo, "godel"))
            out.append((p.lo, p.hi, p.kind))
            cursor = p.hi
        if cursor < 1.0:
            out.append((cursor, 1.0, "godel"))
        return out

    def idempotent_intervals(self):
        """Closed intervals whose union is the idempotent set (degenerate ones included)."""
        out = []
        cursor = 0.0
        for p in self.pieces:
            out.append((cursor, p.lo))
            cursor = p.hi
        out.append((cursor, 1.0))
        return out

    def satisfies_condition_s(self):
        return all(p.kind == PRODUCT for p in self.pieces if p.lo > 0)

    def is_archimedean(self):
        return len(self.pieces) == 1 and self.pieces[0].lo == 0 and self.pieces[0].hi == 1

    def is_lukasiewicz(self):
        return self.is_archimedean() and self.pieces[0].kind == LUKASIEWICZ

    def grid_scaled(self, n):
        """Piece arrays with bounds multiplied by ``n``; bounds must lie on the grid."""
        if self.has_product:
            raise ValueError("exact grid arithmetic is unavailable for t-norms with a product piece")
        lo, hi, kind = [], [], []
        for p in self.pieces:
            a, b = (v * n for v in p.exact_bounds)
            if a.denominator != 1 or b.denominator != 1:
                raise ValueError(f"piece [{p.lo}, {p.hi}] is not aligned with the 1/{n} grid")
            lo.append(float(a))
            hi.append(float(b))
            kind.append(_KIND_CODES[p.kind])
        return np.array(lo), np.array(hi), np.array(kind, dtype=np.int_)

    def supports_exact(self, n):
        try:
            self.grid_scaled(n)
        except ValueError:
            return False
        return True


def _is_object(a):
    return isinstance(a, np.ndarray) and a.dtype == object


GODEL = TNorm.godel()
LUKASIEWICZ_TNORM = TNorm.lukasiewicz()
PRODUCT_TNORM = TNorm.product()

BUILTIN = {
    "godel": GODEL,
    "lukasiewicz": LUKASIEWICZ_TNORM,
    "product": PRODUCT_TNORM,
}


def conj(t, x, y):
    return t.conj(x, y)


def residuum(t, x, y):
    return t.residuum(x, y)


@dataclass
class TNormClass:
    idempotent_intervals: list
    idempotent_sample_set: list
    satisfies_condition_s: bool
    archimedean: bool


def classify(t):
    intervals = t.idempotent_intervals()
    sample = sorted({v for a, b in intervals for v in (a, b, (a + b) / 2)})
    return TNormClass(
        idempotent_intervals=intervals,
        idempotent_sample_set=sample,
        satisfies_condition_s=t.satisfies_condition_s(),
        archimedean=t.is_archimedean(),
    )


@dataclass
class LawReport:
    tnorm: str
    grid_n: int
    exact: bool
    violations: dict
    witnesses: dict

    @property
    def max_violation(self):
        return max(self.violations.values())

    def passed(self, tol=EPS):
        return self.max_violation <= (0 if self.exact else tol)

    def to_dict(self):
        return {
            "tnorm": self.tnorm,
            "grid_n": self.grid_n,
            "exact": self.exact,
            "violations": self.violations,
            "witnesses": self.witnesses,
            "max_violation": self.max_violation,
        }


def verify_quantale_laws(t, grid_n, exact=None):
    """Check the quantale laws of ``t`` on the grid ``{0, 1/n, ..., 1}``.

    In exact mode every value is an integer numerator over ``grid_n``, which
    keeps Goedel and Lukasiewicz arithmetic exact.  ``exact=None`` picks exact
    mode whenever the t-norm allows it.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if exact is None:
        exact = t.supports_exact(grid_n)
    if exact:
        lo, hi, kind = t.grid_scaled(grid_n)
        top = float(grid_n)
        v = np.arange(grid_n + 1, dtype=np.float64)
        scale = 1.0 / grid_n
    else:
        lo, hi, kind = t.piece_arrays
        top = 1.0
        v = np.arange(grid_n + 1, dtype=np.float64) / grid_n
        scale = 1.0

    def cj(a, b):
        return kernels.conj(a, b, lo, hi, kind, top)

    def rs(a, b):
        return kernels.residuum(a, b, lo, hi, kind, top)

    C = cj(v[:, None], v[None, :])
    R = rs(v[:, None], v[None, :])
    violations, witnesses = {}, {}

    def record(name, mag, where):
        idx = np.unravel_index(int(np.argmax(mag)), mag.shape)
        violations[name] = float(mag[idx]) * scale
        witnesses[name] = [float(v[i]) * scale for i in where(idx)]

    record("commutativity", np.abs(C - C.T), lambda i: i)
    record("unit", np.abs(cj(top, v) - v)[None, :], lambda i: (i[1],))
    left = cj(C[:, :, None], v[None, None, :])
    right = cj(v[:, None, None], C[None, :, :])
    record("associativity", np.abs(left - right), lambda i: i)
    mono_rows = np.maximum(C[:-1, :] - C[1:, :], 0)
    mono_cols = np.maximum(C[:, :-1] - C[:, 1:], 0)
    record("monotonicity_first", mono_rows, lambda i: i)
    record("monotonicity_second", mono_cols, lambda i: i)
    record("residuum_antitone_first", np.maximum(R[1:, :] - R[:-1, :], 0), lambda i: i)
    record("residuum_monotone_second", np.maximum(R[:, :-1] - R[:, 1:], 0), lambda i: i)

    # adjoint property, indices (x, y, z): x & z <= y  <=>  z <= x -> y
    xz = C[:, None, :]
    y = v[None, :, None]
    r = R[:, :, None]
    z = v[None, None, :]
    bad_le = np.where(z <= r, np.maximum(xz - y, 0), 0)
    bad_ge = np.where(xz <= y, np.maximum(z - r, 0), 0)
    record("adjunction", np.maximum(bad_le, bad_ge), lambda i: i)
    return LawReport(str(t), grid_n, bool(exact), violations, witnesses)
