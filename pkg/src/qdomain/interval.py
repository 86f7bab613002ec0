"""The unit interval as a [0,1]-ordered set, in closed form.

Shapes:

* ``alphaL``: ``hom(x, y) = x -> y``
* ``alphaR``: ``hom(x, y) = y -> x``
* ``xinf``:   ``[0,1]`` with ``alphaL`` plus an extra point ``INF`` that is
  below ``1`` only
* ``power:<shape>:<k>``: ``k``-fold product, ``hom`` is the coordinatewise meet

``d_map(S, t, x)`` evaluates the left adjoint ``d(t)`` of the supremum map at
``x``.  The open-range suprema in its definition are resolved by their
one-sided limits inside each t-norm piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .order import FiniteQOrder, InputError, product
from .tnorm import LUKASIEWICZ, TNorm

INF = math.inf
INF_LABEL = "inf"

ALPHA_L = "alphaL"
ALPHA_R = "alphaR"
XINF = "xinf"
BASE_SHAPES = (ALPHA_L, ALPHA_R, XINF)


@dataclass(frozen=True)
class Power:
    base: str
    k: int

    def __post_init__(self):
        if self.base not in BASE_SHAPES:
            raise InputError(f"unknown base shape {self.base!r}")
        if self.k < 1:
            raise InputError("power index count must be positive")

    def __str__(self):
        return f"power:{self.base}:{self.k}"


def parse_shape(text):
    """``alphaL`` | ``alphaR`` | ``xinf`` | ``power:<shape>:<k>``."""
    if isinstance(text, Power) or text in BASE_SHAPES:
        return text
    parts = str(text).split(":")
    if len(parts) == 3 and parts[0] == "power":
        try:
            return Power(parts[1], int(parts[2]))
        except ValueError as exc:
            raise InputError(f"bad power shape {text!r}: {exc}") from None
    raise InputError(f"unknown shape {text!r}; expected alphaL, alphaR, xinf or power:<shape>:<k>")


def _one_like(*vals):
    return Fraction(1) if any(isinstance(v, Fraction) for v in vals) else 1.0


def _is_inf(v):
    return isinstance(v, float) and math.isinf(v)


@dataclass(frozen=True)
class ParamStructure:
    tnorm: TNorm
    shape: object

    def __post_init__(self):
        object.__setattr__(self, "shape", parse_shape(self.shape))

    def __str__(self):
        return f"{self.shape}[{self.tnorm}]"

    @property
    def is_power(self):
        return isinstance(self.shape, Power)

    @property
    def base(self):
        return ParamStructure(self.tnorm, self.shape.base) if self.is_power else self

    # -- hom ----------------------------------------------------------------

    def _check_point(self, v):
        if _is_inf(v):
            if self.shape != XINF:
                raise InputError(f"the point {INF_LABEL} only exists in the xinf shape")
            return
        if not 0 <= v <= 1:
            raise InputError(f"point {v!r} is outside [0, 1]")

    def hom(self, x, y):
        if self.is_power:
            xs, ys = tuple(x), tuple(y)
            if len(xs) != self.shape.k or len(ys) != self.shape.k:
                raise InputError(f"points of {self.shape} need {self.shape.k} coordinates")
            b = self.base
            return min(b.hom(a, c) for a, c in zip(xs, ys))
        self._check_point(x)
        self._check_point(y)
        t = self.tnorm
        if self.shape == ALPHA_L:
            return t.residuum(x, y)
        if self.shape == ALPHA_R:
            return t.residuum(y, x)
        # xinf
        if _is_inf(x) and _is_inf(y):
            return _one_like(x, y)
        if _is_inf(y):
            return 0 * _one_like(x)
        if _is_inf(x):
            return y
        return t.residuum(x, y)

    # -- way-below closed forms ---------------------------------------------

    def d_map(self, t, x):
        """``d(t)(x)``, which equals the way-below value ``w(x, t)``."""
        if self.is_power:
            raise InputError("d_map is not defined for power shapes; use domain.way_below_power")
        self._check_point(t)
        self._check_point(x)
        if self.shape == ALPHA_R:
            return _d_alpha_r(self.tnorm, t, x)
        if self.shape == ALPHA_L:
            return _d_alpha_l(self.tnorm, t, x)
        return _d_xinf(self.tnorm, t, x)

    # -- grids --------------------------------------------------------------

    def grid_points(self, n, exact=False):
        if n < 1:
            raise InputError("grid subdivision must be at least 1")
        if exact:
            pts = [Fraction(i, n) for i in range(n + 1)]
        else:
            pts = [i / n for i in range(n + 1)]
        if self.shape == XINF or (self.is_power and self.shape.base == XINF):
            pts.append(INF)
        return pts

    def hom_table(self, points, targets=None):
        targets = points if targets is None else targets
        exact = any(isinstance(p, Fraction) for p in points)
        out = np.empty((len(points), len(targets)), dtype=object if exact else np.float64)
        for i, a in enumerate(points):
            for j, b in enumerate(targets):
                out[i, j] = self.hom(a, b)
        return out

    def d_table(self, points, sources=None):
        """``W[i, j] = d(points[j])(sources[i]) = w(sources[i], points[j])``."""
        sources = points if sources is None else sources
        exact = any(isinstance(p, Fraction) for p in points)
        out = np.empty((len(sources), len(points)), dtype=object if exact else np.float64)
        for j, t in enumerate(points):
            for i, x in enumerate(sources):
                out[i, j] = self.d_map(t, x)
        return out

    def grid_snapshot(self, n, exact=False):
        if self.is_power:
            return product([self.base.grid_snapshot(n, exact)] * self.shape.k)
        pts = self.grid_points(n, exact)
        return FiniteQOrder(self.tnorm, self.hom_table(pts), [point_label(p) for p in pts])

    def bottom(self):
        """Bottom of the underlying order, or None (``xinf`` has none)."""
        shape = self.shape.base if self.is_power else self.shape
        if shape == ALPHA_L:
            return 0.0
        if shape == ALPHA_R:
            return 1.0
        return None

    def way_below_underlying(self, y, x):
        """``y << x`` in the underlying order (a chain for alphaL/alphaR)."""
        if self.shape == ALPHA_L:
            return y < x or y == 0
        if self.shape == ALPHA_R:
            return y > x or y == 1
        raise InputError("the underlying order of xinf is not a continuous lattice")


def point_label(p):
    if _is_inf(p):
        return INF_LABEL
    if isinstance(p, Fraction):
        return str(p)
    return f"{p:g}"


def parse_point(text):
    if str(text).strip().lower() in (INF_LABEL, "∞", "infinity"):
        return INF
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse point {text!r}") from None


def _piece_formula_res(p, lo, hi, x, y):
    if p.kind == LUKASIEWICZ:
        return hi - x + y
    return lo + (hi - lo) * (y - lo) / (x - lo)


def _d_alpha_r(tn, t, x):
    # d(t)(x) = sup_{b > t} (b -> x), the right limit at t
    if t == 1:
        return tn.residuum(t, x)
    if x > t:
        return _one_like(t, x)
    for p in tn.pieces:
        lo, hi = tn._piece_bounds(p, t, x)
        if lo <= x <= t < hi:
            if p.kind != LUKASIEWICZ and x == lo:
                return x
            return _piece_formula_res(p, lo, hi, t, x)
    return x


def _d_alpha_l(tn, t, x):
    # d(t)(x) = sup_{b < t} (x -> b), the left limit at t
    if t == 0:
        return tn.residuum(x, t)
    if x < t:
        return _one_like(t, x)
    for p in tn.pieces:
        lo, hi = tn._piece_bounds(p, t, x)
        if lo < t <= x < hi:
            return _piece_formula_res(p, lo, hi, x, t)
    return t


def _d_xinf(tn, t, x):
    if _is_inf(t):
        return _one_like(x) if _is_inf(x) else 0 * _one_like(x)
    if _is_inf(x):
        # X(inf, y) = y, so the join over y < t (or y = 0 when t = 0) is t
        return t
    return _d_alpha_l(tn, t, x)


def hom(S, x, y):
    return S.hom(x, y)


def d_map(S, t, x):
    return S.d_map(t, x)


def grid_snapshot(S, n, exact=False):
    return S.grid_snapshot(n, exact)
