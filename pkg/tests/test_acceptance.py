"""Acceptance criteria 1-13, one pass/fail line each."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from qdomain import FiniteQOrder, ParamStructure
from qdomain.approach import (
    ApproachTable,
    check_approach_axioms,
    closure_axiom_violations,
    closure_of_indicator,
    grid_vectors,
    k_distance,
    kappa_family,
    subset_mask,
    zeta,
)
from qdomain.domain import (
    IrreducibilityOracle,
    check_continuity,
    check_interpolation,
    forward_cauchy_by_ideal,
    is_compact,
    way_below_finite,
)
from qdomain.order import check_complete, check_q_order
from qdomain.scott import (
    COUNTEREXAMPLE,
    POSITIVE,
    classify_injectivity,
    scott_closure,
    sigma_product_check,
    sobriety_witness,
    verify_certificate,
)
from qdomain.tnorm import classify, verify_quantale_laws

from conftest import S_SPECS, SPECS

pytestmark = pytest.mark.acceptance

ALL = ("godel", "lukasiewicz", "product", "luk_low_half", "luk_interior")


def test_criterion_01_quantale_laws(criterion):
    worst = {}
    ok = True
    for name in ALL:
        t = SPECS[name]
        rep = verify_quantale_laws(t, 100)
        worst[name] = rep.max_violation
        if rep.exact:
            ok &= rep.max_violation == 0
        else:
            ok &= rep.max_violation <= 1e-9
        if name in ("godel", "lukasiewicz"):
            ok &= rep.exact
    detail = ", ".join(f"{k}={float(v):.1e}" for k, v in worst.items())
    assert criterion(1, ok, f"quantale laws at grid 100: {detail}")


def _idempotent_samples(t, rng, m):
    intervals = t.idempotent_intervals()
    lens = np.array([b - a for a, b in intervals])
    # degenerate intervals (single idempotents) still get picked
    weights = lens + 0.05
    picks = rng.choice(len(intervals), size=m, p=weights / weights.sum())
    u = rng.random(m)
    return np.array([intervals[i][0] + u[k] * (intervals[i][1] - intervals[i][0])
                     for k, i in enumerate(picks)])


def test_criterion_02_idempotent_proposition(criterion):
    rng = np.random.default_rng(2)
    bad = 0
    for name in ALL:
        t = SPECS[name]
        p = _idempotent_samples(t, rng, 10_000)
        x = p * rng.random(p.size)
        y = p + (1 - p) * rng.random(p.size)
        bad += int((t.conj_array(x, y) != np.minimum(x, y)).sum())
        strict = x < p
        bad += int((t.residuum_array(y[strict], x[strict]) != x[strict]).sum())
        assert (t.conj_array(p, p) == p).all()
    assert criterion(2, bad == 0, f"10^4 triples per spec, {bad} mismatches")


def test_criterion_03_classifier(criterion):
    expected = {"godel": (True, False), "product": (True, True),
                "lukasiewicz": (True, True), "luk_interior": (False, False)}
    got = {k: (classify(SPECS[k]).satisfies_condition_s, classify(SPECS[k]).archimedean) for k in expected}
    assert criterion(3, got == expected, f"(S, archimedean) = {got}")


def _random_snapshots(rng, count):
    out = []
    names = ("godel", "lukasiewicz", "product", "luk_low_half", "luk_interior")
    while len(out) < count:
        t = SPECS[names[rng.integers(len(names))]]
        shape = ("alphaL", "alphaR")[rng.integers(2)]
        n = int(rng.integers(1, 9))
        X = ParamStructure(t, shape).grid_snapshot(n)
        size = int(rng.integers(2, min(5, n + 1) + 1))
        inner = rng.choice(np.arange(1, n), size=size - 2, replace=False) if size > 2 else []
        X = X.subset(sorted({0, n, *map(int, inner)}))
        if X.is_separated() and check_complete(X).complete:
            out.append(X)
    return out


def test_criterion_04_finite_way_below(criterion):
    rng = np.random.default_rng(4)
    snaps = _random_snapshots(rng, 20)
    worst = max(float(np.abs(way_below_finite(X).w - X.alpha).max()) for X in snaps)
    sizes = sorted({len(X) for X in snaps})
    assert criterion(4, worst <= 1e-9, f"20 snapshots, sizes {sizes}, max |w - alpha| = {worst:.1e}")


def test_criterion_05_continuity(criterion):
    right = {k: check_continuity(ParamStructure(SPECS[k], "alphaR"), 64) for k in ALL}
    left = {k: check_continuity(ParamStructure(SPECS[k], "alphaL"), 64) for k in ALL}
    ok = all(r.is_continuous_lattice and r.chacl_agreement for r in right.values())
    ok &= all(left[k].is_continuous_lattice and left[k].chacl_agreement for k in S_SPECS)
    bad = left["luk_interior"]
    w = bad.witness or {}
    ok &= not bad.is_continuous_lattice and bad.chacl_agreement
    ok &= 0.25 < w.get("t", 0) < 0.5 and w.get("p") == 0.25
    ok &= w.get("meet", 1) <= 0.25 + 1 / 64 and w.get("hom", 0) >= 0.35 - 1e-9
    assert criterion(5, ok, f"alphaR all continuous; alphaL fails only for L@[0.25,0.5] with witness {w}")


def test_criterion_06_compactness(criterion):
    pts = [i / 64 for i in range(65)]
    ok = True
    for name in ("lukasiewicz", "product"):
        S = ParamStructure(SPECS[name], "alphaR")
        # 0 is the top element of the alphaR order
        ok &= all(is_compact(S, a, 64) for a in pts if a != 0)
    G = ParamStructure(SPECS["godel"], "alphaR")
    inner = [a for a in pts if 0 < a < 1]
    ok &= not any(is_compact(G, a, 64) for a in inner)
    ok &= all(G.d_map(a, a) == a and G.hom(a, a) == 1 for a in inner)
    assert criterion(6, ok, "L and product compact off the top; Godel fails at every idempotent in (0,1)")


def test_criterion_07_interpolation(criterion):
    reps = {k: check_interpolation(ParamStructure(SPECS[k], "alphaR"), 100) for k in ALL}
    ok = all(r.passed for r in reps.values())
    detail = ", ".join(f"{k}: excess {r.max_excess:.1e} deficit {r.max_deficit:.1e}" for k, r in reps.items())
    assert criterion(7, ok, f"n=100, {detail}")


def _random_order(rng, t, n):
    A = np.maximum(rng.integers(0, 5, (n, n)) / 4, np.eye(n))
    while True:
        B = np.maximum(A, t.compose(A, A))
        if np.array_equal(A, B):
            return FiniteQOrder(t, A)
        A = B


def test_criterion_08_gamma_round_trips(criterion):
    rng = np.random.default_rng(8)
    ok = True
    worst = {}
    for k in range(20):
        t = SPECS[("godel", "lukasiewicz")[k % 2]]
        n = int(rng.integers(2, 7))
        T = ApproachTable.gamma(_random_order(rng, t, n)).exact()
        ok &= check_approach_axioms(T).valid
        fam = kappa_family(T, 1 if n > 4 else 2)
        ok &= bool((zeta(fam, n, t, exact=True).delta == T.delta).all())
        for A in range(1, 1 << n):
            members = [i for i in range(n) if A >> i & 1]
            ok &= bool((closure_of_indicator(T, members) == T.delta[:, A]).all())
        vecs = list(grid_vectors(n, 1, exact=True))[:16] + [T.delta[:, A] for A in range(1, 1 << n, 3)]
        out = closure_axiom_violations(T, vecs, [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
        for key, v in out.items():
            worst[key] = max(worst.get(key, 0), v)
    ok &= all(v == 0 for v in worst.values())
    assert criterion(8, ok, f"20 Gamma tables, exact; closure axiom maxima {dict((k, str(v)) for k, v in worst.items())}")


def _non_alexandroff_tables():
    """Tables with delta(x, A) above every singleton value: not recoverable from singletons."""
    out = []
    for t, vals in ((SPECS["godel"], (0.9, 0.2, 0.3)), (SPECS["lukasiewicz"], (0.8, 0.25, 0.5)),
                    (SPECS["godel"], (1.0, 0.0, 0.0)), (SPECS["lukasiewicz"], (0.75, 0.5, 0.25)),
                    (SPECS["godel"], (0.6, 0.5, 0.5))):
        big, a, b = vals
        X = FiniteQOrder(t, [[1, a, b], [0, 1, 0], [0, 0, 1]])
        delta = ApproachTable.gamma(X).delta.copy()
        delta[0, subset_mask([1, 2])] = big
        delta[0, subset_mask([0, 1, 2])] = 1
        out.append(ApproachTable(t, delta))
    return out


@pytest.mark.xfail(strict=True, reason="on a finite set the union axiom forces delta = Gamma(Omega(delta)); "
                                        "non-Alexandroff tables do not exist (see notes/decisions.md)")
def test_criterion_08_non_alexandroff_tables(criterion):
    results = []
    for T in _non_alexandroff_tables():
        n = len(T)
        back = zeta(kappa_family(T, 4), n, T.tnorm)
        results.append(bool(np.allclose(back.delta, T.delta)) and check_approach_axioms(T).valid)
    ok = all(results)
    criterion("8b", ok, f"5 hand-built non-Alexandroff tables: round trip {results} "
                        f"(union axiom violated: {[not check_approach_axioms(T).valid for T in _non_alexandroff_tables()]})")
    assert ok


def test_criterion_09_sigma_alpha_r_is_k(criterion):
    worst = 0.0
    count = 0
    for name in ("godel", "lukasiewicz"):
        t = SPECS[name]
        X = ParamStructure(t, "alphaR").grid_snapshot(16)
        tab = way_below_finite(X)
        pts = [i / 16 for i in range(17)]
        for r in (1, 2, 3):
            for A in itertools.combinations(range(17), r):
                ind = X.alpha[:, list(A)].max(axis=1)
                cl = scott_closure(X, ind, table=tab, checked=True)
                k = np.array([k_distance(t, x, [pts[a] for a in A]) for x in pts])
                worst = max(worst, float(np.abs(cl - k).max()))
                count += 1
    assert criterion(9, worst <= 1 / 16, f"{count} subsets, max |sigma_delta - delta_K| = {worst:.1e} (bound 1/16)")


def test_criterion_10_sobriety(criterion):
    X = ParamStructure(SPECS["godel"], "alphaR").grid_snapshot(16)
    hits = []
    for b in range(len(X)):
        sw = sobriety_witness(X, X.alpha[:, b], grid_n=2)
        hits.append(sw.valid and sw.sup_point == b)
    assert criterion(10, all(hits), f"{sum(hits)}/{len(hits)} representable closed sets recovered their point "
                                    f"(irreducibility probed at resolution 2)")


def test_criterion_11_sigma_product(criterion):
    gaps = {}
    ok = True
    for name in ("godel", "lukasiewicz"):
        t = SPECS[name]
        for label, X in (("2-chain", FiniteQOrder(t, [[1, 1], [0, 1]])),
                         ("alphaR n=2", ParamStructure(t, "alphaR").grid_snapshot(2))):
            rep = sigma_product_check(X, 2, 1e-9)
            ok &= rep.passed
            gaps[f"{name} {label}"] = rep.max_gap
    assert criterion(11, ok, f"k=2 table gaps {gaps}")


def test_criterion_12_injectivity(criterion):
    verdicts = {k: classify_injectivity(SPECS[k], 100) for k in ("lukasiewicz", "godel", "product", "luk_interior")}
    luk = verdicts["lukasiewicz"]
    ok = luk.verdict == POSITIVE and luk.certificate["max_deviation"] == 0
    for k in ("godel", "product"):
        c = verdicts[k].certificate
        ok &= verdicts[k].verdict == COUNTEREXAMPLE and c["chain_holds"]
    g = verdicts["godel"].certificate
    ok &= g["subspace"] == [0.0, 1.0] and g["sup_bound"] == 0 and len(g["trace"]) == 99
    ok &= all(SPECS["godel"].residuum(e["x"], 0) == 0 for e in g["trace"])
    li = verdicts["luk_interior"]
    ok &= li.verdict == COUNTEREXAMPLE and li.certificate["witness"]["t"] == pytest.approx(0.4)
    replays = {k: verify_certificate(v.to_dict()) for k, v in verdicts.items()}
    ok &= all(r == (verdicts[k].verdict, True) for k, r in replays.items())
    detail = ", ".join(f"{k}: {v.verdict}" for k, v in verdicts.items())
    assert criterion(12, ok, f"{detail}; all certificates replay")


def _all_tables(n, values):
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    for combo in itertools.product(values, repeat=len(off)):
        A = np.eye(n)
        for (i, j), v in zip(off, combo):
            A[i, j] = v
        yield A


def test_criterion_13_forward_cauchy_cross_validation(criterion):
    values = (0.0, 1 / 3, 2 / 3, 1.0)
    structures = weights = disagreements = 0
    for name in ("lukasiewicz", "godel"):
        t = SPECS[name]
        for n in (1, 2, 3):
            for A in _all_tables(n, values):
                if not check_q_order(A, t).valid:
                    continue
                X = FiniteQOrder(t, A)
                oracle = IrreducibilityOracle(X, 3)
                irreducible = oracle.irreducible_mask()
                structures += 1
                for phi, irr in zip(oracle.weights, irreducible):
                    v = oracle.inhabited(phi) and irr
                    weights += 1
                    if bool(v) != forward_cauchy_by_ideal(X, phi).forward_cauchy:
                        disagreements += 1
    assert criterion(13, disagreements == 0,
                     f"{structures} structures, {weights} grid weights, {disagreements} disagreements")
