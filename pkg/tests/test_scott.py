import itertools
import json

import numpy as np
import pytest

from qdomain import FiniteQOrder, InputError, ParamStructure, QMap, TNorm
from qdomain.approach import ApproachTable, k_distance
from qdomain.domain import grid_weights, way_below_finite
from qdomain.scott import (
    COUNTEREXAMPLE,
    INCONCLUSIVE,
    POSITIVE,
    NotContinuous,
    PreconditionError,
    approach_continuous,
    classify_injectivity,
    is_scott_closed,
    scott_closure,
    scott_continuous,
    sigma_delta,
    sigma_product_check,
    sigma_table,
    sobriety_witness,
    verify_certificate,
)

from conftest import SPECS


def snap(name, n, shape="alphaR", exact=False):
    return ParamStructure(SPECS[name], shape).grid_snapshot(n, exact=exact)


def chain2(t):
    return FiniteQOrder(t, [[1, 1], [0, 1]], ["a", "b"])


# -- Scott closed weights --------------------------------------------------------


def test_representables_scott_closed(luk):
    X = snap("lukasiewicz", 3)
    assert all(is_scott_closed(X, X.alpha[:, a]).closed for a in range(len(X)))


def test_every_weight_closed_on_finite_snapshot():
    X = snap("godel", 2)
    for phi in grid_weights(X, 4):
        assert is_scott_closed(X, phi).closed


def test_parametric_non_closed_weight_has_witness(godel):
    S = ParamStructure(godel, "alphaR")
    # d(0.5) is forward Cauchy with supremum 0.5 but is not Scott closed
    res = is_scott_closed(S, lambda x: x if x <= 0.5 else 1.0, 16)
    assert not res.closed
    assert res.witness == {"family": "d", "c": 0.5}
    assert is_scott_closed(S, lambda x: S.hom(x, 0.5), 16).closed


# -- closure and distances -------------------------------------------------------


def test_closure_is_identity_and_idempotent_on_snapshot():
    X = snap("lukasiewicz", 2)
    for phi in grid_weights(X, 4):
        cl = scott_closure(X, phi)
        assert np.allclose(cl, phi)
        assert np.allclose(scott_closure(X, cl), cl)


def test_closure_agrees_with_brute_force_meet():
    X = snap("godel", 2)
    closed = [phi for phi in grid_weights(X, 4) if is_scott_closed(X, phi).closed]
    for phi in grid_weights(X, 2):
        above = [c for c in closed if (c >= phi - 1e-12).all()]
        assert np.allclose(scott_closure(X, phi), np.min(above, axis=0))


def test_closure_requires_continuity(godel):
    X = FiniteQOrder(godel, np.eye(2), ["a", "b"])
    with pytest.raises(NotContinuous):
        scott_closure(X, np.zeros(2))


def test_sigma_delta_singletons_and_empty():
    X = snap("lukasiewicz", 4)
    for x, a in itertools.product(X.elements, X.elements):
        assert sigma_delta(X, x, [a]) == pytest.approx(X.hom(x, a))
    assert sigma_delta(X, "0.5", []) == 0


def test_sigma_delta_parametric_godel(godel):
    S = ParamStructure(godel, "alphaR")
    assert sigma_delta(S, 0.8, [0.5], 16) == 1


@pytest.mark.parametrize("name", ["godel", "lukasiewicz"])
def test_sigma_delta_matches_k(name):
    X = snap(name, 4)
    pts = [i / 4 for i in range(5)]
    for x in range(5):
        for A in itertools.combinations(range(5), 2):
            got = sigma_delta(X, X.elements[x], [X.elements[a] for a in A])
            assert got == pytest.approx(k_distance(SPECS[name], pts[x], [pts[a] for a in A]))


def test_finite_collapse_to_gamma():
    X = snap("lukasiewicz", 3, exact=True)
    assert (sigma_table(X).delta == ApproachTable.gamma(X).delta).all()


def test_specialization_of_sigma_is_x():
    X = snap("godel", 3)
    assert np.array_equal(sigma_table(X).specialization().alpha, X.alpha)


def test_strong_cotopology():
    X = snap("godel", 2)
    tn = X.tnorm
    fam = grid_weights(X, 4)
    closed = lambda v: is_scott_closed(X, v).closed
    for a, b in itertools.combinations(fam, 2):
        assert closed(np.maximum(a, b)) and closed(np.minimum(a, b))
    for a in fam:
        for p in (0.25, 0.5, 0.75):
            pv = np.full(len(X), p)
            assert closed(tn.residuum_array(pv, a))
            assert closed(tn.conj_array(pv, a))
    assert closed(np.zeros(len(X))) and closed(np.ones(len(X)))


@pytest.mark.parametrize("name", ["godel", "lukasiewicz"])
def test_basis_lemma(name):
    X = snap(name, 2)
    w = way_below_finite(X).w
    for phi in grid_weights(X, 4):
        rebuilt = X.tnorm.residuum_array(w, phi[:, None]).min(axis=0)
        assert np.allclose(rebuilt, phi)


def test_scott_continuity_matches_approach_continuity():
    X = snap("godel", 2)
    Y = chain2(SPECS["godel"])
    TX, TY = sigma_table(X), sigma_table(Y)
    seen = set()
    for assignment in itertools.product(Y.elements, repeat=len(X)):
        f = QMap(X, Y, list(assignment))
        verdict = scott_continuous(f)
        seen.add(verdict)
        assert verdict == approach_continuous(f, TX, TY)
    assert seen == {True, False}


# -- sobriety --------------------------------------------------------------------


def test_sobriety_representable(godel):
    X = snap("godel", 8)
    for b in range(len(X)):
        sw = sobriety_witness(X, X.alpha[:, b], grid_n=2)
        assert sw.valid and sw.sup_point == b
        assert sw.resolution == 2


def test_sobriety_every_irreducible_closed_set_representable():
    for name in ("godel", "lukasiewicz"):
        X = snap(name, 2)
        checked = 0
        # the 1/6 grid holds the representables and weights off the 1/2 grid
        for lam in grid_weights(X, 6):
            try:
                sw = sobriety_witness(X, lam, grid_n=6)
            except PreconditionError:
                continue
            checked += 1
            assert sw.valid
        assert checked == len(X)


def test_sobriety_not_inhabited(godel):
    X = snap("godel", 2)
    with pytest.raises(PreconditionError):
        sobriety_witness(X, np.full(3, 0.5))


# -- products --------------------------------------------------------------------


def test_sigma_product_k1():
    assert sigma_product_check(snap("godel", 3), 1).passed


@pytest.mark.parametrize("name", ["godel", "lukasiewicz"])
def test_sigma_product_chain_and_grid(name):
    assert sigma_product_check(chain2(SPECS[name]), 2).passed
    rep = sigma_product_check(snap(name, 2), 2)
    assert rep.passed and rep.max_gap <= 1e-9 and rep.decomposition_ok


def test_sigma_product_size_bound():
    with pytest.raises(InputError):
        sigma_product_check(snap("godel", 4), 2)


# -- injectivity -----------------------------------------------------------------


def test_lukasiewicz_positive(luk):
    v = classify_injectivity(luk)
    assert v.verdict == POSITIVE
    assert v.certificate["max_deviation"] == 0
    assert v.certificate["negation_is_1_minus_x"]


@pytest.mark.parametrize("name", ["godel", "product"])
def test_counterexample_at_endpoints(name):
    v = classify_injectivity(SPECS[name])
    c = v.certificate
    assert v.verdict == COUNTEREXAMPLE
    assert c["subspace"] == [0.0, 1.0]
    assert c["sup_bound"] == 0 and c["chain_holds"]
    assert all(e["bound"] == 0 for e in c["trace"])


def test_counterexample_after_lukasiewicz_piece():
    v = classify_injectivity(SPECS["luk_low_half"])
    assert v.verdict == COUNTEREXAMPLE
    assert v.certificate["subspace"] == [0.5, 1.0]


def test_non_s_counterexample_uses_continuity_witness():
    v = classify_injectivity(SPECS["luk_interior"])
    assert v.verdict == COUNTEREXAMPLE
    assert v.certificate["kind"] == "alphaL-not-continuous"
    assert v.certificate["witness"]["t"] == pytest.approx(0.4)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_certificates_replay(name):
    v = classify_injectivity(SPECS[name])
    payload = json.loads(json.dumps(v.to_dict()))
    assert verify_certificate(payload) == (v.verdict, True)


def test_tampered_certificate_fails_replay():
    payload = json.loads(json.dumps(classify_injectivity(SPECS["godel"]).to_dict()))
    payload["certificate"]["trace"][0]["bound"] = 0.7
    assert verify_certificate(payload)[1] is False
    payload = json.loads(json.dumps(classify_injectivity(SPECS["lukasiewicz"]).to_dict()))
    payload["tnorm"] = TNorm.godel().to_dict()
    assert verify_certificate(payload) == (INCONCLUSIVE, False)
