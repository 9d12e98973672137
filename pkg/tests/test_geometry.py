import random
from fractions import Fraction

import pytest

from arbcone.cones import Functional, NotPlasterableError, PolyhedralCone, base_of
from arbcone.generate import random_market, random_pointed_instance
from arbcone.geometry import (
    BP,
    C1,
    C3,
    C4,
    InternalConsistencyError,
    MartingaleMeasure,
    base_distance,
    certify_market,
    dual_decompose,
    dual_sum_is_full,
    equivalence_report,
    martingale_functional,
    no_arbitrage,
    positively_separated,
    sample_positive_separation,
    to_martingale_measure,
    verify_decomposition,
    verify_intersection,
    verify_martingale_functional,
)
from arbcone.market import GainsMatrix, discounted_gains, strategy_subspace
from arbcone.space import ScenarioSpace, Subspace

F = Fraction
HALVES = ScenarioSpace((F(1, 2), F(1, 2)))
K = PolyhedralCone.orthant(HALVES)
L_FAIR = Subspace(((1, F(-1, 2)),), HALVES)
L_ARB = Subspace(((1, F(1, 2)),), HALVES)
L_ZERO = Subspace.zero(HALVES)


def test_no_arbitrage_examples():
    assert no_arbitrage(L_FAIR, K).holds
    v = no_arbitrage(L_ARB, K)
    assert not v.holds
    assert v.certificate["gain"] == (1, F(1, 2))
    assert verify_intersection(L_ARB, K, v.certificate)
    assert no_arbitrage(L_ZERO, K).holds


def test_no_arbitrage_full_space():
    full = Subspace(((1, 0), (0, 1)), HALVES)
    assert not no_arbitrage(full, K).holds


def test_no_arbitrage_non_pointed_cone():
    R3 = ScenarioSpace.unit(3)
    cone = PolyhedralCone(R3, ((1, 0, 0), (-1, 0, 0), (0, 1, 0)))
    assert no_arbitrage(Subspace(((0, 0, 1),), R3), cone).holds
    v = no_arbitrage(Subspace(((1, 0, 1),), R3), cone)
    assert v.holds  # (1,0,1) leaves the cone through its third coordinate
    w = no_arbitrage(Subspace(((3, 0, 0),), R3), cone)
    assert not w.holds and verify_intersection(Subspace(((3, 0, 0),), R3), cone, w.certificate)


def _edge_distance_oracle(L_vec, steps=60):
    """Grid over the base edge; for fixed x the best multiple of L_vec sits at a breakpoint."""
    p = HALVES.weights
    best = None
    for i in range(steps + 1):
        mu = F(i, steps)
        x = (2 * mu, 2 * (1 - mu))
        cands = [x[w] / L_vec[w] for w in range(2) if L_vec[w] != 0]
        for a in cands:
            d = sum(pw * abs(xw - a * lw) for pw, xw, lw in zip(p, x, L_vec))
            best = d if best is None else min(best, d)
    return best


def test_base_distance_fair():
    v = base_distance(base_of(K), L_FAIR)
    assert v.holds
    assert v.value == _edge_distance_oracle((1, F(-1, 2))) == F(1, 2)
    x, w = v.certificate["x"], v.certificate["v"]
    assert HALVES.norm(tuple(a - b for a, b in zip(x, w))) == v.value
    assert L_FAIR.contains(w)


def test_base_distance_arbitrage():
    v = base_distance(base_of(K), L_ARB)
    assert not v.holds and v.value == 0
    assert v.certificate["x"] == v.certificate["v"] == (F(4, 3), F(2, 3))


def test_base_distance_rescaled_base():
    F_scaled = base_of(K.rescaled([F(3), F(1, 5)]))
    assert base_distance(F_scaled, L_FAIR).holds
    assert not base_distance(F_scaled, L_ARB).holds


def test_martingale_functional_examples():
    v = martingale_functional(L_FAIR, K)
    assert v.holds
    psi = v.certificate["psi"].coefficients
    assert psi[1] == 2 * psi[0]  # proportional to (2/3, 4/3)
    assert verify_martingale_functional(L_FAIR, K, v.certificate["psi"], v.value)
    assert not martingale_functional(L_ARB, K).holds
    z = martingale_functional(L_ZERO, K)
    assert z.holds and z.value == 1
    assert z.certificate["psi"].coefficients == (1, 1)


def test_to_martingale_measure():
    mm = to_martingale_measure(martingale_functional(L_FAIR, K), HALVES)
    assert mm.density == (F(2, 3), F(4, 3))
    assert mm.probabilities == (F(1, 3), F(2, 3))
    assert mm.expectation((2, F(1, 2))) == 1
    ident = to_martingale_measure(martingale_functional(L_ZERO, K), HALVES)
    assert ident.density == (1, 1) and ident.probabilities == HALVES.weights


def test_to_martingale_measure_rejections():
    with pytest.raises(ValueError):
        to_martingale_measure(martingale_functional(L_ARB, K), HALVES)
    bad = martingale_functional(L_ZERO, K)
    forged = type(bad)(C3, True, {"psi": Functional((1, 0), HALVES), "margin": F(1)}, F(1))
    with pytest.raises(ValueError):
        to_martingale_measure(forged, HALVES)
    other = PolyhedralCone(HALVES, ((1, 1), (1, -1)))
    with pytest.raises(ValueError):
        to_martingale_measure(martingale_functional(L_ZERO, other), HALVES)


def test_dual_decompose_examples():
    zero = Functional((0, 0), HALVES)
    dec = dual_decompose(zero, L_FAIR, K)
    assert dec is not None and verify_decomposition(zero, L_FAIR, K, dec)
    e1 = Functional((1, 0), HALVES)
    dec = dual_decompose(e1, L_FAIR, K)
    assert dec is not None and verify_decomposition(e1, L_FAIR, K, dec)
    assert dual_decompose(Functional((-1, -1), HALVES), L_ARB, K) is None


def test_dual_sum_examples():
    assert dual_sum_is_full(L_FAIR, K, True).holds
    assert dual_sum_is_full(L_FAIR, K, False).holds
    assert not dual_sum_is_full(L_ARB, K, True).holds
    assert not dual_sum_is_full(L_ARB, K, False).holds


def test_dual_sum_non_pointed():
    R3 = ScenarioSpace.unit(3)
    cone = PolyhedralCone(R3, ((1, 0, 0), (-1, 0, 0), (0, 1, 0)))
    L = Subspace(((0, 0, 1),), R3)
    assert not dual_sum_is_full(L, cone, True).holds
    bp = dual_sum_is_full(L, cone, False)
    assert bp.holds and "closed" in bp.certificate["closure"]
    for target, dec in bp.certificate["decompositions"]:
        assert verify_decomposition(Functional(target, R3), L, cone, dec, strict=False)


def test_positive_separation_examples():
    assert positively_separated(L_FAIR, K).holds
    v = positively_separated(L_ARB, K)
    assert not v.holds
    assert L_ARB.contains(v.certificate["point"])
    assert positively_separated(L_ZERO, K).holds


def test_positive_separation_needs_pointed_cone():
    cone = PolyhedralCone(ScenarioSpace.unit(2), ((1, 0), (-1, 0), (0, 1)))
    with pytest.raises(NotPlasterableError):
        positively_separated(Subspace.zero(cone.space), cone)


def test_sampled_separation_agrees_with_generator_probes():
    rng = random.Random(8)
    for _ in range(20):
        L, cone = random_pointed_instance(rng, max_dim=4, max_gens=4)
        ps = positively_separated(L, cone).holds
        weights = [[F(rng.randint(0, 3)) for _ in cone.generators] for _ in range(6)]
        weights = [w for w in weights if any(cone.combine(w))]
        hits = [hit for _, hit in sample_positive_separation(L, cone, weights)]
        if ps:
            assert not any(hits)


def test_equivalence_report_examples():
    fair = equivalence_report(L_FAIR, K)
    assert fair.agree and fair.arbitrage_free and len(fair.conditions) == 6
    arb = equivalence_report(L_ARB, K)
    assert arb.agree and not arb.arbitrage_free
    assert not any(v.holds for v in arb.conditions.values())
    par = equivalence_report(L_FAIR, K, parallel=True)
    assert {k: v.holds for k, v in par.conditions.items()} == {k: v.holds for k, v in fair.conditions.items()}


def test_equivalence_report_json_is_strings():
    js = equivalence_report(L_FAIR, K).to_json()
    assert js["agree"] is True
    assert js["conditions"]["C2"]["value"] == "1/2"
    assert js["certificates"]["C3"]["margin"] == "1/2"


def test_equivalence_non_pointed_restricted():
    R3 = ScenarioSpace.unit(3)
    cone = PolyhedralCone(R3, ((1, 0, 0), (-1, 0, 0), (0, 1, 0)))
    rep = equivalence_report(Subspace(((0, 0, 1),), R3), cone)
    assert set(rep.conditions) == {C1, BP}
    assert rep.notice and rep.agree


def test_random_instances_agree_and_certify():
    rng = random.Random(1234)
    for _ in range(40):
        L, cone = random_pointed_instance(rng)
        rep = equivalence_report(L, cone)
        c = rep.conditions
        if c[C1].holds:
            assert verify_martingale_functional(L, cone, c[C3].certificate["psi"], c[C3].value)
            for target, dec in c[C4].certificate["decompositions"]:
                assert verify_decomposition(Functional(target, cone.space), L, cone, dec)
        else:
            assert verify_intersection(L, cone, c[C1].certificate)


def test_distance_equals_margin():
    """Minimax duality: base distance and best annihilator margin coincide."""
    rng = random.Random(77)
    for _ in range(40):
        L, cone = random_pointed_instance(rng)
        assert base_distance(base_of(cone), L).value == martingale_functional(L, cone).value


def test_base_lower_bound_from_functional():
    rng = random.Random(78)
    for _ in range(30):
        L, cone = random_pointed_instance(rng)
        c3 = martingale_functional(L, cone)
        if not c3.holds:
            continue
        base = base_of(cone)
        psi = c3.certificate["psi"]
        assert all(psi(v) >= c3.value for v in base.vertices)
        assert base_distance(base, L).value > 0


def test_verdicts_invariant_under_rescaling():
    rng = random.Random(55)
    for _ in range(15):
        L, cone = random_pointed_instance(rng)
        a = equivalence_report(L, cone)
        L2 = L.rescaled([F(rng.randint(1, 7), rng.randint(1, 7)) for _ in L.vectors])
        K2 = cone.rescaled([F(rng.randint(1, 7), rng.randint(1, 7)) for _ in cone.generators])
        b = equivalence_report(L2, K2)
        assert {k: v.holds for k, v in a.conditions.items()} == {k: v.holds for k, v in b.conditions.items()}


def test_equivalence_strict_raises_on_disagreement(monkeypatch):
    import arbcone.geometry as geo

    monkeypatch.setattr(geo, "no_arbitrage", lambda L, K: geo.ConditionVerdict(C1, False))
    with pytest.raises(InternalConsistencyError):
        geo.equivalence_report(L_FAIR, K)
    assert not geo.equivalence_report(L_FAIR, K, strict=False).agree


def test_martingale_pricing_identity():
    rng = random.Random(31)
    found = 0
    for _ in range(60):
        mkt = random_market(rng, rng.randint(1, 4), rng.randint(1, 6))
        cert = certify_market(mkt)
        if not cert.arbitrage_free:
            continue
        found += 1
        mm: MartingaleMeasure = cert.measure
        assert sum(mm.probabilities) == 1
        assert all(q >= mm.margin > 0 for q in mm.density)
        for price, row in zip(mkt.prices, mkt.payoffs):
            assert mm.expectation(tuple(s / (1 + mkt.interest_rate) for s in row)) == price
        for y in discounted_gains(mkt).rows:
            assert mm.expectation(y) == 0
    assert found > 10


def test_zero_market_gives_reference_measure():
    space = ScenarioSpace((F(1, 4), F(3, 4)))
    L = strategy_subspace(GainsMatrix(((0, 0),), space))
    assert L.rank == 0
    mm = to_martingale_measure(martingale_functional(L, PolyhedralCone.orthant(space)), space)
    assert mm.probabilities == space.weights


def test_mismatched_spaces():
    other = Subspace(((1, 0, 0),), ScenarioSpace.unit(3))
    for fn in (no_arbitrage, martingale_functional, positively_separated):
        with pytest.raises(ValueError):
            fn(other, K)
    with pytest.raises(ValueError):
        base_distance(base_of(K), other)
    with pytest.raises(ValueError):
        dual_sum_is_full(other, K, True)
