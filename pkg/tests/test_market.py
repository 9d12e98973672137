import json
import random
from fractions import Fraction

import pytest
from conftest import market_doc
from hypothesis import given, settings
from hypothesis import strategies as st

from arbcone.cones import PolyhedralCone
from arbcone.generate import random_market
from arbcone.geometry import no_arbitrage
from arbcone.market import (
    MarketError,
    MarketSpec,
    Portfolio,
    discounted_gains,
    parse_market,
    portfolio_report,
    strategy_subspace,
)

F = Fraction


def test_parse_worked_example(fair_market):
    assert fair_market.num_assets == 1
    assert fair_market.num_scenarios == 2
    assert fair_market.payoffs == ((2, F(1, 2)),)
    assert fair_market.space.weights == (F(1, 2), F(1, 2))


def test_parse_accepts_text():
    doc = json.dumps(market_doc([["2", "1/2"]]))
    assert parse_market(doc).prices == (1,)


@pytest.mark.parametrize(
    "mutate, path, message",
    [
        (lambda d: d["scenarios"][0].update(probability="0"), "scenarios[0].probability", "probability must be positive"),
        (lambda d: d.update(interest_rate="-1"), "interest_rate", "interest rate must exceed -1"),
        (lambda d: d["scenarios"][1].update(probability="1/4"), "scenarios", "probabilities must sum to 1"),
        (lambda d: d.update(prices=["-1"]), "prices[0]", "price must be nonnegative"),
        (lambda d: d["scenarios"][1].update(payoffs=["-1"]), "scenarios[1].payoffs[0]", "payoff must be nonnegative"),
        (lambda d: d["scenarios"][1].update(payoffs=["1", "2"]), "scenarios[1].payoffs", "expected 1 payoffs"),
        (lambda d: d.pop("prices"), "prices", "missing field"),
        (lambda d: d.update(interest_rate="0.x"), "interest_rate", "not a rational"),
    ],
)
def test_parse_errors_carry_field_path(mutate, path, message):
    doc = market_doc([["2", "1/2"]])
    mutate(doc)
    with pytest.raises(MarketError) as err:
        parse_market(doc)
    assert err.value.path == path
    assert message in err.value.message


def test_malformed_json():
    with pytest.raises(MarketError):
        parse_market("{not json")


@pytest.mark.parametrize(
    "rate, payoffs, gains",
    [
        ("0", ["2", "1/2"], (1, F(-1, 2))),
        ("0", ["1", "1"], (0, 0)),
        ("1", ["4", "1"], (1, F(-1, 2))),
    ],
)
def test_discounted_gains(rate, payoffs, gains):
    mkt = parse_market(market_doc([payoffs], rate=rate))
    assert discounted_gains(mkt).rows == (gains,)


def test_portfolio_not_arbitrage(fair_market):
    rep = portfolio_report(fair_market, Portfolio((F(1),)))
    assert rep.cost == 1
    assert rep.values == (2, F(1, 2))
    assert not rep.is_arbitrage


def test_portfolio_arbitrage(arbitrage_market):
    rep = portfolio_report(arbitrage_market, Portfolio((F(1),)))
    assert rep.gains == (1, F(1, 2))
    assert rep.is_arbitrage


def test_portfolio_with_bond(fair_market):
    rep = portfolio_report(fair_market, Portfolio((F(1),), bond=F(-1)))
    assert rep.cost == 0
    assert rep.values == (1, F(-1, 2))


def test_zero_portfolio(arbitrage_market):
    assert not portfolio_report(arbitrage_market, Portfolio((F(0),))).is_arbitrage


def test_portfolio_dimension_mismatch(fair_market):
    with pytest.raises(ValueError):
        portfolio_report(fair_market, Portfolio((F(1), F(2))))


def test_strategy_subspace_ranks():
    two = parse_market(
        {
            "interest_rate": "0",
            "prices": ["1", "2"],
            "scenarios": [
                {"probability": "1/2", "payoffs": ["2", "4"]},
                {"probability": "1/2", "payoffs": ["1/2", "1"]},
            ],
        }
    )
    L = strategy_subspace(discounted_gains(two))
    assert L.vectors == ((1, F(-1, 2)), (2, -1))
    assert L.rank == 1
    flat = parse_market(market_doc([["1", "1"]]))
    assert strategy_subspace(discounted_gains(flat)).rank == 0


def test_market_invariants_enforced_on_construction(fair_market):
    with pytest.raises(MarketError):
        MarketSpec(F(-2), fair_market.prices, fair_market.payoffs, fair_market.space)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([F(0), F(1, 3), F(2), F(-1, 2)]))
def test_rate_change_leaves_gains_unchanged(seed, new_rate):
    mkt = random_market(random.Random(seed), 2, 3)
    scale = (1 + new_rate) / (1 + mkt.interest_rate)
    moved = MarketSpec(
        new_rate, mkt.prices, tuple(tuple(scale * s for s in row) for row in mkt.payoffs), mkt.space
    )
    assert discounted_gains(moved) == discounted_gains(mkt)


def test_lemma_arbitrage_portfolio_consistency():
    """Some portfolio is an arbitrage exactly when C1 fails on the orthant."""
    rng = random.Random(99)
    lattice = [F(k, 2) for k in range(-4, 5)]
    for _ in range(60):
        mkt = random_market(rng, rng.randint(1, 3), rng.randint(1, 4))
        L = strategy_subspace(discounted_gains(mkt))
        verdict = no_arbitrage(L, PolyhedralCone.orthant(mkt.space))
        if not verdict.holds:
            xi = verdict.certificate["coefficients"]
            assert portfolio_report(mkt, Portfolio(xi)).is_arbitrage
        else:
            for _ in range(50):
                xi = tuple(rng.choice(lattice) for _ in range(mkt.num_assets))
                assert not portfolio_report(mkt, Portfolio(xi)).is_arbitrage


def test_to_json_round_trip():
    mkt = random_market(random.Random(3), 3, 4)
    assert parse_market(json.loads(json.dumps(mkt.to_json()))) == mkt
