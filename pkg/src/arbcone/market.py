"""One-period finite-scenario markets.

A market lists ``d`` risky assets with initial prices ``pi`` and payoffs
``S[i][w]`` in each of ``m`` scenarios, plus an implicit bond paying ``1 + r``
for a price of 1. Arbitrage questions depend on the market only through the
discounted net gains ``Y[i][w] = S[i][w] / (1 + r) - pi[i]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from arbcone.rational import format_rational, format_vector, parse_rational
from arbcone.space import ScenarioSpace, Subspace, Vector


class MarketError(ValueError):
    """Invalid market document; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class MarketSpec:
    interest_rate: Fraction
    prices: Vector
    payoffs: tuple[Vector, ...]  # payoffs[i][w]
    space: ScenarioSpace

    def __post_init__(self) -> None:
        if self.interest_rate <= -1:
            raise MarketError("interest_rate", "interest rate must exceed -1")
        if not self.space.is_probabilistic:
            raise MarketError("scenarios", "probabilities must sum to 1")
        if len(self.payoffs) != len(self.prices):
            raise MarketError("prices", "one price per asset required")
        for i, p in enumerate(self.prices):
            if p < 0:
                raise MarketError(f"prices[{i}]", "price must be nonnegative")
        for i, row in enumerate(self.payoffs):
            self.space.check(row)
            for w, s in enumerate(row):
                if s < 0:
                    raise MarketError(f"scenarios[{w}].payoffs[{i}]", "payoff must be nonnegative")

    @property
    def num_assets(self) -> int:
        return len(self.prices)

    @property
    def num_scenarios(self) -> int:
        return self.space.dimension

    def to_json(self) -> dict[str, Any]:
        return {
            "interest_rate": format_rational(self.interest_rate),
            "prices": format_vector(self.prices),
            "scenarios": [
                {
                    "probability": format_rational(p),
                    "payoffs": [format_rational(row[w]) for row in self.payoffs],
                }
                for w, p in enumerate(self.space.weights)
            ],
        }


def _rat(value: Any, path: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise MarketError(path, str(exc)) from None


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise MarketError(path, "expected a list")
    return value


def parse_market(document: str | Mapping[str, Any]) -> MarketSpec:
    """Build a validated market from its JSON document (text or decoded)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MarketError("$", f"malformed JSON: {exc.msg}") from None
    if not isinstance(document, Mapping):
        raise MarketError("$", "expected a JSON object")
    for key in ("interest_rate", "prices", "scenarios"):
        if key not in document:
            raise MarketError(key, "missing field")
    r = _rat(document["interest_rate"], "interest_rate")
    if r <= -1:
        raise MarketError("interest_rate", "interest rate must exceed -1")
    prices = tuple(_rat(v, f"prices[{i}]") for i, v in enumerate(_list(document["prices"], "prices")))
    for i, p in enumerate(prices):
        if p < 0:
            raise MarketError(f"prices[{i}]", "price must be nonnegative")
    d = len(prices)
    scenarios = _list(document["scenarios"], "scenarios")
    if not scenarios:
        raise MarketError("scenarios", "at least one scenario required")
    probs: list[Fraction] = []
    columns: list[list[Fraction]] = []
    for w, sc in enumerate(scenarios):
        base = f"scenarios[{w}]"
        if not isinstance(sc, Mapping):
            raise MarketError(base, "expected an object")
        if "probability" not in sc or "payoffs" not in sc:
            raise MarketError(base, "scenario needs 'probability' and 'payoffs'")
        p = _rat(sc["probability"], f"{base}.probability")
        if p <= 0:
            raise MarketError(f"{base}.probability", "probability must be positive")
        pay = _list(sc["payoffs"], f"{base}.payoffs")
        if len(pay) != d:
            raise MarketError(f"{base}.payoffs", f"expected {d} payoffs, got {len(pay)}")
        col = [_rat(v, f"{base}.payoffs[{i}]") for i, v in enumerate(pay)]
        for i, s in enumerate(col):
            if s < 0:
                raise MarketError(f"{base}.payoffs[{i}]", "payoff must be nonnegative")
        probs.append(p)
        columns.append(col)
    if sum(probs) != 1:
        raise MarketError("scenarios", f"probabilities must sum to 1, got {format_rational(sum(probs))}")
    payoffs = tuple(tuple(col[i] for col in columns) for i in range(d))
    return MarketSpec(r, prices, payoffs, ScenarioSpace(tuple(probs)))


@dataclass(frozen=True)
class GainsMatrix:
    rows: tuple[Vector, ...]
    space: ScenarioSpace


def discounted_gains(mkt: MarketSpec) -> GainsMatrix:
    disc = 1 / (1 + mkt.interest_rate)
    rows = tuple(
        tuple(s * disc - pi for s in row) for pi, row in zip(mkt.prices, mkt.payoffs)
    )
    return GainsMatrix(rows, mkt.space)


@dataclass(frozen=True)
class Portfolio:
    positions: Vector
    bond: Fraction | None = None


@dataclass(frozen=True)
class PortfolioReport:
    cost: Fraction
    values: Vector
    gains: Vector
    is_arbitrage: bool


def portfolio_report(mkt: MarketSpec, pf: Portfolio) -> PortfolioReport:
    """Cost, terminal value and arbitrage status of a portfolio.

    The arbitrage test is on discounted net gains: ``xi . Y`` nonnegative in
    every scenario with positive expectation. The bond position only shifts
    cost and value.
    """
    d = mkt.num_assets
    if len(pf.positions) != d:
        raise ValueError(f"dimension mismatch: portfolio has {len(pf.positions)} positions, market has {d} assets")
    bond = pf.bond or Fraction(0)
    xi = pf.positions
    cost = bond + sum((x * p for x, p in zip(xi, mkt.prices)), Fraction(0))
    m = mkt.num_scenarios
    values = tuple(
        bond * (1 + mkt.interest_rate) + sum((xi[i] * mkt.payoffs[i][w] for i in range(d)), Fraction(0))
        for w in range(m)
    )
    Y = discounted_gains(mkt).rows
    gains = tuple(sum((xi[i] * Y[i][w] for i in range(d)), Fraction(0)) for w in range(m))
    expected = sum((p * g for p, g in zip(mkt.space.weights, gains)), Fraction(0))
    is_arb = all(g >= 0 for g in gains) and expected > 0
    return PortfolioReport(cost, values, gains, is_arb)


def strategy_subspace(g: GainsMatrix) -> Subspace:
    """Span of the discounted gain vectors; coefficients are portfolios."""
    return Subspace(g.rows, g.space)


def market_from_arrays(
    interest_rate, prices: Sequence, payoffs: Sequence[Sequence], probabilities: Sequence
) -> MarketSpec:
    """Convenience constructor; every entry goes through the rational parser."""
    return MarketSpec(
        parse_rational(interest_rate),
        tuple(parse_rational(p) for p in prices),
        tuple(tuple(parse_rational(s) for s in row) for row in payoffs),
        ScenarioSpace(tuple(parse_rational(p) for p in probabilities)),
    )
