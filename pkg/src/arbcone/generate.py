"""Seeded random markets and cone instances.

Generators draw from small integer lattices scaled by powers of two so every
entry is an exact, short rational. Markets are biased toward the arbitrage
boundary: many are priced fairly under a random positive measure, some are
nudged off fair prices, and zero or linearly dependent gain rows appear
regularly.
"""

from __future__ import annotations

import random
from fractions import Fraction

from arbcone.cones import PolyhedralCone
from arbcone.market import MarketSpec
from arbcone.space import ScenarioSpace, Subspace

RATES = (Fraction(0), Fraction(1, 20), Fraction(1, 10), Fraction(1, 4))


def _lattice(rng: random.Random, lo: int = 0, hi: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi), 2 ** rng.randint(0, 2))


def _probabilities(rng: random.Random, m: int) -> tuple[Fraction, ...]:
    raw = [rng.randint(1, 5) for _ in range(m)]
    total = sum(raw)
    return tuple(Fraction(x, total) for x in raw)


def random_market(rng: random.Random, d: int, m: int) -> MarketSpec:
    if d < 1 or m < 1:
        raise ValueError("need at least one asset and one scenario")
    probs = _probabilities(rng, m)
    r = rng.choice(RATES)
    pricing = _probabilities(rng, m)
    mode = rng.choice(("fair", "fair", "nudged", "lattice"))
    payoffs: list[tuple[Fraction, ...]] = []
    prices: list[Fraction] = []
    for i in range(d):
        kind = rng.random()
        if kind < 0.1:
            c = _lattice(rng, 1)
            row = (c,) * m
            price = c / (1 + r)
        elif kind < 0.2 and payoffs:
            k = rng.randrange(len(payoffs))
            s = Fraction(rng.randint(1, 3), 2 ** rng.randint(0, 1))
            row = tuple(s * x for x in payoffs[k])
            price = s * prices[k]
        else:
            row = tuple(_lattice(rng) for _ in range(m))
            fair = sum((q * x for q, x in zip(pricing, row)), Fraction(0)) / (1 + r)
            if mode == "fair":
                price = fair
            elif mode == "nudged":
                price = max(Fraction(0), fair + Fraction(rng.randint(-1, 1), 8))
            else:
                price = _lattice(rng)
        payoffs.append(row)
        prices.append(price)
    return MarketSpec(r, tuple(prices), tuple(payoffs), ScenarioSpace(probs))


def random_cone(rng: random.Random, m: int, n_gen: int, lo: int = -2, hi: int = 2) -> PolyhedralCone:
    """Unrestricted random cone; may or may not be pointed."""
    space = ScenarioSpace.unit(m)
    gens = []
    while len(gens) < n_gen:
        g = tuple(Fraction(rng.randint(lo, hi)) for _ in range(m))
        if any(g):
            gens.append(g)
    return PolyhedralCone(space, tuple(gens))


def random_pointed_cone(rng: random.Random, space: ScenarioSpace, n_gen: int) -> PolyhedralCone:
    """Random cone inside an open half-space, hence pointed."""
    m = space.dimension
    axis = [rng.randint(1, 3) for _ in range(m)]
    gens = []
    while len(gens) < n_gen:
        g = [Fraction(rng.randint(-2, 3)) for _ in range(m)]
        s = sum(a * x for a, x in zip(axis, g))
        if s == 0:
            continue
        if s < 0:
            g = [-x for x in g]
        gens.append(tuple(g))
    return PolyhedralCone(space, tuple(gens))


def random_subspace(
    rng: random.Random, cone: PolyhedralCone, rank: int, plant: bool | None = None
) -> Subspace:
    """Random span of ``rank`` vectors; ``plant`` puts a cone element in it."""
    m = cone.dimension
    if plant is None:
        plant = rng.random() < 0.4
    vectors = []
    if plant and rank > 0:
        lam = [Fraction(rng.randint(0, 2)) for _ in cone.generators]
        if not any(lam):
            lam[0] = Fraction(1)
        vectors.append(cone.combine(lam))
    while len(vectors) < rank:
        vectors.append(tuple(Fraction(rng.randint(-2, 2), 2 ** rng.randint(0, 1)) for _ in range(m)))
    rng.shuffle(vectors)
    return Subspace(tuple(vectors), cone.space)


def random_pointed_instance(
    rng: random.Random, max_dim: int = 6, max_gens: int = 6, max_rank: int = 3
) -> tuple[Subspace, PolyhedralCone]:
    m = rng.randint(1, max_dim)
    if rng.random() < 0.5:
        space = ScenarioSpace.unit(m)
    else:
        space = ScenarioSpace(_probabilities(rng, m))
    if rng.random() < 0.3:
        cone = PolyhedralCone.orthant(space)
    else:
        cone = random_pointed_cone(rng, space, rng.randint(1, max_gens))
    rank = rng.randint(0, min(max_rank, m))
    return random_subspace(rng, cone, rank), cone
