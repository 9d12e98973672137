"""Finite truncations of the l1 example where no-arbitrage survives but
uniform positivity degenerates.

The instance of size ``N`` lives in R^(2N) with unit weights, takes the
nonnegative orthant as ``K`` and spans ``L`` by ``e_2n - e_(2n-1) / (2n)`` for
``n = 1..N``. Every truncation is arbitrage free, yet both the best uniform
margin of an annihilating functional and the distance from the base to ``L``
equal ``1/(2N)``. That rate is a derived property of the truncations; it
vanishes in the limit, which is why the infinite sequence space has no
strictly positive annihilator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from arbcone.cones import PolyhedralCone, base_of
from arbcone.geometry import base_distance, martingale_functional, no_arbitrage
from arbcone.space import ScenarioSpace, Subspace


@dataclass(frozen=True)
class TruncatedInstance:
    n: int
    space: ScenarioSpace
    subspace: Subspace
    cone: PolyhedralCone


@dataclass(frozen=True)
class DecayRow:
    n: int
    no_arbitrage: bool
    margin: Fraction
    distance: Fraction


def build_instance(n: int) -> TruncatedInstance:
    if n < 1:
        raise ValueError("truncation size must be at least 1")
    space = ScenarioSpace.unit(2 * n)
    vectors = []
    for k in range(1, n + 1):
        v = [Fraction(0)] * (2 * n)
        v[2 * k - 1] = Fraction(1)
        v[2 * k - 2] = Fraction(-1, 2 * k)
        vectors.append(tuple(v))
    return TruncatedInstance(n, space, Subspace(tuple(vectors), space), PolyhedralCone.orthant(space))


def margin_decay(n: int) -> Fraction:
    inst = build_instance(n)
    return martingale_functional(inst.subspace, inst.cone).value


def distance_decay(n: int) -> Fraction:
    inst = build_instance(n)
    return base_distance(base_of(inst.cone), inst.subspace).value


def decay_row(n: int) -> DecayRow:
    inst = build_instance(n)
    return DecayRow(
        n,
        no_arbitrage(inst.subspace, inst.cone).holds,
        martingale_functional(inst.subspace, inst.cone).value,
        base_distance(base_of(inst.cone), inst.subspace).value,
    )


def decay_report(n_max: int) -> list[DecayRow]:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    rows = [decay_row(n) for n in range(1, n_max + 1)]
    for prev, row in zip(rows, rows[1:]):
        if not (row.margin < prev.margin and row.distance < prev.distance):
            raise AssertionError(f"no decay between N={prev.n} and N={row.n}")
    if not all(r.no_arbitrage for r in rows):
        raise AssertionError("a truncation admits arbitrage")
    return rows
