"""Finitely generated cones, their duals, bases and plasterability."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from arbcone.lp import GE, LinearProgram, LpOutcome, Status, solve
from arbcone.space import ScenarioSpace, Vector


@dataclass(frozen=True)
class PolyhedralCone:
    """``K = {sum_j l_j g_j : l >= 0}`` for the listed generators ``g_j``."""

    space: ScenarioSpace
    generators: tuple[Vector, ...]

    def __post_init__(self) -> None:
        gens = tuple(tuple(Fraction(x) for x in g) for g in self.generators)
        if not gens:
            raise ValueError("a cone needs at least one generator")
        for j, g in enumerate(gens):
            self.space.check(g)
            if all(x == 0 for x in g):
                raise ValueError(f"generators[{j}]: zero generator")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def orthant(cls, space: ScenarioSpace) -> PolyhedralCone:
        m = space.dimension
        return cls(space, tuple(unit_vector(m, w) for w in range(m)))

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def norms(self) -> list[Fraction]:
        return [self.space.norm(g) for g in self.generators]

    def combine(self, coef: Sequence[Fraction]) -> Vector:
        m = self.dimension
        out = [Fraction(0)] * m
        for c, g in zip(coef, self.generators):
            if c:
                for w in range(m):
                    out[w] += c * g[w]
        return tuple(out)

    def is_orthant(self) -> bool:
        """True when the generators are positive multiples of every unit vector."""
        covered = set()
        for g in self.generators:
            support = [w for w, x in enumerate(g) if x != 0]
            if len(support) != 1 or g[support[0]] < 0:
                return False
            covered.add(support[0])
        return len(covered) == self.dimension

    def rescaled(self, factors: Sequence[Fraction]) -> PolyhedralCone:
        return PolyhedralCone(
            self.space, tuple(tuple(s * x for x in g) for s, g in zip(factors, self.generators))
        )


@dataclass(frozen=True)
class Functional:
    coefficients: Vector
    space: ScenarioSpace

    def __post_init__(self) -> None:
        c = tuple(Fraction(x) for x in self.coefficients)
        self.space.check(c)
        object.__setattr__(self, "coefficients", c)

    def __call__(self, u: Sequence[Fraction]) -> Fraction:
        return self.space.pair(self.coefficients, u)

    def dual_norm(self) -> Fraction:
        return max(abs(x) for x in self.coefficients)


@dataclass(frozen=True)
class Base:
    vertices: tuple[Vector, ...]
    space: ScenarioSpace


@dataclass(frozen=True)
class PlasterReport:
    plasterable: bool
    witness: Functional | None = None
    margin: Fraction | None = None
    counter_witness: Vector | None = None


class NotPlasterableError(ValueError):
    def __init__(self, report: PlasterReport):
        super().__init__(
            f"cone is not pointed: it contains the line through {list(map(str, report.counter_witness or ()))}"
        )
        self.report = report


def unit_vector(m: int, k: int) -> Vector:
    return tuple(Fraction(int(i == k)) for i in range(m))


def _check_same(cone: PolyhedralCone, f: Functional) -> None:
    if cone.space != f.space:
        raise ValueError("dimension mismatch: functional and cone live in different spaces")


def dual_contains(cone: PolyhedralCone, f: Functional) -> bool:
    _check_same(cone, f)
    return all(f(g) >= 0 for g in cone.generators)


def uniform_positivity_margin(cone: PolyhedralCone, f: Functional) -> Fraction | None:
    """Largest ``c`` with ``f(g) >= c * |g|`` on every generator, if positive."""
    _check_same(cone, f)
    c = min(f(g) / n for g, n in zip(cone.generators, cone.norms()))
    return c if c > 0 else None


def margin_program(
    cone: PolyhedralCone,
    equalities: Sequence[tuple[Sequence[Fraction], Fraction]] = (),
    box: Fraction | None = Fraction(1),
    cap: Fraction | None = None,
) -> LinearProgram:
    """LP in ``(psi, t)``: maximize ``t`` with ``psi(g_j) >= t |g_j|``.

    ``equalities`` are extra rows ``c . psi = b`` on the coefficients;
    ``box`` bounds every coefficient in absolute value; ``cap`` bounds ``t``
    from above.
    """
    m = cone.dimension
    space = cone.space
    rows: list[list[Fraction]] = []
    rels: list[str] = []
    rhs: list[Fraction] = []
    for coef, b in equalities:
        rows.append(list(coef) + [Fraction(0)])
        rels.append("=")
        rhs.append(b)
    for g, n in zip(cone.generators, cone.norms()):
        rows.append(space.pairing_row(g) + [-n])
        rels.append(GE)
        rhs.append(Fraction(0))
    lower = [None if box is None else -box] * m + [None]
    upper = [box] * m + [cap]
    objective = [Fraction(0)] * m + [Fraction(1)]
    return LinearProgram(objective, rows, rels, rhs, lower, upper)


def is_plasterable(cone: PolyhedralCone) -> PlasterReport:
    """Decide whether ``cone`` admits a uniformly positive functional.

    For finitely generated cones this is pointedness. On failure a generator
    ``g`` with ``-g`` also in the cone is extracted from the LP dual.
    """
    lp = margin_program(cone)
    out = solve(lp)
    assert out.status is Status.OPTIMAL
    m = cone.dimension
    t = out.value
    if t > 0:
        psi = Functional(out.point[:m], cone.space)
        return PlasterReport(True, psi, t)
    return PlasterReport(False, counter_witness=_line_from_dual(cone, out))


def _line_from_dual(cone: PolyhedralCone, out: LpOutcome) -> Vector:
    # generator rows carry y_j <= 0 with sum_j y_j g_j = 0 and sum_j y_j |g_j| = -1
    y = out.certificate.dual[: len(cone.generators)]
    j = next(j for j, v in enumerate(y) if v != 0)
    return cone.generators[j]


def base_of(cone: PolyhedralCone) -> Base:
    """Hull of the l1-normalised generators; raises for non-pointed cones."""
    report = is_plasterable(cone)
    if not report.plasterable:
        raise NotPlasterableError(report)
    verts: list[Vector] = []
    for g, n in zip(cone.generators, cone.norms()):
        v = tuple(x / n for x in g)
        if v not in verts:
            verts.append(v)
    return Base(tuple(verts), cone.space)
