"""Decision procedures for the equivalent characterisations of no-arbitrage.

For a strategy subspace ``L`` and a pointed profit cone ``K`` in a finite
scenario space the following are decided independently, each with a
certificate that can be re-checked by plain arithmetic:

====  ===================================================================
C1    ``L`` meets ``K`` only at 0
C2    a base ``F`` of ``K`` is at positive weighted-l1 distance from ``L``
C3    some functional annihilates ``L`` and is uniformly positive on ``K``
C4    ``L^perp + int K^*`` is the whole dual space
PS    ``(u + K)`` misses ``L`` for every nonzero ``u`` in ``K``
BP    ``L^perp + K^*`` is the whole dual space (no interior required)
====  ===================================================================

For pointed ``K`` all six agree; without pointedness only C1 and BP remain
equivalent.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from arbcone.cones import (
    Base,
    Functional,
    NotPlasterableError,
    PlasterReport,
    PolyhedralCone,
    base_of,
    is_plasterable,
    margin_program,
    unit_vector,
)
from arbcone.lp import EQ, GE, LE, LinearProgram, Status, solve
from arbcone.market import MarketSpec, discounted_gains, strategy_subspace
from arbcone.rational import format_rational
from arbcone.space import ScenarioSpace, Subspace, Vector

C1, C2, C3, C4, PS, BP = "C1", "C2", "C3", "C4", "PS", "BP"
CONDITIONS = (C1, C2, C3, C4, PS, BP)
CONDITION_NAMES = {
    C1: "no_arbitrage",
    C2: "base_distance",
    C3: "martingale_functional",
    C4: "dual_sum",
    PS: "positive_separation",
    BP: "bipolar",
}
BP_CLOSURE_NOTE = (
    "weak-* closure is the identity here: a sum of polyhedral cones in finite "
    "dimension is closed"
)

ZERO = Fraction(0)


class InternalConsistencyError(AssertionError):
    """Two procedures that must agree did not; this is always a bug."""


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str
    holds: bool
    certificate: dict[str, Any] = field(default_factory=dict)
    value: Fraction | None = None


@dataclass(frozen=True)
class MartingaleMeasure:
    density: Vector
    space: ScenarioSpace
    margin: Fraction

    @property
    def probabilities(self) -> Vector:
        return tuple(p * q for p, q in zip(self.space.weights, self.density))

    def expectation(self, u: Sequence[Fraction]) -> Fraction:
        return self.space.pair(self.density, u)


@dataclass(frozen=True)
class Decomposition:
    annihilating: Functional  # in L^perp
    positive: Functional  # margin > 0 on K (or >= 0 in the closed case)
    margin: Fraction


def _same_space(L: Subspace, K: PolyhedralCone) -> None:
    if L.ambient != K.space:
        raise ValueError("dimension mismatch: subspace and cone live in different spaces")


def _membership_rows(L: Subspace, K: PolyhedralCone) -> list[list[Fraction]]:
    # coordinate rows of  sum_j l_j g_j - sum_i a_i w_i  over variables (l, a)
    m = K.dimension
    return [
        [g[w] for g in K.generators] + [-v[w] for v in L.vectors] for w in range(m)
    ]


def _scale_to_unit(x: Sequence[Fraction]) -> Fraction:
    return 1 / max(abs(v) for v in x)


def no_arbitrage(L: Subspace, K: PolyhedralCone) -> ConditionVerdict:
    """C1: decide ``L & K == {0}``; on failure certify a nonzero common point."""
    _same_space(L, K)
    ng, k = len(K.generators), len(L.vectors)
    rows = _membership_rows(L, K)
    rels = [EQ] * len(rows)
    rhs = [ZERO] * len(rows)
    rows.append([Fraction(1)] * ng + [ZERO] * k)
    rels.append(LE)
    rhs.append(Fraction(1))
    lower = [ZERO] * ng + [None] * k

    def run(objective: list[Fraction]):
        out = solve(LinearProgram(objective, rows, rels, rhs, lower))
        assert out.status is Status.OPTIMAL
        return out

    out = run([Fraction(1)] * ng + [ZERO] * k)
    if out.value == 0:
        return ConditionVerdict(C1, True, {"lp_dual": out.certificate.dual})
    probes = [out]
    if all(x == 0 for x in K.combine(out.point[:ng])):
        # non-pointed cone: the weights only traced a line inside K
        probes = []
        for w in range(K.dimension):
            for sign in (1, -1):
                obj = [sign * g[w] for g in K.generators] + [ZERO] * k
                probe = run(obj)
                if probe.value > 0:
                    probes = [probe]
                    break
            if probes:
                break
        if not probes:
            return ConditionVerdict(C1, True, {"note": "cone contains a line; all coordinate probes vanish"})
    lam = probes[0].point[:ng]
    alpha = probes[0].point[ng:]
    x = K.combine(lam)
    s = _scale_to_unit(x)
    return ConditionVerdict(
        C1,
        False,
        {
            "gain": tuple(s * v for v in x),
            "cone_weights": tuple(s * v for v in lam),
            "coefficients": tuple(s * v for v in alpha),
        },
    )


def verify_intersection(L: Subspace, K: PolyhedralCone, cert: dict[str, Any]) -> bool:
    """Pure-arithmetic check of a C1 failure certificate."""
    x = tuple(cert["gain"])
    lam = cert["cone_weights"]
    return (
        any(v != 0 for v in x)
        and all(v >= 0 for v in lam)
        and K.combine(lam) == x
        and L.combine(cert["coefficients"]) == x
    )


def base_distance(F: Base, L: Subspace) -> ConditionVerdict:
    """C2: weighted-l1 distance between ``conv(F)`` and ``L`` by one LP."""
    if F.space != L.ambient:
        raise ValueError("dimension mismatch: base and subspace live in different spaces")
    space = F.space
    m = space.dimension
    nv, k = len(F.vertices), len(L.vectors)
    # variables: hull weights mu (nv), span coefficients a (k), slack bounds s (m)
    n = nv + k + m
    rows: list[list[Fraction]] = [[Fraction(1)] * nv + [ZERO] * (k + m)]
    rels = [EQ]
    rhs = [Fraction(1)]
    for w in range(m):
        diff = [f[w] for f in F.vertices] + [-v[w] for v in L.vectors]
        for sign in (1, -1):
            row = [sign * c for c in diff] + [ZERO] * m
            row[nv + k + w] = Fraction(1)
            rows.append(row)
            rels.append(GE)
            rhs.append(ZERO)
    objective = [ZERO] * (nv + k) + [-p for p in space.weights]
    lower = [ZERO] * nv + [None] * k + [ZERO] * m
    out = solve(LinearProgram(objective, rows, rels, rhs, lower))
    assert out.status is Status.OPTIMAL and len(out.point) == n
    rho = -out.value
    mu = out.point[:nv]
    alpha = out.point[nv : nv + k]
    x = [ZERO] * m
    for c, f in zip(mu, F.vertices):
        if c:
            for w in range(m):
                x[w] += c * f[w]
    v = L.combine(alpha)
    cert = {
        "x": tuple(x),
        "v": v,
        "hull_weights": mu,
        "coefficients": alpha,
        "lp_dual": out.certificate.dual,
    }
    return ConditionVerdict(C2, rho > 0, cert, rho)


def martingale_functional(L: Subspace, K: PolyhedralCone) -> ConditionVerdict:
    """C3: maximise the uniform margin of a functional annihilating ``L``."""
    _same_space(L, K)
    m = K.dimension
    eqs = [(L.ambient.pairing_row(v), ZERO) for v in L.vectors]
    out = solve(margin_program(K, eqs))
    assert out.status is Status.OPTIMAL
    t = out.value
    if t > 0:
        psi = Functional(out.point[:m], K.space)
        return ConditionVerdict(C3, True, {"psi": psi, "margin": t, "cone": K}, t)
    return ConditionVerdict(C3, False, {"lp_dual": out.certificate.dual, "cone": K}, t)


def verify_martingale_functional(L: Subspace, K: PolyhedralCone, psi: Functional, margin: Fraction) -> bool:
    """Pure-arithmetic check of a C3 certificate."""
    return (
        margin > 0
        and psi.dual_norm() <= 1
        and L.annihilates(psi.coefficients)
        and all(psi(g) >= margin * n for g, n in zip(K.generators, K.norms()))
    )


def to_martingale_measure(v: ConditionVerdict, space: ScenarioSpace) -> MartingaleMeasure:
    """Normalise a C3 functional for the orthant into an equivalent measure."""
    if v.condition != C3:
        raise ValueError(f"expected a {C3} verdict, got {v.condition}")
    if not v.holds:
        raise ValueError("no martingale measure: the subspace admits no strictly positive annihilator")
    cone = v.certificate.get("cone")
    if cone is not None and not cone.is_orthant():
        raise ValueError("martingale measures are defined for the nonnegative orthant only")
    if not space.is_probabilistic:
        raise ValueError("scenario weights must form a probability vector")
    psi = v.certificate["psi"]
    coef = psi.coefficients if isinstance(psi, Functional) else tuple(psi)
    space.check(coef)
    if any(c <= 0 for c in coef):
        raise ValueError("density must be strictly positive to give an equivalent measure")
    total = space.pair(coef, (Fraction(1),) * space.dimension)
    density = tuple(c / total for c in coef)
    return MartingaleMeasure(density, space, min(density))


def dual_decompose(
    target: Functional, L: Subspace, K: PolyhedralCone, strict: bool = True
) -> Decomposition | None:
    """Split ``target = l + k`` with ``l`` in ``L^perp`` and ``k`` positive on ``K``.

    With ``strict`` the part ``k`` must be uniformly positive (margin > 0),
    otherwise merely in ``K^*``. The margin is capped at 1 so the LP is
    bounded without restricting ``k``.
    """
    _same_space(L, K)
    if target.space != K.space:
        raise ValueError("dimension mismatch: target lives in a different space")
    m = K.dimension
    eqs = [(L.ambient.pairing_row(v), target(v)) for v in L.vectors]
    out = solve(margin_program(K, eqs, box=None, cap=Fraction(1)))
    assert out.status is Status.OPTIMAL
    t = out.value
    if t < 0 or (strict and t == 0):
        return None
    k = out.point[:m]
    rest = tuple(a - b for a, b in zip(target.coefficients, k))
    return Decomposition(Functional(rest, K.space), Functional(k, K.space), t)


def dual_sum_is_full(L: Subspace, K: PolyhedralCone, interior: bool) -> ConditionVerdict:
    """C4 (``interior``) or BP: probe ``+-e_w`` for membership in the dual sum."""
    _same_space(L, K)
    m = K.dimension
    cond = C4 if interior else BP
    found = []
    for w in range(m):
        for sign in (1, -1):
            probe = Functional(tuple(sign * x for x in unit_vector(m, w)), K.space)
            dec = dual_decompose(probe, L, K, strict=interior)
            if dec is None:
                cert = {"failed_probe": probe.coefficients}
                if not interior:
                    cert["closure"] = BP_CLOSURE_NOTE
                return ConditionVerdict(cond, False, cert)
            found.append((probe.coefficients, dec))
    cert: dict[str, Any] = {"decompositions": found}
    if not interior:
        cert["closure"] = BP_CLOSURE_NOTE
    return ConditionVerdict(cond, True, cert)


def verify_decomposition(
    target: Functional, L: Subspace, K: PolyhedralCone, dec: Decomposition, strict: bool = True
) -> bool:
    if tuple(a + b for a, b in zip(dec.annihilating.coefficients, dec.positive.coefficients)) != target.coefficients:
        return False
    if not L.annihilates(dec.annihilating.coefficients):
        return False
    if strict and dec.margin <= 0:
        return False
    return all(dec.positive(g) >= dec.margin * n for g, n in zip(K.generators, K.norms())) and dec.margin >= 0


def positively_separated(L: Subspace, K: PolyhedralCone) -> ConditionVerdict:
    """PS: for each generator ``g`` decide whether ``(g + K)`` meets ``L``."""
    _same_space(L, K)
    report = is_plasterable(K)
    if not report.plasterable:
        raise NotPlasterableError(report)
    ng, k = len(K.generators), len(L.vectors)
    rows = _membership_rows(L, K)
    rels = [EQ] * len(rows)
    lower = [ZERO] * ng + [None] * k
    refutations = []
    for j, g in enumerate(K.generators):
        rhs = [-x for x in g]
        out = solve(LinearProgram([ZERO] * (ng + k), rows, rels, rhs, lower))
        if out.status is Status.OPTIMAL:
            lam = out.point[:ng]
            point = tuple(a + b for a, b in zip(g, K.combine(lam)))
            return ConditionVerdict(
                PS,
                False,
                {"u": g, "point": point, "cone_weights": lam, "coefficients": out.point[ng:]},
            )
        refutations.append(out.certificate.dual)
    return ConditionVerdict(PS, True, {"farkas": refutations})


def sample_positive_separation(
    L: Subspace, K: PolyhedralCone, weights: Sequence[Sequence[Fraction]]
) -> list[tuple[Vector, bool]]:
    """Audit mode: test ``(u + K) & L`` for explicit ``u = sum_j weights_j g_j``."""
    _same_space(L, K)
    ng, k = len(K.generators), len(L.vectors)
    rows = _membership_rows(L, K)
    rels = [EQ] * len(rows)
    lower = [ZERO] * ng + [None] * k
    result = []
    for lam in weights:
        u = K.combine(lam)
        out = solve(LinearProgram([ZERO] * (ng + k), rows, rels, [-x for x in u], lower))
        result.append((u, out.status is Status.OPTIMAL))
    return result


@dataclass(frozen=True)
class EquivalenceReport:
    conditions: dict[str, ConditionVerdict]
    pointed: bool
    plaster: PlasterReport
    notice: str | None = None

    @property
    def agree(self) -> bool:
        return len({v.holds for v in self.conditions.values()}) == 1

    @property
    def arbitrage_free(self) -> bool:
        return self.conditions[C1].holds

    def to_json(self) -> dict[str, Any]:
        return {
            "conditions": {
                key: {
                    "name": CONDITION_NAMES[key],
                    "holds": v.holds,
                    **({"value": format_rational(v.value)} if v.value is not None else {}),
                }
                for key, v in self.conditions.items()
            },
            "agree": self.agree,
            "pointed": self.pointed,
            "certificates": {key: jsonable(v.certificate) for key, v in self.conditions.items()},
            **({"notice": self.notice} if self.notice else {}),
        }


def equivalence_report(
    L: Subspace, K: PolyhedralCone, parallel: bool = False, strict: bool = True
) -> EquivalenceReport:
    """Run every applicable condition and check that they agree.

    ``strict`` turns a disagreement into :class:`InternalConsistencyError`;
    otherwise the report's ``agree`` flag is left false for the caller.
    """
    _same_space(L, K)
    plaster = is_plasterable(K)
    checks: dict[str, Callable[[], ConditionVerdict]] = {
        C1: lambda: no_arbitrage(L, K),
        BP: lambda: dual_sum_is_full(L, K, interior=False),
    }
    notice = None
    if plaster.plasterable:
        checks.update(
            {
                C2: lambda: base_distance(base_of(K), L),
                C3: lambda: martingale_functional(L, K),
                C4: lambda: dual_sum_is_full(L, K, interior=True),
                PS: lambda: positively_separated(L, K),
            }
        )
    else:
        notice = "cone is not pointed; only C1 and BP are equivalent, the other conditions are skipped"
    order = [c for c in CONDITIONS if c in checks]
    if parallel:
        with ThreadPoolExecutor() as pool:
            futures = {c: pool.submit(checks[c]) for c in order}
            results = {c: futures[c].result() for c in order}
    else:
        results = {c: checks[c]() for c in order}
    report = EquivalenceReport(results, plaster.plasterable, plaster, notice)
    if strict and not report.agree:
        summary = ", ".join(f"{c}={v.holds}" for c, v in results.items())
        raise InternalConsistencyError(f"conditions disagree: {summary}")
    return report


@dataclass(frozen=True)
class MarketCertificate:
    arbitrage_free: bool
    measure: MartingaleMeasure | None = None
    portfolio: Vector | None = None
    gains: Vector | None = None

    def to_json(self) -> dict[str, Any]:
        if self.arbitrage_free:
            return {
                "arbitrage_free": True,
                "martingale_measure": [format_rational(q) for q in self.measure.probabilities],
                "density": [format_rational(q) for q in self.measure.density],
                "margin": format_rational(self.measure.margin),
            }
        return {
            "arbitrage_free": False,
            "portfolio": [format_rational(x) for x in self.portfolio],
            "gains": [format_rational(x) for x in self.gains],
        }


def certify_market(mkt: MarketSpec) -> MarketCertificate:
    """Either an arbitrage portfolio or an equivalent martingale measure.

    Both alternatives are computed independently; exactly one must succeed.
    """
    g = discounted_gains(mkt)
    L = strategy_subspace(g)
    K = PolyhedralCone.orthant(mkt.space)
    c1 = no_arbitrage(L, K)
    c3 = martingale_functional(L, K)
    if c1.holds != c3.holds:
        raise InternalConsistencyError(
            f"alternative violated: no_arbitrage={c1.holds}, martingale_functional={c3.holds}"
        )
    if c3.holds:
        if not verify_martingale_functional(L, K, c3.certificate["psi"], c3.value):
            raise InternalConsistencyError("martingale functional failed re-verification")
        return MarketCertificate(True, to_martingale_measure(c3, mkt.space))
    if not verify_intersection(L, K, c1.certificate):
        raise InternalConsistencyError("arbitrage certificate failed re-verification")
    xi = c1.certificate["coefficients"]
    s = _scale_to_unit(xi)
    xi = tuple(s * x for x in xi)
    gains = L.combine(xi)
    return MarketCertificate(False, portfolio=xi, gains=gains)


def jsonable(obj: Any) -> Any:
    """Recursively turn certificates into JSON-ready values (rationals as strings)."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Functional):
        return [format_rational(x) for x in obj.coefficients]
    if isinstance(obj, PolyhedralCone):
        return {"generators": [jsonable(g) for g in obj.generators]}
    if isinstance(obj, Decomposition):
        return {
            "annihilating": jsonable(obj.annihilating),
            "positive": jsonable(obj.positive),
            "margin": format_rational(obj.margin),
        }
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")
