"""Exact rational linear programming with checkable certificates.

Programs are stated as

    maximize  c . x
    subject to  a_i . x  (<=, =, >=)  b_i      for every row i
                lower_j <= x_j <= upper_j     (either side optional)

and solved by a two-phase tableau simplex over :class:`fractions.Fraction`
with Bland's least-index rule, so every solve terminates and is
deterministic.

Certificates refer to the *expanded* system: the constraint rows followed by
one row per finite variable bound (for each variable, its lower bound row
``x_j >= lower_j`` then its upper bound row ``x_j <= upper_j``). With
``A x (rel) b`` denoting that system, a dual vector ``y`` is sign-feasible
when ``y_i >= 0`` on ``<=`` rows and ``y_i <= 0`` on ``>=`` rows.

* optimality: ``x`` feasible, ``y`` sign-feasible, ``A^T y = c`` and
  ``b . y = c . x``;
* farkas: ``y`` sign-feasible, ``A^T y = 0`` and ``b . y < 0``;
* ray: ``x`` feasible and a direction ``d`` with ``a_i . d`` of the row's
  sign (``<= 0``, ``= 0``, ``>= 0``) and ``c . d > 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from arbcone.rational import parse_rational

Vector = tuple[Fraction, ...]

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)

ZERO = Fraction(0)


class LpInputError(ValueError):
    pass


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _vec(values: Sequence) -> Vector:
    return tuple(parse_rational(v) for v in values)


def _opt(v) -> Fraction | None:
    return None if v is None else parse_rational(v)


@dataclass(frozen=True)
class LinearProgram:
    objective: Vector
    rows: tuple[Vector, ...]
    relations: tuple[str, ...]
    rhs: Vector
    lower: tuple[Fraction | None, ...] = ()
    upper: tuple[Fraction | None, ...] = ()

    def __post_init__(self) -> None:
        obj = _vec(self.objective)
        n = len(obj)
        rows = tuple(_vec(r) for r in self.rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise LpInputError(f"row {i} has length {len(r)}, objective has {n}")
        rels = tuple(self.relations)
        if len(rels) != len(rows):
            raise LpInputError(f"{len(rels)} relations for {len(rows)} rows")
        for i, rel in enumerate(rels):
            if rel not in _RELATIONS:
                raise LpInputError(f"relation {i}: unknown relation {rel!r}")
        rhs = _vec(self.rhs)
        if len(rhs) != len(rows):
            raise LpInputError(f"{len(rhs)} right-hand sides for {len(rows)} rows")
        lower = tuple(_opt(v) for v in self.lower) if self.lower else (None,) * n
        upper = tuple(_opt(v) for v in self.upper) if self.upper else (None,) * n
        if len(lower) != n or len(upper) != n:
            raise LpInputError("bounds must have one entry per variable")
        for j, (lo, hi) in enumerate(zip(lower, upper)):
            if lo is not None and hi is not None and lo > hi:
                raise LpInputError(f"variable {j}: lower bound exceeds upper bound")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def expanded(self) -> tuple[list[Vector], list[str], list[Fraction]]:
        """Constraint rows followed by the bound rows, in certificate order."""
        n = self.num_vars
        rows = list(self.rows)
        rels = list(self.relations)
        rhs = list(self.rhs)
        for j in range(n):
            unit = tuple(Fraction(int(k == j)) for k in range(n))
            if self.lower[j] is not None:
                rows.append(unit)
                rels.append(GE)
                rhs.append(self.lower[j])
            if self.upper[j] is not None:
                rows.append(unit)
                rels.append(LE)
                rhs.append(self.upper[j])
        return rows, rels, rhs


@dataclass(frozen=True)
class Certificate:
    kind: str  # "optimality" | "farkas" | "ray"
    dual: Vector | None = None
    point: Vector | None = None
    direction: Vector | None = None


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    point: Vector | None
    value: Fraction | None
    certificate: Certificate


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), ZERO)


class _Tableau:
    """Dense tableau ``T z = b`` with reduced-cost row ``d`` for a max problem."""

    def __init__(self, rows: list[list[Fraction]], b: list[Fraction], basis: list[int]):
        self.T = rows
        self.b = b
        self.basis = basis
        self.d: list[Fraction] = []

    def price(self, cost: list[Fraction]) -> None:
        d = list(cost)
        for i, k in enumerate(self.basis):
            ck = cost[k]
            if ck:
                row = self.T[i]
                for j, v in enumerate(row):
                    if v:
                        d[j] -= ck * v
        self.d = d

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        prow = T[r]
        inv = 1 / prow[j]
        if inv != 1:
            prow = [v * inv if v else v for v in prow]
            T[r] = prow
            self.b[r] *= inv
        nz = [k for k, v in enumerate(prow) if v]
        br = self.b[r]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
                if br:
                    self.b[i] -= f * br
        f = self.d[j]
        if f:
            d = self.d
            for k in nz:
                d[k] -= f * prow[k]
        self.basis[r] = j

    def run(self, allowed: list[int]) -> int | None:
        """Iterate to optimality; return an unbounded entering column or None."""
        while True:
            j = next((k for k in allowed if self.d[k] > 0), None)
            if j is None:
                return None
            best = None
            for i, row in enumerate(self.T):
                a = row[j]
                if a > 0:
                    ratio = self.b[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return j
            self.pivot(best[1], j)


def solve(prob: LinearProgram) -> LpOutcome:
    """Solve ``prob`` exactly; the outcome always carries a certificate."""
    n = prob.num_vars
    rows_x, rels_x, rhs_x = prob.expanded()
    ncons = len(prob.rows)

    # x_j = shift_j + sum(sign * z_col) over the standard-form columns of j
    shift = [ZERO] * n
    zcols: list[tuple[int, int]] = []
    substituted: dict[int, int] = {}  # expanded row index -> variable
    kept: list[int] = list(range(ncons))
    r = ncons
    for j in range(n):
        lo, hi = prob.lower[j], prob.upper[j]
        if lo is not None:
            shift[j] = lo
            zcols.append((j, 1))
            substituted[r] = j
            r += 1
            if hi is not None:
                kept.append(r)
                r += 1
        elif hi is not None:
            shift[j] = hi
            zcols.append((j, -1))
            substituted[r] = j
            r += 1
        else:
            zcols.append((j, 1))
            zcols.append((j, -1))

    nz = len(zcols)
    m = len(kept)
    nslack = sum(1 for i in kept if rels_x[i] != EQ)
    ncols_noart = nz + nslack
    T: list[list[Fraction]] = []
    b: list[Fraction] = []
    flip: list[int] = []
    init: list[int] = []
    slack_col = nz
    art_rows: list[int] = []
    for i in kept:
        a = rows_x[i]
        row = [a[j] * s if a[j] else ZERO for j, s in zcols]
        rhs = rhs_x[i] - _dot(a, shift)
        slack_sign = {LE: 1, GE: -1, EQ: 0}[rels_x[i]]
        s = -1 if rhs < 0 else 1
        row = [-v if s < 0 and v else v for v in row]
        T.append(row)
        b.append(rhs * s)
        flip.append(s)
        if slack_sign:
            init.append(slack_col if slack_sign * s > 0 else -1)
            slack_sign *= s
            slack_col += 1
        else:
            init.append(-1)
        # slack coefficient stored later once widths are known
        art_rows.append(slack_sign)
    # assemble slack and artificial columns
    nart = sum(1 for k in init if k < 0)
    width = ncols_noart + nart
    col = nz
    art = ncols_noart
    for i in range(m):
        T[i].extend([ZERO] * (width - nz))
        if art_rows[i]:
            T[i][col] = Fraction(art_rows[i])
            col += 1
        if init[i] < 0:
            T[i][art] = Fraction(1)
            init[i] = art
            art += 1
    tab = _Tableau(T, b, list(init))

    def dual_from(cost: list[Fraction]) -> list[Fraction]:
        # y_i = c_k - d_k for the column k that started as e_i
        return [(cost[k] - tab.d[k]) * s for k, s in zip(init, flip)]

    def full_dual(y_kept: list[Fraction], target: Sequence[Fraction]) -> Vector:
        y = [ZERO] * len(rows_x)
        for i, v in zip(kept, y_kept):
            y[i] = v
        aty = [ZERO] * n
        for i, v in zip(kept, y_kept):
            if v:
                for j, a in enumerate(rows_x[i]):
                    if a:
                        aty[j] += v * a
        for i, j in substituted.items():
            y[i] = target[j] - aty[j]
        return tuple(y)

    def point() -> Vector:
        z = [ZERO] * width
        for i, k in enumerate(tab.basis):
            z[k] = tab.b[i]
        x = list(shift)
        for k, (j, s) in enumerate(zcols):
            if z[k]:
                x[j] += s * z[k]
        return tuple(x)

    if nart:
        cost1 = [ZERO] * ncols_noart + [Fraction(-1)] * nart
        tab.price(cost1)
        tab.run(list(range(width)))
        if any(tab.b[i] != 0 for i, k in enumerate(tab.basis) if k >= ncols_noart):
            y = full_dual(dual_from(cost1), [ZERO] * n)
            return LpOutcome(Status.INFEASIBLE, None, None, Certificate("farkas", dual=y))
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if tab.basis[i] >= ncols_noart:
                k = next((k for k in range(ncols_noart) if tab.T[i][k] != 0), None)
                if k is not None:
                    tab.d = [ZERO] * width
                    tab.pivot(i, k)

    cost = [ZERO] * width
    for k, (j, s) in enumerate(zcols):
        cost[k] = prob.objective[j] * s
    tab.price(cost)
    entering = tab.run(list(range(ncols_noart)))
    x = point()
    if entering is not None:
        dz = [ZERO] * width
        dz[entering] = Fraction(1)
        for i, k in enumerate(tab.basis):
            dz[k] = -tab.T[i][entering]
        dx = [ZERO] * n
        for k, (j, s) in enumerate(zcols):
            if dz[k]:
                dx[j] += s * dz[k]
        return LpOutcome(
            Status.UNBOUNDED, x, None, Certificate("ray", point=x, direction=tuple(dx))
        )
    y = full_dual(dual_from(cost), prob.objective)
    value = _dot(prob.objective, x)
    return LpOutcome(Status.OPTIMAL, x, value, Certificate("optimality", dual=y, point=x))


def _feasible(rows, rels, rhs, x) -> bool:
    for a, rel, bi in zip(rows, rels, rhs):
        v = _dot(a, x)
        if (rel == LE and v > bi) or (rel == GE and v < bi) or (rel == EQ and v != bi):
            return False
    return True


def _sign_ok(rels, y) -> bool:
    return all(
        (rel == EQ) or (rel == LE and v >= 0) or (rel == GE and v <= 0)
        for rel, v in zip(rels, y)
    )


def _transpose_times(rows, y, n) -> list[Fraction]:
    out = [ZERO] * n
    for a, v in zip(rows, y):
        if v:
            for j, aj in enumerate(a):
                if aj:
                    out[j] += v * aj
    return out


def check_certificate(prob: LinearProgram, out: LpOutcome) -> bool:
    """Re-verify ``out`` against ``prob`` with exact arithmetic only."""
    try:
        return _check(prob, out)
    except (TypeError, ValueError, AttributeError):
        return False


def _check(prob: LinearProgram, out: LpOutcome) -> bool:
    rows, rels, rhs = prob.expanded()
    n = prob.num_vars
    cert = out.certificate
    if out.status is Status.OPTIMAL:
        x, y = out.point, cert.dual
        if cert.kind != "optimality" or x is None or y is None:
            return False
        if len(x) != n or len(y) != len(rows):
            return False
        if not _feasible(rows, rels, rhs, x) or not _sign_ok(rels, y):
            return False
        if _transpose_times(rows, y, n) != list(prob.objective):
            return False
        value = _dot(prob.objective, x)
        return _dot(rhs, y) == value and out.value == value
    if out.status is Status.INFEASIBLE:
        y = cert.dual
        if cert.kind != "farkas" or y is None or len(y) != len(rows):
            return False
        if not _sign_ok(rels, y):
            return False
        return all(v == 0 for v in _transpose_times(rows, y, n)) and _dot(rhs, y) < 0
    if out.status is Status.UNBOUNDED:
        x, d = cert.point, cert.direction
        if cert.kind != "ray" or x is None or d is None or len(x) != n or len(d) != n:
            return False
        if not _feasible(rows, rels, rhs, x):
            return False
        for a, rel in zip(rows, rels):
            v = _dot(a, d)
            if (rel == LE and v > 0) or (rel == GE and v < 0) or (rel == EQ and v != 0):
                return False
        return _dot(prob.objective, d) > 0
    return False
