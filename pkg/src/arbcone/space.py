"""Finite scenario spaces, weighted pairings and linear subspaces.

A scenario space of dimension ``m`` with positive weights ``p`` models
L1(Omega, P) on a finite Omega. Vectors and functionals are both length-``m``
tuples; they are coupled by ``<f, u> = sum_w p_w f_w u_w``, the norm on
vectors is the weighted l1 norm and the dual norm on functionals is the plain
max norm of the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class ScenarioSpace:
    weights: Vector

    def __post_init__(self) -> None:
        w = tuple(Fraction(x) for x in self.weights)
        if not w:
            raise ValueError("scenario space needs at least one scenario")
        for i, x in enumerate(w):
            if x <= 0:
                raise ValueError(f"weights[{i}]: weight must be positive")
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, m: int) -> ScenarioSpace:
        return cls((Fraction(1),) * m)

    @classmethod
    def uniform(cls, m: int) -> ScenarioSpace:
        return cls((Fraction(1, m),) * m)

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def is_probabilistic(self) -> bool:
        return sum(self.weights) == 1

    def pair(self, f: Sequence[Fraction], u: Sequence[Fraction]) -> Fraction:
        self.check(f)
        self.check(u)
        return sum((p * a * b for p, a, b in zip(self.weights, f, u)), Fraction(0))

    def norm(self, u: Sequence[Fraction]) -> Fraction:
        self.check(u)
        return sum((p * abs(a) for p, a in zip(self.weights, u)), Fraction(0))

    def pairing_row(self, u: Sequence[Fraction]) -> list[Fraction]:
        """Coefficients ``c`` with ``<f, u> = c . f`` for every functional ``f``."""
        self.check(u)
        return [p * a for p, a in zip(self.weights, u)]

    def check(self, u: Sequence) -> None:
        if len(u) != self.dimension:
            raise ValueError(
                f"dimension mismatch: expected length {self.dimension}, got {len(u)}"
            )


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def solve_combination(
    vectors: Sequence[Sequence[Fraction]], target: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """Coefficients ``c`` with ``sum c_i vectors[i] == target``, or None."""
    k = len(vectors)
    m = len(target)
    if k == 0:
        return () if all(t == 0 for t in target) else None
    # augmented system: columns are the vectors, one row per coordinate
    aug = [[Fraction(vectors[i][j]) for i in range(k)] + [Fraction(target[j])] for j in range(m)]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        return None
    coef = [Fraction(0)] * k
    for row, c in zip(red, pivots):
        coef[c] = row[k]
    return tuple(coef)


@dataclass(frozen=True)
class Subspace:
    """The rational span of ``vectors`` inside ``ambient``.

    The original spanning list is kept (coefficients against it are
    meaningful, e.g. as portfolios); a reduced basis is kept for rank and
    membership queries.
    """

    vectors: tuple[Vector, ...]
    ambient: ScenarioSpace
    basis: tuple[Vector, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vs = tuple(tuple(Fraction(x) for x in v) for v in self.vectors)
        for v in vs:
            self.ambient.check(v)
        object.__setattr__(self, "vectors", vs)
        red, _ = rref(vs, self.ambient.dimension)
        object.__setattr__(self, "basis", tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, ambient: ScenarioSpace) -> Subspace:
        return cls((), ambient)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, u: Sequence[Fraction]) -> bool:
        self.ambient.check(u)
        return solve_combination(self.basis, u) is not None

    def coefficients(self, u: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
        """Coefficients of ``u`` against the original spanning vectors."""
        self.ambient.check(u)
        return solve_combination(self.vectors, u)

    def combine(self, coef: Sequence[Fraction]) -> Vector:
        m = self.ambient.dimension
        out = [Fraction(0)] * m
        for c, v in zip(coef, self.vectors):
            if c:
                for j in range(m):
                    out[j] += c * v[j]
        return tuple(out)

    def annihilates(self, f: Sequence[Fraction]) -> bool:
        """True iff the functional ``f`` lies in the annihilator of the subspace."""
        return all(self.ambient.pair(f, v) == 0 for v in self.vectors)

    def rescaled(self, factors: Sequence[Fraction]) -> Subspace:
        return Subspace(
            tuple(tuple(s * x for x in v) for s, v in zip(factors, self.vectors)), self.ambient
        )
