"""Parsing and formatting of exact rationals.

Every scalar in the package is a :class:`fractions.Fraction`. Inputs arrive
as strings in a small grammar (integer, ``p/q`` or finite decimal) so that
binary floating point never enters a computation.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

_RATIONAL_RE = re.compile(r"^([+-]?)(\d+)(?:/(\d+)|\.(\d+))?$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"3"``, ``"-3/4"`` or ``"0.125"`` into an exact Fraction.

    Integers and Fractions pass through. Floats are refused.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"rationals must be given as strings, got {type(text).__name__}")
    s = text.strip().replace("−", "-")
    m = _RATIONAL_RE.match(s)
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    sign, whole, den, frac = m.groups()
    if den is not None:
        if int(den) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        value = Fraction(int(whole), int(den))
    elif frac is not None:
        value = Fraction(int(whole + frac), 10 ** len(frac))
    else:
        value = Fraction(int(whole))
    return -value if sign == "-" else value


def format_rational(x: Fraction | int) -> str:
    return str(Fraction(x))


def to_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


def format_vector(values: Sequence[Fraction]) -> list[str]:
    return [format_rational(v) for v in values]
