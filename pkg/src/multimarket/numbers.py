"""Numeric backbone: exact rationals by default, machine floats on request.

Every model carries a single numeric mode fixed at construction time.  In
rational mode all values are `fractions.Fraction` and every comparison is
exact (zero tolerance); in float mode values are machine floats and the
comparisons below take an explicit tolerance.  The mode propagates from the
input document to every LP solved downstream.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Num = Union[Fraction, float]

#: default feasibility / duality-gap tolerance in float mode
FLOAT_TOL = 1e-9


def parse_scalar(raw, exact: bool = True) -> Num:
    """Parse a scalar from a document value.

    Strings are treated as exact: ``"3/4"`` and ``"0.75"`` both give the same
    Fraction.  Ints are exact.  Floats are only exact in the binary sense and
    force float mode unless the caller insists on rational conversion.
    """
    if isinstance(raw, bool):
        raise ValueError(f"boolean is not a number: {raw!r}")
    if isinstance(raw, Fraction):
        value: Num = raw
    elif isinstance(raw, int):
        value = Fraction(raw)
    elif isinstance(raw, float):
        value = Fraction(raw) if exact else raw
    elif isinstance(raw, str):
        try:
            value = Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse number {raw!r}") from exc
    else:
        raise ValueError(f"cannot parse number {raw!r}")
    if exact:
        return value if isinstance(value, Fraction) else Fraction(value)
    return float(value)


def scalar_to_json(value: Num):
    """JSON encoding: Fractions as 'p/q' (or 'n') strings, floats rounded
    to 12 significant digits."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return float(f"{value:.12g}")


def format_sig12(value: Num) -> str:
    """Fixed 12-significant-digit text form used for scalar CLI output."""
    return f"{float(value):.12g}"


def tolerance_for(exact: bool) -> Num:
    return Fraction(0) if exact else FLOAT_TOL


def is_zero(value: Num, tol: Num = 0) -> bool:
    return value == 0 if tol == 0 else abs(value) <= tol


def is_close(a: Num, b: Num, tol: Num = 0) -> bool:
    return a == b if tol == 0 else abs(a - b) <= tol * (1 + max(abs(a), abs(b)))


def is_nonneg(value: Num, tol: Num = 0) -> bool:
    return value >= 0 if tol == 0 else value >= -tol


def is_positive(value: Num, tol: Num = 0) -> bool:
    return value > 0 if tol == 0 else value > tol
