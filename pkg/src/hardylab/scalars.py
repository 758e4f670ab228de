"""Shared numeric helpers: exact-vs-float bookkeeping, extended reals,
and parsing/formatting of number literals ("p/q", decimals, "inf")."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence, Union

Number = Union[int, float, Fraction]


def is_exact(value: Any) -> bool:
    """True for values that support exact rational arithmetic."""
    return isinstance(value, Rational) and not isinstance(value, bool)


def all_exact(values: Sequence) -> bool:
    return all(is_exact(v) for v in values)


def parse_number(text: str) -> Number:
    """Parse a number literal.

    "p/q", integer, and decimal strings (including exponent notation)
    become exact ints/Fractions; "inf"/"-inf" become floats.
    """
    token = text.strip().lower()
    if token in ("inf", "+inf"):
        return math.inf
    if token == "-inf":
        return -math.inf
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number literal: {text!r}") from exc
    return int(value) if value.denominator == 1 else value


def format_number(value: Number) -> str:
    """Render for display: rationals as p/q, integral floats without a
    trailing .0, infinities as inf/-inf."""
    if is_exact(value):
        f = Fraction(value)
        if f.denominator == 1:
            return str(f.numerator)
        return f"{f.numerator}/{f.denominator}"
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def json_ready(obj):
    """Recursively convert a value for JSON output: exact rationals render
    as "p/q" strings, non-finite floats as "inf"/"-inf", tuples as lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if is_exact(obj):
        v = Fraction(obj)
        return int(v) if v.denominator == 1 else format_number(v)
    if isinstance(obj, float):
        return float(obj) if math.isfinite(obj) else format_number(obj)
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if hasattr(obj, "to_json"):
        return json_ready(obj.to_json())
    return str(obj)
