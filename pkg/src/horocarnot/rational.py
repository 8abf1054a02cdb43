"""Exact-rational parsing and serialization shared by the JSON formats."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Sequence

import numpy as np


def parse_rational(value: Any) -> Fraction:
    """Parse ``"p/q"`` strings, integers and Fractions into a Fraction.

    Floats are refused: a float in an exact config is almost always a typo for
    a rational, and silently taking its binary expansion breaks round-trips.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational (use a \"p/q\" string): {value!r}")


def format_rational(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(Fraction(value))


def parse_vector(values: Iterable[Any]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


def format_vector(values: Iterable[Any]) -> list[str]:
    return [format_rational(v) for v in values]


def parse_number(value: Any):
    """Like :func:`parse_rational` but lets floats through (float mode)."""
    if isinstance(value, float):
        return value
    return parse_rational(value)


def is_exact(values: Sequence[Any]) -> bool:
    return all(isinstance(v, Rational) for v in values)


def as_float_vector(values: Sequence[Any]) -> np.ndarray:
    return np.array([float(v) for v in values], dtype=float)
