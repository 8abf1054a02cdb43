"""Exact linear algebra over the rationals (thin wrapper over sympy's DomainMatrix)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _matrix(rows: Sequence[Sequence], ncols: int | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[QQ.convert(Fraction(v)) for v in r] for r in rows], (len(rows), ncols), QQ)


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by fraction Gaussian elimination (small matrices)."""
    m = [[Fraction(v) for v in r] for r in rows]
    if not m or not m[0]:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        for i in range(r + 1, len(m)):
            if m[i][col]:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def row_space(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Reduced row-echelon basis of the span of ``rows``."""
    if not rows:
        return []
    reduced, pivots = _matrix(rows, ncols).rref()
    out = reduced.to_list()[: len(pivots)]
    return [tuple(_to_fraction(v) for v in r) for r in out]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {v : rows @ v = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    basis = _matrix(rows, ncols).nullspace().to_list()
    return [tuple(_to_fraction(v) for v in r) for r in basis]


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution of ``rows @ v = rhs`` or None when inconsistent."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = _matrix(aug, ncols + 1).rref()
    if ncols in pivots:
        return None
    sol = [Fraction(0)] * ncols
    table = reduced.to_list()
    for r, c in enumerate(pivots):
        sol[c] = _to_fraction(table[r][ncols])
    return tuple(sol)


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> bool:
    return row_space(a, ncols) == row_space(b, ncols)
