"""Graded nilpotent Lie algebras over Q and their groups in exponential coordinates.

Group multiplication is the Baker-Campbell-Hausdorff series truncated at the
nilpotency step.  All operations are generic over the coordinate scalar type:
``Fraction``/``int`` (exact), ``float``/numpy arrays (vectorised float), or
sympy polynomial-ring elements (symbolic).  Indices are 0-based in code and
1-based in the JSON config format.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Mapping, Sequence

import numpy as np

from . import linalg
from .rational import format_rational, parse_rational

MAX_DIM = 16

P, Q = 0, 1


# --------------------------------------------------------------------------
# BCH word coefficients
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bch_word_coefficients(max_len: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficient of every right-nested bracket word in the BCH series.

    The series sums, over compositions (r_1, s_1, ..., r_m, s_m) with
    r_j + s_j > 0, the term

        (-1)^(m-1)/m * [P^r1 Q^s1 ... P^rm Q^sm] / (N * prod r_j! s_j!)

    with N the total length.  Different compositions can spell the same word
    (e.g. ``[P Q]`` as one block or as ``[P][Q]``), so the coefficients are
    merged per word; a word's compositions are exactly its splittings into
    blocks of the form P*Q*.  Words whose last two letters coincide have a
    zero bracket and are omitted.
    """
    inv_fact = [Fraction(1, math.factorial(k)) for k in range(max_len + 1)]
    out: dict[tuple[int, ...], Fraction] = {}

    def block_weight(word: tuple[int, ...], start: int, end: int) -> Fraction | None:
        seg = word[start:end]
        r = 0
        while r < len(seg) and seg[r] == P:
            r += 1
        if any(letter == P for letter in seg[r:]):
            return None
        return inv_fact[r] * inv_fact[len(seg) - r]

    for n in range(1, max_len + 1):
        for word in itertools.product((P, Q), repeat=n):
            if n >= 2 and word[-1] == word[-2]:
                continue
            # ways[pos][m]: weighted count of splittings of word[:pos] into m blocks
            ways: list[dict[int, Fraction]] = [dict() for _ in range(n + 1)]
            ways[0][0] = Fraction(1)
            for end in range(1, n + 1):
                acc = ways[end]
                for start in range(end):
                    if not ways[start]:
                        continue
                    w = block_weight(word, start, end)
                    if w is None:
                        continue
                    for m, v in ways[start].items():
                        acc[m + 1] = acc.get(m + 1, 0) + v * w
            total = sum(Fraction((-1) ** (m - 1), m) * v for m, v in ways[n].items())
            coeff = total / n
            if coeff:
                out[word] = coeff
    return out


@lru_cache(maxsize=None)
def _integer_word_coefficients(max_len: int) -> tuple[dict[int, int], dict[tuple[int, ...], int]]:
    """Word coefficients over a common denominator per word length."""
    coeffs = bch_word_coefficients(max_len)
    lcms: dict[int, int] = {}
    for word, c in coeffs.items():
        lcms[len(word)] = math.lcm(lcms.get(len(word), 1), c.denominator)
    numerators = {w: int(c * lcms[len(w)]) for w, c in coeffs.items()}
    return lcms, numerators


def _is_float_like(x: Any) -> bool:
    return isinstance(x, (float, np.floating, np.ndarray))


def _vector_is_zero(vec: Sequence[Any]) -> bool:
    for x in vec:
        if isinstance(x, np.ndarray):
            if x.any():
                return False
        elif x:
            return False
    return True


# --------------------------------------------------------------------------
# The algebra
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    graded_ok: bool
    stratified_ok: bool
    step: int | None
    lower_central_dims: tuple[int, ...]
    violations: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "graded_ok": self.graded_ok,
            "stratified_ok": self.stratified_ok,
            "step": self.step,
            "lower_central_dims": list(self.lower_central_dims),
            "violations": list(self.violations),
        }


class GradedLieAlgebra:
    """A graded Lie algebra with basis X_1..X_n and rational structure constants.

    ``constants[i][j][k]`` is the coefficient of X_k in [X_i, X_j].  The table
    is stored densely (n <= 16).  Construction does not enforce the Lie
    axioms; :meth:`validate` enumerates violations instead, so that broken
    fixtures can be inspected.
    """

    def __init__(self, weights: Sequence[int], constants, name: str = ""):
        weights = tuple(int(w) for w in weights)
        n = len(weights)
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {n}")
        if any(w < 1 for w in weights):
            raise ValueError("weights must be positive integers")
        table = [[[Fraction(constants[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
        self.weights = weights
        self.dim = n
        self.name = name
        self.constants = tuple(tuple(tuple(row) for row in plane) for plane in table)
        self._sparse = tuple(
            (i, j, k, c)
            for i in range(n) for j in range(n) for k in range(n)
            if (c := self.constants[i][j][k])
        )
        self._antisymmetric = all(
            self.constants[i][j][k] == -self.constants[j][i][k]
            for i in range(n) for j in range(n) for k in range(n)
        )
        if self._antisymmetric:
            self._fast = tuple((i, j, k, c) for i, j, k, c in self._sparse if i < j)
        else:
            self._fast = self._sparse
        self._fast_float = tuple((i, j, k, float(c)) for i, j, k, c in self._fast)

    @classmethod
    def from_brackets(cls, weights: Sequence[int], brackets: Mapping[tuple[int, int], Mapping[int, Any]],
                      name: str = "") -> "GradedLieAlgebra":
        """Build from ``{(i, j): {k: c}}`` (0-based), filling in [X_j, X_i] = -[X_i, X_j]
        whenever the reversed pair is not given explicitly."""
        n = len(weights)
        table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), coeffs in brackets.items():
            for k, c in coeffs.items():
                table[i][j][k] = Fraction(c)
        for (i, j), coeffs in brackets.items():
            if (j, i) not in brackets:
                for k, c in coeffs.items():
                    table[j][i][k] = -Fraction(c)
        return cls(weights, table, name=name)

    def __repr__(self) -> str:
        label = self.name or f"dim={self.dim}"
        return f"GradedLieAlgebra({label}, weights={self.weights})"

    @cached_property
    def key(self) -> tuple:
        return (self.weights, tuple((i, j, k, c) for i, j, k, c in self._sparse))

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedLieAlgebra) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    # -- structure ---------------------------------------------------------

    @cached_property
    def layers(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for idx, w in enumerate(self.weights):
            out.setdefault(w, []).append(idx)
        return {w: tuple(v) for w, v in sorted(out.items())}

    @property
    def first_layer(self) -> tuple[int, ...]:
        return self.layers.get(1, ())

    @property
    def max_weight(self) -> int:
        return max(self.weights)

    @cached_property
    def lower_central_series(self) -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
        """Row-reduced bases of g_1 = g, g_{k+1} = [g, g_k], down to {0}."""
        n = self.dim
        basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        series = [tuple(basis)]
        current = basis
        for _ in range(n + 1):
            brackets = [self.bracket(e, v) for e in basis for v in current]
            nxt = linalg.row_space([b for b in brackets if any(b)], n)
            series.append(tuple(nxt))
            if not nxt or len(nxt) == len(current):
                break
            current = nxt
        return tuple(series)

    @cached_property
    def step(self) -> int | None:
        """Nilpotency step, or None if the lower central series stalls."""
        series = self.lower_central_series
        if series[-1]:
            return None
        return len(series) - 1

    @property
    def bch_depth(self) -> int:
        """Longest bracket word that can be nonzero."""
        return self.step if self.step is not None else self.max_weight

    # -- algebra operations --------------------------------------------------

    def _check(self, *vectors: Sequence[Any]) -> None:
        for v in vectors:
            if len(v) != self.dim:
                raise ValueError(f"expected {self.dim} coordinates, got {len(v)}")

    def bracket(self, x: Sequence[Any], y: Sequence[Any]) -> list:
        self._check(x, y)
        return self._bracket(x, y, _is_float_like(x[0]) or _is_float_like(y[0]))

    def _bracket(self, x, y, floaty: bool) -> list:
        out: list[Any] = [0] * self.dim
        if self._antisymmetric:
            for i, j, k, c in (self._fast_float if floaty else self._fast):
                out[k] = out[k] + c * (x[i] * y[j] - x[j] * y[i])
        else:
            for i, j, k, c in self._sparse:
                out[k] = out[k] + (float(c) if floaty else c) * x[i] * y[j]
        return out

    def multiply(self, p: Sequence[Any], q: Sequence[Any]) -> tuple:
        """BCH product p*q in exponential coordinates of the first kind."""
        self._check(p, q)
        p, q = tuple(p), tuple(q)
        if all(isinstance(v, (int, Fraction)) for v in p + q):
            return self._multiply_rational(p, q)
        return self._multiply_generic(p, q, max_q=None)

    bch_product = multiply

    def _word_walk(self, p, q, bracket, max_q):
        """Yield (word, bracket value) for every nonzero right-nested word of
        length 2..depth, built right to left: [a w] = [a, [w]]."""
        depth = self.bch_depth
        letters = (p, q)
        stack = [((P,), p, 0), ((Q,), q, 1)]
        while stack:
            word, value, nq = stack.pop()
            if len(word) >= depth:
                continue
            for a in (P, Q):
                if len(word) == 1 and word[0] == a:
                    continue
                if a == Q and max_q is not None and nq >= max_q:
                    continue
                b = bracket(letters[a], value)
                if _vector_is_zero(b):
                    continue
                new_word = (a,) + word
                yield new_word, b
                stack.append((new_word, b, nq + (a == Q)))

    def _multiply_generic(self, p, q, max_q):
        floaty = any(_is_float_like(v) for v in p + q)
        coeffs = bch_word_coefficients(self.bch_depth)
        if max_q == 1:
            result = list(q)
        else:
            result = [a + b for a, b in zip(p, q)]

        def bracket(x, y):
            return self._bracket(x, y, floaty)

        for word, b in self._word_walk(p, q, bracket, max_q):
            c = coeffs.get(word)
            if not c or (max_q is not None and word.count(Q) != max_q):
                continue
            cc = float(c) if floaty else c
            for k in range(self.dim):
                result[k] = result[k] + cc * b[k]
        return tuple(result)

    @cached_property
    def _integer_constants(self) -> tuple[int, tuple]:
        scale = math.lcm(*(c.denominator for *_, c in self._sparse)) if self._sparse else 1
        entries = tuple((i, j, k, int(c * scale)) for i, j, k, c in self._fast)
        return scale, entries

    def _multiply_rational(self, p, q) -> tuple:
        # Exact product over Python ints: clear denominators of the inputs and of
        # the structure constants, then divide once per word length at the end.
        scale, entries = self._integer_constants
        antisym = self._antisymmetric
        n = self.dim
        denom = math.lcm(*(Fraction(v).denominator for v in p + q))
        pi = [int(Fraction(v) * denom) for v in p]
        qi = [int(Fraction(v) * denom) for v in q]

        def bracket(x, y):
            out = [0] * n
            if antisym:
                for i, j, k, c in entries:
                    out[k] += c * (x[i] * y[j] - x[j] * y[i])
            else:
                for i, j, k, c in entries:
                    out[k] += c * x[i] * y[j]
            return out

        lcms, numerators = _integer_word_coefficients(self.bch_depth)
        sums: dict[int, list[int]] = {}
        for word, b in self._word_walk(pi, qi, bracket, None):
            num = numerators.get(word)
            if not num:
                continue
            acc = sums.setdefault(len(word), [0] * n)
            for k in range(n):
                if b[k]:
                    acc[k] += num * b[k]
        result = [Fraction(a) + Fraction(b) for a, b in zip(p, q)]
        for length, acc in sums.items():
            d = lcms[length] * scale ** (length - 1) * denom ** length
            for k in range(n):
                if acc[k]:
                    result[k] += Fraction(acc[k], d)
        return tuple(result)

    def linear_part(self, p: Sequence[Any], x: Sequence[Any]) -> tuple:
        """Coefficient of t in p * (t x), i.e. the BCH words with exactly one
        letter from the second factor.  For first-layer x this is the
        t-linear coefficient of p * dilate(t, x)."""
        self._check(p, x)
        return self._multiply_generic(tuple(p), tuple(x), max_q=1)


    def inverse(self, p: Sequence[Any]) -> tuple:
        return tuple(-v for v in p)

    def identity(self) -> tuple:
        return (Fraction(0),) * self.dim

    def dilate(self, t, p: Sequence[Any]) -> tuple:
        self._check(p)
        if isinstance(t, (int, float, Fraction)) and t <= 0:
            raise ValueError("dilation factor must be positive")
        return tuple(v * t ** w for v, w in zip(p, self.weights))

    def product_expansion(self, p: Sequence[Any], x: Sequence[Any]) -> list[list]:
        """Coordinates of p * dilate(t, x) as polynomials in t.

        Entry i is the coefficient list [c_0, ..., c_{nu_i}], recovered by
        exact interpolation at t = 1, ..., nu_i + 1.
        """
        self._check(p, x)
        top = self.max_weight
        ts = [Fraction(t) for t in range(1, top + 2)]
        values = [self.multiply(p, self.dilate(t, x)) for t in ts]
        return [_interpolate(ts[: w + 1], [v[i] for v in values[: w + 1]])
                for i, w in enumerate(self.weights)]

    def linear_coefficients(self, p: Sequence[Any], method: str = "series") -> list[tuple]:
        """Matrix whose row i holds the t-coefficient of (p * dilate(t, x))_i
        against each first-layer coordinate of x.

        By homogeneity this coefficient is linear in the first-layer
        coordinates of x and ignores the others, so it is read off at the
        first-layer basis vectors.  ``method="series"`` keeps only the BCH
        words linear in x; ``method="interpolate"`` interpolates the full
        product in t (slower, used as a cross-check).
        """
        self._check(p)
        zero = Fraction(0)
        columns = []
        for k in self.first_layer:
            e = [zero] * self.dim
            e[k] = Fraction(1)
            if method == "series":
                columns.append(list(self.linear_part(p, e)))
            elif method == "interpolate":
                expansion = self.product_expansion(p, e)
                columns.append([poly[1] if len(poly) > 1 else 0 for poly in expansion])
            else:
                raise ValueError(f"unknown method {method!r}")
        return [tuple(col[i] for col in columns) for i in range(self.dim)]

    def linear_coefficient(self, p: Sequence[Any], i: int) -> tuple:
        return self.linear_coefficients(p)[i]

    @cached_property
    def _symbolic_ring(self):
        from sympy import QQ
        from sympy.polys.rings import ring

        names = ",".join(f"a{k + 1}" for k in range(self.dim))
        return ring(names, QQ)

    @cached_property
    def linear_coefficient_polys(self) -> list[tuple]:
        """:meth:`linear_coefficients` at a symbolic point a_1..a_n (sympy ring elements)."""
        R, *gens = self._symbolic_ring
        return self.linear_coefficients(gens)

    def product_polynomial(self) -> "ProductPolynomial":
        from sympy import QQ
        from sympy.polys.rings import ring

        n = self.dim
        names = ",".join([f"x{k + 1}" for k in range(n)] + [f"y{k + 1}" for k in range(n)])
        R, *gens = ring(names, QQ)
        coords = self.multiply(gens[:n], gens[n:])
        return ProductPolynomial(self, R, tuple(coords))

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        n = self.dim
        c = self.constants
        violations: list[str] = []
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if c[i][j][k] != -c[j][i][k] and (i <= j):
                        violations.append(f"antisymmetry: [X{i+1},X{j+1}] vs [X{j+1},X{i+1}] at X{k+1}")
        basis = [tuple(Fraction(int(a == b)) for b in range(n)) for a in range(n)]
        for i, j, k in itertools.combinations(range(n), 3):
            x, y, z = basis[i], basis[j], basis[k]
            terms = (self.bracket(x, self.bracket(y, z)), self.bracket(y, self.bracket(z, x)),
                     self.bracket(z, self.bracket(x, y)))
            if any(sum(t[r] for t in terms) for r in range(n)):
                violations.append(f"jacobi: (X{i+1},X{j+1},X{k+1})")
        w = self.weights
        for i, j, k, val in self._sparse:
            if w[k] != w[i] + w[j]:
                violations.append(f"grading: [X{i+1},X{j+1}] has X{k+1} with weight {w[k]} != {w[i]}+{w[j]}")
        graded_ok = not violations

        series = self.lower_central_series
        dims = tuple(len(g) for g in series)
        step = self.step

        stratified_ok = graded_ok
        layers = self.layers
        top = self.max_weight
        if stratified_ok and sorted(layers) != list(range(1, top + 1)):
            stratified_ok = False
            violations.append("stratification: layer weights are not 1..s")
        if stratified_ok:
            v1 = [basis[i] for i in layers[1]]
            for j in range(1, top + 1):
                vj = [basis[i] for i in layers[j]]
                spanned = [b for b in (self.bracket(a, b_) for a in v1 for b_ in vj) if any(b)]
                target = [basis[i] for i in layers.get(j + 1, ())]
                if not linalg.same_span(spanned, target, n):
                    stratified_ok = False
                    violations.append(f"stratification: [V1,V{j}] != V{j + 1}")
                    break
        return ValidationReport(graded_ok, stratified_ok, step, dims, tuple(violations))

    # -- config ------------------------------------------------------------

    def to_config(self) -> dict:
        brackets = []
        n = self.dim
        for i in range(n):
            for j in range(n):
                if self._antisymmetric and i >= j:
                    continue
                coeffs = {str(k + 1): format_rational(self.constants[i][j][k])
                          for k in range(n) if self.constants[i][j][k]}
                if coeffs:
                    brackets.append({"i": i + 1, "j": j + 1, "coeffs": coeffs})
        out = {"dim": n, "weights": list(self.weights), "brackets": brackets}
        if self.name:
            out["name"] = self.name
        return out


@dataclass(frozen=True)
class ProductPolynomial:
    """Symbolic BCH product: coordinate j of x*y as a polynomial in x_1..x_n, y_1..y_n."""

    algebra: GradedLieAlgebra
    ring: Any
    coords: tuple

    def monomials(self, j: int) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(tuple(m), Fraction(int(c.numerator), int(c.denominator)))
                for m, c in self.coords[j].terms()]

    def homogeneous_degree(self, exponents: Sequence[int]) -> int:
        n = self.algebra.dim
        w = self.algebra.weights
        return sum(e * w[r % n] for r, e in enumerate(exponents))

    def degree_violations(self) -> list[str]:
        """Monomials breaking the form x_j + y_j + sum c x^a y^b with [a]+[b] = nu_j."""
        n = self.algebra.dim
        bad = []
        for j, wj in enumerate(self.algebra.weights):
            linear = {r: c for r in range(2 * n) for m, c in self.monomials(j)
                      if sum(m) == 1 and m[r] == 1}
            if linear != {j: 1, n + j: 1}:
                bad.append(f"coordinate {j + 1}: linear part {linear}")
            for m, c in self.monomials(j):
                if sum(m) == 1:
                    continue
                if not any(m[:n]) or not any(m[n:]):
                    bad.append(f"coordinate {j + 1}: pure monomial {m}")
                if self.homogeneous_degree(m) != wj:
                    bad.append(f"coordinate {j + 1}: degree {self.homogeneous_degree(m)} for {m}")
        return bad


def _interpolate(ts: Sequence[Fraction], values: Sequence[Any]) -> list:
    """Monomial coefficients of the polynomial through (ts[k], values[k]).

    Newton divided differences; works for any scalar type closed under
    subtraction and multiplication by Fractions.
    """
    n = len(ts)
    table = list(values)
    newton = [table[0]]
    for level in range(1, n):
        table = [(table[k + 1] - table[k]) * Fraction(1, 1) / (ts[k + level] - ts[k])
                 if not _is_float_like(table[k]) else (table[k + 1] - table[k]) / float(ts[k + level] - ts[k])
                 for k in range(n - level)]
        newton.append(table[0])
    # expand sum newton[k] * prod_{r<k} (t - ts[r]) into monomials
    coeffs: list[Any] = [0] * n
    basis: list[Fraction] = [Fraction(1)]
    for k in range(n):
        for d, b in enumerate(basis):
            if b:
                coeffs[d] = coeffs[d] + newton[k] * (b if not _is_float_like(newton[k]) else float(b))
        nxt = [Fraction(0)] * (len(basis) + 1)
        for d, b in enumerate(basis):
            nxt[d + 1] += b
            nxt[d] -= ts[k] * b
        basis = nxt
    return coeffs


# --------------------------------------------------------------------------
# Points
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupPoint:
    """A point of the simply connected group, in exponential coordinates."""

    algebra: GradedLieAlgebra = field(repr=False)
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) != self.algebra.dim:
            raise ValueError("coordinate count does not match the algebra")

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        if other.algebra != self.algebra:
            raise ValueError("points live in different groups")
        return GroupPoint(self.algebra, self.algebra.multiply(self.coords, other.coords))

    def __neg__(self) -> "GroupPoint":
        return GroupPoint(self.algebra, self.algebra.inverse(self.coords))

    inverse = __neg__

    def dilate(self, t) -> "GroupPoint":
        return GroupPoint(self.algebra, self.algebra.dilate(t, self.coords))


# --------------------------------------------------------------------------
# Standard families and fixtures
# --------------------------------------------------------------------------

def heisenberg(n: int = 1) -> GradedLieAlgebra:
    """H_{2n+1}: coordinates (x_1..x_n, y_1..y_n, z), [X_i, Y_i] = Z."""
    if n < 1:
        raise ValueError("Heisenberg index n must be >= 1")
    dim = 2 * n + 1
    if dim > MAX_DIM:
        raise ValueError(f"H_{dim} exceeds the supported dimension {MAX_DIM}")
    weights = [1] * (2 * n) + [2]
    brackets = {(i, n + i): {2 * n: 1} for i in range(n)}
    return GradedLieAlgebra.from_brackets(weights, brackets, name=f"H{dim}")


def filiform(n: int) -> GradedLieAlgebra:
    """L_n: [X_1, X_j] = X_{j+1} for 2 <= j <= n-1, stratified as <X1,X2> + <X3> + ... + <Xn>."""
    if n < 3:
        raise ValueError("filiform index n must be >= 3")
    if n > MAX_DIM:
        raise ValueError(f"L_{n} exceeds the supported dimension {MAX_DIM}")
    weights = [1, 1] + list(range(2, n))
    brackets = {(0, j): {j + 1: 1} for j in range(1, n - 1)}
    return GradedLieAlgebra.from_brackets(weights, brackets, name=f"L{n}")


def abelian(k: int) -> GradedLieAlgebra:
    if k < 1:
        raise ValueError("dimension must be positive")
    return GradedLieAlgebra.from_brackets([1] * k, {}, name=f"R{k}")


def graded_nonstratifiable() -> GradedLieAlgebra:
    """5-dim algebra [X1,Xj] = X_{j+1} (2<=j<=4), [X2,X3] = X5, one basis vector per layer."""
    brackets = {(0, 1): {2: 1}, (0, 2): {3: 1}, (0, 3): {4: 1}, (1, 2): {4: 1}}
    return GradedLieAlgebra.from_brackets([1, 2, 3, 4, 5], brackets, name="graded-nonstratifiable-5")


def nongraduable(weights: Sequence[int] = (1, 2, 3, 4, 5, 6, 7)) -> GradedLieAlgebra:
    """7-dim nilpotent algebra admitting no grading, paired with a trial grading.

    Brackets: [X1,Xj] = X_{j+1} (2<=j<=6), [X2,X3] = X6,
    [X2,X4] = [X5,X2] = [X3,X4] = X7.
    """
    brackets: dict[tuple[int, int], dict[int, int]] = {(0, j): {j + 1: 1} for j in range(1, 6)}
    brackets[(1, 2)] = {5: 1}
    brackets[(1, 3)] = {6: 1}
    brackets[(4, 1)] = {6: 1}
    brackets[(2, 3)] = {6: 1}
    return GradedLieAlgebra.from_brackets(weights, brackets, name="nongraduable-7")


# --------------------------------------------------------------------------
# Config files
# --------------------------------------------------------------------------

_PRESETS = {"H": heisenberg, "L": filiform, "R": abelian}


def from_config(spec: Mapping[str, Any] | str) -> GradedLieAlgebra:
    """Parse a group spec: either a preset name ("H3", "H5", "L6", "R2") or
    ``{dim, weights, brackets: [{i, j, coeffs: {k: "p/q"}}]}`` with 1-based indices."""
    if isinstance(spec, str):
        return preset(spec)
    if "preset" in spec:
        return preset(spec["preset"])
    try:
        dim = int(spec["dim"])
        weights = [int(w) for w in spec["weights"]]
        raw = spec.get("brackets", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed group spec: {exc}") from exc
    if len(weights) != dim:
        raise ValueError("weights length does not match dim")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in raw:
        i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValueError(f"bracket index out of range: {entry}")
        coeffs = {}
        for k, v in entry["coeffs"].items():
            kk = int(k) - 1
            if not 0 <= kk < dim:
                raise ValueError(f"bracket target out of range: {entry}")
            coeffs[kk] = parse_rational(v)
        brackets[(i, j)] = coeffs
    return GradedLieAlgebra.from_brackets(weights, brackets, name=str(spec.get("name", "")))


def preset(name: str) -> GradedLieAlgebra:
    name = name.strip()
    kind, num = name[:1].upper(), name[1:]
    if kind not in _PRESETS or not num.isdigit():
        raise ValueError(f"unknown group preset {name!r} (try H3, H5, L4, R2)")
    size = int(num)
    if kind == "H":
        if size % 2 == 0:
            raise ValueError("Heisenberg presets have odd dimension")
        return heisenberg((size - 1) // 2)
    return _PRESETS[kind](size)


def random_rational_point(rng, dim: int, spread: int = 5, denominator: int = 7) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(rng.integers(-spread * denominator, spread * denominator + 1)), denominator)
                 for _ in range(dim))
