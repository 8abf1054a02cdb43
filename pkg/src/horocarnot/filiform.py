"""Filiform groups L_n: closed-form linear coefficients and boundary dimensions.

The t-linear part of p * dilate(t, x) in L_n only involves the brackets
[X, ..., X, Y] with a single Y, whose BCH coefficients are Bernoulli
numbers.  Writing beta_m = (-1)^m B_m / m! (B_1 = -1/2), coordinate i >= 3
has linear coefficient

    x_1 * ( -sum_{m=1}^{i-2} beta_m a_1^(m-1) a_(i-m) )  +  x_2 * beta_(i-2) a_1^(i-2),

so the x_2 coefficient vanishes for odd i >= 5 and depends on a_1 only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import filiform, random_rational_point
from .blowup import (PiecewiseLinearFn, coefficient_jets, family_dimension)
from .norms import LayeredSupNorm, SphereFace, homogeneous_sup_norm


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """B_m from sum_{k=0}^{m} C(m+1, k) B_k = 0, B_0 = 1 (so B_1 = -1/2)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return Fraction(1)
    return -sum(math.comb(m + 1, k) * bernoulli(k) for k in range(m)) / (m + 1)


def beta(m: int) -> Fraction:
    """(-1)^m B_m / m!: the coefficient of ad_X^m Y in the t-linear BCH part."""
    return (-1) ** m * bernoulli(m) / math.factorial(m)


def nu(i: int) -> int:
    """Dilation weight of coordinate i (1-based) in L_n."""
    return 1 if i <= 2 else i - 1


def table1_row(n: int, i: int, p: Sequence) -> tuple:
    """(x_1 coefficient, x_2 coefficient) of t in (p * dilate(t, x))_i, 1-based i."""
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range for L_{n}")
    if len(p) != n:
        raise ValueError(f"expected {n} coordinates")
    a = {k + 1: v for k, v in enumerate(p)}
    if i == 1:
        return (Fraction(1), Fraction(0))
    if i == 2:
        return (Fraction(0), Fraction(1))
    c1 = -sum(beta(m) * a[1] ** (m - 1) * a[i - m] for m in range(1, i - 1))
    c2 = beta(i - 2) * a[1] ** (i - 2)
    return (c1, c2)


def table2_pansu(n: int, i: int, p: Sequence, sign: int | None = None) -> PiecewiseLinearFn:
    """Pansu derivative of the homogeneous sup norm at p on the face x_i = +-1.

    Requires |p_i| = 1 and every other homogeneous coordinate strictly below 1.
    """
    if len(p) != n:
        raise ValueError(f"expected {n} coordinates")
    if i <= 2:
        others = [abs(v) for k, v in enumerate(p, start=1) if k != i]
    else:
        others = [max(abs(p[0]), abs(p[1]))] + [abs(v) for k, v in enumerate(p, start=1) if k > 2 and k != i]
    if abs(p[i - 1]) != 1 or any(v >= 1 for v in others):
        raise ValueError(f"p is not in the relative interior of the face x_{i} = +-1")
    s = 1 if p[i - 1] > 0 else -1
    if sign is not None and sign != s:
        raise ValueError("sign does not match the sign of p_i")
    c1, c2 = table1_row(n, i, p)
    return PiecewiseLinearFn.linear((s * c1 / nu(i), s * c2 / nu(i)), (0, 1), label=f"x{i}")


@dataclass(frozen=True)
class CrossValidation:
    n: int
    points: int
    mismatches: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {"n": self.n, "points": self.points, "ok": self.ok,
                "mismatches": [{"i": i, "p": [str(v) for v in p], "engine": [str(v) for v in e],
                                "table": [str(v) for v in t]} for i, p, e, t in self.mismatches]}


def cross_validate(n: int, points: int = 20, seed: int = 0, method: str = "series") -> CrossValidation:
    """Compare the BCH engine's linear coefficients with :func:`table1_row`."""
    if not 3 <= n <= 12:
        raise ValueError("cross-validation is supported for 3 <= n <= 12")
    alg = filiform(n)
    rng = np.random.default_rng(seed)
    bad = []
    for _ in range(points):
        p = random_rational_point(rng, n)
        rows = alg.linear_coefficients(p, method=method)
        for i in range(1, n + 1):
            expected = table1_row(n, i, p)
            if tuple(rows[i - 1]) != expected:
                bad.append((i, p, tuple(rows[i - 1]), expected))
    return CrossValidation(n, points, tuple(bad))


def x2_coefficients_depend_on_a1_only(n: int) -> bool:
    """Symbolic check on the engine's polynomials: d/da_k of every x_2
    coefficient vanishes for k != 1."""
    jets = coefficient_jets(filiform(n))
    for row in jets:
        _, grads = row[1]
        if any(g.terms for k, g in enumerate(grads) if k != 0):
            return False
    return True


# --------------------------------------------------------------------------
# Boundary dimension
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FacePattern:
    """A face of the unit sphere of L_n: higher coordinates fixed to +1 and
    an optional face of the first-layer ball (given by active facet ids)."""

    n: int
    fixed: tuple[int, ...]
    first_layer_facets: tuple[int, ...] = ()
    first_layer_fixed: tuple[int, ...] = ()
    first_layer_smooth: bool = False
    first_layer_params: int = 2

    @property
    def free(self) -> tuple[int, ...]:
        fixed = set(self.fixed) | set(self.first_layer_fixed)
        return tuple(i for i in range(1, self.n + 1) if i not in fixed)

    @property
    def parameters(self) -> int:
        """Dimension of the face: free higher coordinates plus first-layer parameters."""
        return len([i for i in self.free if i > 2]) + self.first_layer_params

    @property
    def uses_first_layer(self) -> bool:
        return bool(self.first_layer_facets) or self.first_layer_smooth

    def sphere_face(self, norm: LayeredSupNorm) -> SphereFace:
        faces: dict[int, tuple] = {}
        signs: dict[int, int] = {}
        if self.uses_first_layer:
            faces[1] = self.first_layer_facets
        for i in self.fixed:
            layer = norm.layers[nu(i) - 1]
            faces[nu(i)] = (next(f for f, u in enumerate(layer.facets) if u[0] > 0),)
            signs[nu(i)] = 1
        return SphereFace(tuple(sorted(faces)), faces, signs, norm.step)

    def sort_key(self) -> tuple:
        """Preference among equally good faces: no first-layer constraint,
        fewest fixed coordinates, most odd fixed indices, then lexicographic."""
        odd = sum(1 for i in self.fixed if i % 2 == 1)
        return (self.uses_first_layer, len(self.fixed) + len(self.first_layer_fixed), -odd,
                self.fixed, self.first_layer_facets)

    def as_dict(self) -> dict:
        out = {"fixed": sorted(self.first_layer_fixed + self.fixed), "free": list(self.free)}
        if self.uses_first_layer:
            out["first_layer_face"] = "boundary" if self.first_layer_smooth else list(self.first_layer_facets)
        return out

    def describe(self) -> str:
        coords = []
        for i in range(1, self.n + 1):
            coords.append("1" if i in self.fixed or i in self.first_layer_fixed else f"a{i}")
        text = "(" + ", ".join(coords) + ")"
        if self.uses_first_layer:
            text += " with (a1, a2) on " + ("the first-layer boundary" if self.first_layer_smooth
                                             else f"first-layer facets {list(self.first_layer_facets)}")
        return text


@dataclass(frozen=True)
class BoundaryDimension:
    n: int
    dimension: int
    witness: FacePattern
    maximizers: tuple[FacePattern, ...]
    evaluated: int
    candidates: int

    @property
    def full_dimensional(self) -> bool:
        return self.dimension == self.n - 1

    def as_dict(self) -> dict:
        return {"n": self.n, "dimension": self.dimension, "full_dimensional": self.full_dimensional,
                "witness": self.witness.as_dict(), "witness_face": self.witness.describe(),
                "maximizers": [m.as_dict() for m in self.maximizers],
                "faces_evaluated": self.evaluated, "faces_enumerated": self.candidates}


def _first_layer_options(norm: LayeredSupNorm) -> list[tuple[tuple[int, ...], tuple[int, ...], bool, int]]:
    """(facet ids, first-layer coordinates constant on the face, smooth,
    face dimension) per option."""
    layer = norm.layers[0]
    options: list[tuple[tuple[int, ...], tuple[int, ...], bool, int]] = [((), (), False, 2)]
    if not layer.polyhedral:
        options.append(((), (), True, 1))
        return options
    for F in layer.polytope.faces:
        ids = tuple(sorted(F.facet_ids))
        # one representative per antipodal pair
        neg = tuple(sorted(layer.facets.index(tuple(-c for c in layer.facets[f])) for f in ids))
        if neg < ids:
            continue
        verts = F.vertices
        constant = tuple(c + 1 for c in range(2) if all(v[c] == verts[0][c] for v in verts))
        options.append((ids, constant, False, F.dim))
    return options


def _bound(pattern: FacePattern, first_pieces: int) -> int:
    pieces = len(pattern.fixed) + first_pieces
    free = pattern.parameters
    return min(free, 2 * pieces) + min(pieces - 1, 2)


def boundary_dimension(n: int, norm: LayeredSupNorm | None = None, seed: int = 0) -> BoundaryDimension:
    """Largest family dimension over sphere faces of L_n (fixed coordinates +1).

    Faces are scored in decreasing order of an a-priori bound (Jacobian rank
    <= min(#free parameters, 2 #pieces), translations <= min(#pieces - 1, 2)),
    and scoring stops once the bound drops below the best value found, so
    every maximiser is found.
    """
    if not 3 <= n <= 12:
        raise ValueError("boundary dimension is supported for 3 <= n <= 12")
    alg = filiform(n)
    norm = norm or homogeneous_sup_norm(alg)
    if norm.algebra != alg:
        raise ValueError("norm does not live on L_n")
    candidates: list[tuple[int, FacePattern]] = []
    for facets, fixed1, smooth, params in _first_layer_options(norm):
        first_pieces = len(facets) + (1 if smooth else 0)
        for k in range(0, n - 1):
            for S in itertools.combinations(range(3, n + 1), k):
                if k == 0 and first_pieces == 0:
                    continue
                pat = FacePattern(n, S, facets, fixed1, smooth, params)
                candidates.append((_bound(pat, first_pieces), pat))
    candidates.sort(key=lambda bp: (-bp[0], bp[1].sort_key()))
    best = -1
    maximizers: list[FacePattern] = []
    evaluated = 0
    for bound, pat in candidates:
        if bound < best:
            break
        dim = family_dimension(norm, pat.sphere_face(norm), seed=seed, upper=bound).dimension
        evaluated += 1
        if dim > best:
            best, maximizers = dim, [pat]
        elif dim == best:
            maximizers.append(pat)
    maximizers.sort(key=FacePattern.sort_key)
    return BoundaryDimension(n, best, maximizers[0], tuple(maximizers), evaluated, len(candidates))


def expected_dimension(n: int) -> int:
    """n - 1 for n <= 7 and ceil(n/2) + 2 from n = 8 on."""
    return n - 1 if n <= 7 else -(-n // 2) + 2
