"""Pansu derivatives of layered sup norms, piecewise-linear blow-ups and their families.

At a sphere point p every active layer i contributes one linear functional
per active facet u (or the gradient u of a smooth layer norm):

    l(x) = (lambda_i / i) * <u, C_i(p) x_1>

where C_i(p) holds the t-linear coefficients of the layer-i coordinates of
p * dilate(t, x) against the first-layer coordinates x_1 of x.  The
principal blow-up is the maximum of these functionals and its translates are

    f_t(x) = max_j (l_j(x) - t_j) - max_j (-t_j),   t_j in R u {+inf}.

All blow-ups are represented as :class:`PiecewiseLinearFn` over the
first-layer coordinates only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .algebra import GradedLieAlgebra
from .norms import DEFAULT_TOL, LayeredSupNorm, SphereFace
from .rational import format_rational, parse_number

Vector = tuple


def _exact(values: Iterable[Any]) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def _close(a, b, tol: float) -> bool:
    if _exact((a, b)):
        return a == b
    return abs(float(a) - float(b)) <= tol


def _vec_close(u: Sequence, v: Sequence, tol: float = DEFAULT_TOL) -> bool:
    return len(u) == len(v) and all(_close(a, b, tol) for a, b in zip(u, v))


# --------------------------------------------------------------------------
# Half-spaces and piecewise-linear functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpace:
    """{x : <normal, x> <= rhs}, scaled so that max |normal_i| = 1."""

    normal: Vector
    rhs: Any

    @classmethod
    def make(cls, normal: Sequence, rhs) -> "HalfSpace | None":
        """Normalised half-space; None when it is all of space.  An
        infeasible constant constraint raises ValueError."""
        scale = max((abs(c) for c in normal), default=0)
        if scale == 0 or (not _exact(normal) and float(scale) < 1e-14):
            if rhs >= 0:
                return None
            raise ValueError("empty half-space")
        return cls(tuple(c / scale for c in normal), rhs / scale)

    def contains(self, x: Sequence, tol: float = 0.0) -> bool:
        val = sum(a * b for a, b in zip(self.normal, x))
        if tol == 0.0 and _exact(list(x) + [self.rhs]):
            return val <= self.rhs
        return float(val) <= float(self.rhs) + tol

    def key(self) -> tuple:
        return tuple(float(c) for c in self.normal) + (float(self.rhs),)

    def as_dict(self) -> dict:
        return {"normal": [format_rational(c) for c in self.normal], "rhs": format_rational(self.rhs)}


@dataclass(frozen=True)
class Piece:
    """Affine function coeffs . x + const on the polyhedron given by ``domain``."""

    coeffs: Vector
    const: Any
    domain: tuple[HalfSpace, ...]
    label: str = ""

    def value(self, x: Sequence):
        return sum(a * b for a, b in zip(self.coeffs, x)) + self.const

    def contains(self, x: Sequence, tol: float = 0.0) -> bool:
        return all(h.contains(x, tol) for h in self.domain)

    def key(self) -> tuple:
        return tuple(float(c) for c in self.coeffs) + (float(self.const),)


def _interior_point(domain: Sequence[HalfSpace], m: int, box: float = 1e6):
    """Point maximising the common slack of the constraints; returns (x, slack)."""
    from scipy.optimize import linprog

    if not domain:
        return np.zeros(m), math.inf
    A = np.array([[float(c) for c in h.normal] + [1.0] for h in domain])
    b = np.array([float(h.rhs) for h in domain])
    c = np.zeros(m + 1)
    c[-1] = -1.0
    bounds = [(-box, box)] * m + [(None, 1.0)]
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        return None, -math.inf
    return res.x[:m], res.x[-1]


def _prune_redundant(domain: list[HalfSpace], m: int) -> list[HalfSpace]:
    """Drop duplicates and constraints implied by the others (LP test)."""
    from scipy.optimize import linprog

    unique: list[HalfSpace] = []
    for h in domain:
        if not any(_vec_close(h.normal, g.normal) and _close(h.rhs, g.rhs, DEFAULT_TOL) for g in unique):
            unique.append(h)
    kept = list(unique)
    for h in list(unique):
        others = [g for g in kept if g is not h]
        if not others:
            continue
        A = np.array([[float(c) for c in g.normal] for g in others])
        b = np.array([float(g.rhs) for g in others])
        # maximise <h.normal, x> over the others (plus a big box); redundant if <= rhs
        res = linprog(-np.array([float(c) for c in h.normal]), A_ub=A, b_ub=b,
                      bounds=[(-1e6, 1e6)] * m, method="highs")
        if res.status == 0 and -res.fun <= float(h.rhs) + 1e-9:
            kept = others
    return sorted(kept, key=HalfSpace.key)


class PiecewiseLinearFn:
    """A continuous piecewise-affine function of the first-layer coordinates.

    ``first_layer`` lists the coordinate indices (0-based) of the group that
    the function reads; evaluating a full group point ignores every other
    coordinate.  When built from a maximum of affine functions the max form
    is kept and used for evaluation.
    """

    def __init__(self, pieces: Sequence[Piece], first_layer: Sequence[int], max_form: bool = False):
        self.pieces = tuple(pieces)
        self.first_layer = tuple(first_layer)
        self.m = len(self.first_layer)
        self.max_form = max_form
        if not self.pieces:
            raise ValueError("a piecewise-linear function needs at least one piece")
        for p in self.pieces:
            if len(p.coeffs) != self.m:
                raise ValueError("piece arity does not match the first layer")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_max(cls, affines: Sequence[tuple[Sequence, Any]], first_layer: Sequence[int],
                 labels: Sequence[str] | None = None) -> "PiecewiseLinearFn":
        """max_j (g_j . x + c_j), keeping only functionals that attain the
        maximum on a full-dimensional region."""
        m = len(first_layer)
        labels = list(labels) if labels is not None else [""] * len(affines)
        uniq: list[tuple[Vector, Any, str]] = []
        for (g, c), lab in zip(affines, labels):
            g = tuple(g)
            if any(_vec_close(g, h) and _close(c, d, DEFAULT_TOL) for h, d, _ in uniq):
                continue
            uniq.append((g, c, lab))
        if len(uniq) == 1:
            g, c, lab = uniq[0]
            return cls([Piece(g, c, (), lab)], first_layer, max_form=True)

        def raw_domain(j: int, pool) -> list[HalfSpace]:
            gj, cj, _ = pool[j]
            out = []
            for k, (gk, ck, _) in enumerate(pool):
                if k != j:
                    h = HalfSpace.make([a - b for a, b in zip(gk, gj)], cj - ck)
                    if h is not None:
                        out.append(h)
            return out

        alive = []
        for j in range(len(uniq)):
            _, slack = _interior_point(raw_domain(j, uniq), m)
            if slack > 1e-9:
                alive.append(uniq[j])
        if not alive:
            raise ValueError("degenerate maximum: no full-dimensional piece")
        pieces = []
        for j, (g, c, lab) in enumerate(alive):
            dom = _prune_redundant(raw_domain(j, alive), m) if len(alive) > 1 else []
            pieces.append(Piece(g, c, tuple(dom), lab))
        return cls(pieces, first_layer, max_form=True)

    @classmethod
    def linear(cls, coeffs: Sequence, first_layer: Sequence[int], label: str = "") -> "PiecewiseLinearFn":
        zero = Fraction(0) if _exact(coeffs) else 0.0
        return cls([Piece(tuple(coeffs), zero, (), label)], first_layer, max_form=True)

    # -- evaluation -------------------------------------------------------

    def _restrict(self, x: Sequence) -> tuple:
        """First-layer coordinates of a group point (or the input itself if
        it already has first-layer length)."""
        if len(x) == self.m:
            return tuple(x)
        return tuple(x[i] for i in self.first_layer)

    def __call__(self, x: Sequence):
        v = self._restrict(x)
        if self.max_form:
            return max(p.value(v) for p in self.pieces)
        for p in self.pieces:
            if p.contains(v):
                return p.value(v)
        for p in self.pieces:
            if p.contains(v, tol=1e-9):
                return p.value(v)
        raise ValueError("point not covered by any piece")

    def batch(self, V: np.ndarray) -> np.ndarray:
        """Float evaluation on rows of first-layer coordinates."""
        V = np.asarray(V, dtype=float)
        G = np.array([[float(c) for c in p.coeffs] for p in self.pieces])
        c = np.array([float(p.const) for p in self.pieces])
        vals = V @ G.T + c
        if self.max_form:
            return vals.max(axis=1)
        out = np.full(V.shape[0], np.nan)
        for j, p in enumerate(self.pieces):
            mask = np.ones(V.shape[0], dtype=bool)
            for h in p.domain:
                mask &= V @ np.array([float(a) for a in h.normal]) <= float(h.rhs) + 1e-9
            take = mask & np.isnan(out)
            out[take] = vals[take, j]
        return out

    # -- structure --------------------------------------------------------

    @property
    def exact(self) -> bool:
        return all(_exact(list(p.coeffs) + [p.const]) for p in self.pieces)

    def canonical(self) -> "PiecewiseLinearFn":
        """Merge identical affine pieces, drop empty ones, prune and sort."""
        if self.max_form:
            return PiecewiseLinearFn.from_max([(p.coeffs, p.const) for p in self.pieces],
                                              self.first_layer, [p.label for p in self.pieces])._sorted()
        kept = []
        for p in self.pieces:
            _, slack = _interior_point(p.domain, self.m)
            if slack > 1e-9:
                kept.append(Piece(p.coeffs, p.const, tuple(_prune_redundant(list(p.domain), self.m)), p.label))
        return PiecewiseLinearFn(kept, self.first_layer)._sorted()

    def _sorted(self) -> "PiecewiseLinearFn":
        pieces = sorted(self.pieces, key=lambda p: (p.key(), tuple(h.key() for h in p.domain)))
        return PiecewiseLinearFn(pieces, self.first_layer, self.max_form)

    def continuity_defects(self, tol: float = 1e-9, samples: int = 5, seed: int = 0) -> list[tuple[int, int, float]]:
        """Sampled points on shared piece boundaries where adjacent pieces disagree."""
        from scipy.optimize import linprog

        rng = np.random.default_rng(seed)
        out = []
        for j, pj in enumerate(self.pieces):
            for k in range(j + 1, len(self.pieces)):
                pk = self.pieces[k]
                dom = list(pj.domain) + list(pk.domain)
                if not dom:
                    continue
                A = np.array([[float(c) for c in h.normal] for h in dom])
                b = np.array([float(h.rhs) for h in dom])
                for _ in range(samples):
                    obj = rng.standard_normal(self.m)
                    res = linprog(obj, A_ub=A, b_ub=b, bounds=[(-10, 10)] * self.m, method="highs")
                    if res.status != 0:
                        break
                    gap = abs(float(pj.value(res.x)) - float(pk.value(res.x)))
                    if gap > tol:
                        out.append((j, k, gap))
                        break
        return out

    def higher_layer_invariant(self, algebra: GradedLieAlgebra, rng, trials: int = 5) -> bool:
        """Evaluating at random group points and at copies with resampled
        non-first-layer coordinates gives identical results."""
        others = [i for i in range(algebra.dim) if i not in self.first_layer]
        for _ in range(trials):
            x = [Fraction(int(v), 7) for v in rng.integers(-20, 21, algebra.dim)]
            y = list(x)
            for i in others:
                y[i] = Fraction(int(rng.integers(-50, 51)), 3)
            if self(x) != self(y):
                return False
        return True

    # -- serialisation ----------------------------------------------------

    def to_config(self) -> dict:
        return {
            "first_layer": [i + 1 for i in self.first_layer],
            "max_form": self.max_form,
            "pieces": [
                {"coeffs": {f"x{i + 1}": format_rational(c) for i, c in zip(self.first_layer, p.coeffs)},
                 "const": format_rational(p.const),
                 "domain": [h.as_dict() for h in p.domain],
                 **({"label": p.label} if p.label else {})}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_config(cls, spec: Mapping[str, Any]) -> "PiecewiseLinearFn":
        first = [int(i) - 1 for i in spec["first_layer"]]
        pieces = []
        for entry in spec["pieces"]:
            coeffs = tuple(parse_number(entry["coeffs"].get(f"x{i + 1}", "0")) for i in first)
            const = parse_number(entry.get("const", "0"))
            dom = []
            for h in entry.get("domain", []):
                hs = HalfSpace.make([parse_number(c) for c in h["normal"]], parse_number(h["rhs"]))
                if hs is not None:
                    dom.append(hs)
            pieces.append(Piece(coeffs, const, tuple(dom), entry.get("label", "")))
        return cls(pieces, first, bool(spec.get("max_form", False)))

    def __repr__(self) -> str:
        body = "; ".join(f"{[format_rational(c) for c in p.coeffs]}+{format_rational(p.const)}" for p in self.pieces)
        return f"PiecewiseLinearFn({body})"


def pl_equal(f: PiecewiseLinearFn, g: PiecewiseLinearFn, tol: float = 1e-9, cross_check: bool = True,
             seed: int = 0) -> bool:
    """Equality of canonical piece lists, cross-checked by sampling.

    The cross-check evaluates both functions on a 10x10 grid of [-1,1]^2
    (first two coordinates) and 100 random points; a disagreement between
    the two verdicts raises, since it would mean the canonical forms are
    broken.
    """
    if f.m != g.m:
        return False
    cf, cg = f.canonical(), g.canonical()
    same = len(cf.pieces) == len(cg.pieces) and all(
        _vec_close(p.coeffs, q.coeffs, tol) and _close(p.const, q.const, tol)
        and len(p.domain) == len(q.domain)
        and all(_vec_close(h.normal, k.normal, tol) and _close(h.rhs, k.rhs, tol) for h, k in zip(p.domain, q.domain))
        for p, q in zip(cf.pieces, cg.pieces))
    if cross_check:
        rng = np.random.default_rng(seed)
        grid = np.linspace(-1, 1, 10)
        pts = np.zeros((100, f.m))
        gx, gy = np.meshgrid(grid, grid)
        pts[:, 0] = gx.ravel()
        if f.m > 1:
            pts[:, 1] = gy.ravel()
        pts = np.vstack([pts, rng.uniform(-3, 3, size=(100, f.m))])
        sampled = bool(np.allclose(f.batch(pts), g.batch(pts), atol=1e-7, rtol=0))
        if sampled != same:
            raise RuntimeError("canonical comparison and sampled comparison disagree")
    return same


# --------------------------------------------------------------------------
# Linear coefficients as polynomial jets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Poly:
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __call__(self, a: Sequence):
        total = 0
        for exps, c in self.terms:
            term = c
            for v, e in zip(a, exps):
                if e:
                    term = term * v ** e
            total = total + term
        return total


def _to_poly(elem) -> _Poly:
    return _Poly(tuple((tuple(m), Fraction(int(c.numerator), int(c.denominator))) for m, c in elem.terms()))


@lru_cache(maxsize=None)
def coefficient_jets(algebra: GradedLieAlgebra) -> tuple[tuple[tuple[_Poly, tuple[_Poly, ...]], ...], ...]:
    """jets[i][c] = (P, (dP/da_1, ..., dP/da_n)) where P(a) is the t-linear
    coefficient of coordinate i of a * dilate(t, x) against first-layer
    coordinate number c of x."""
    from sympy import QQ

    R, *gens = algebra._symbolic_ring
    rows = algebra.linear_coefficient_polys
    out = []
    for row in rows:
        cols = []
        for elem in row:
            if isinstance(elem, (int, Fraction)):
                elem = R(QQ(Fraction(elem).numerator, Fraction(elem).denominator))
            cols.append((_to_poly(elem), tuple(_to_poly(elem.diff(g)) for g in gens)))
        out.append(tuple(cols))
    return tuple(out)


def coefficient_matrix(algebra: GradedLieAlgebra, p: Sequence) -> list[list]:
    """C(p): row i, column c = t-linear coefficient of (p * dilate(t, e_c))_i."""
    return [[P(p) for P, _ in row] for row in coefficient_jets(algebra)]


# --------------------------------------------------------------------------
# Partials and families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Partial:
    """One active defining function: layer, facet index (None for smooth)
    and the covector u it pairs with."""

    layer: int
    facet: int | None
    covector: Vector

    @property
    def label(self) -> str:
        return f"L{self.layer}" + (f"F{self.facet}" if self.facet is not None else "S")


def active_partials(norm: LayeredSupNorm, p: Sequence, face: SphereFace | None = None) -> list[Partial]:
    face = face or norm.classify(p)
    out = []
    for i in face.active_layers:
        layer = norm.layers[i - 1]
        if layer.polyhedral:
            for f in face.faces[i]:
                out.append(Partial(i, f, tuple(layer.facets[f])))
        else:
            out.append(Partial(i, None, tuple(layer.gradient(norm.project(p, i)))))
    return out


def partial_functional(norm: LayeredSupNorm, partial: Partial, C: Sequence[Sequence]) -> tuple:
    """(lambda_i / i) u^T C_i as coefficients on the first layer."""
    i = partial.layer
    rows = norm.algebra.layers[i]
    lam = norm.lambdas[i - 1]
    scale = lam / i if not isinstance(lam, float) else lam / i
    m = len(norm.algebra.first_layer)
    return tuple(scale * sum(u * C[r][c] for u, r in zip(partial.covector, rows)) for c in range(m))


@dataclass(frozen=True)
class BlowupFamily:
    """Principal blow-up at a sphere point and the data of its translates."""

    norm: LayeredSupNorm = field(repr=False)
    base_point: tuple
    face: SphereFace
    partials: tuple[Partial, ...]
    functionals: tuple[Vector, ...]
    principal: PiecewiseLinearFn
    degenerate: bool

    @property
    def first_layer(self) -> tuple[int, ...]:
        return self.norm.algebra.first_layer

    def distinct_functionals(self) -> list[Vector]:
        out: list[Vector] = []
        for g in self.functionals:
            if not any(_vec_close(g, h) for h in out):
                out.append(g)
        return out

    def constraint_pds(self) -> list[dict]:
        """For each ordered pair (j, k) of distinct partials the Pansu
        derivative of the boundary constraint between their cones,
        2 (l_k - l_j): piece j is in force where it is <= 0."""
        out = []
        for j, gj in enumerate(self.functionals):
            for k, gk in enumerate(self.functionals):
                if j != k and not _vec_close(gj, gk):
                    out.append({"piece": self.partials[j].label, "other": self.partials[k].label,
                                "pd": tuple(2 * (b - a) for a, b in zip(gj, gk))})
        return out

    def translate(self, t: Sequence) -> PiecewiseLinearFn:
        """max_j (l_j - t_j) - max_j (-t_j), one t_j per distinct functional
        (in :meth:`distinct_functionals` order); math.inf drops a piece."""
        funcs = self.distinct_functionals()
        if len(t) != len(funcs):
            raise ValueError(f"expected {len(funcs)} translation parameters, got {len(t)}")
        finite = [(g, tj) for g, tj in zip(funcs, t) if not (isinstance(tj, float) and math.isinf(tj) and tj > 0)]
        if not finite:
            raise ValueError("every piece was translated to infinity")
        if any(isinstance(tj, float) and math.isinf(tj) for _, tj in finite):
            raise ValueError("translation parameters must be finite or +inf")
        shift = max(-tj for _, tj in finite)
        affines = [(g, -tj - shift) for g, tj in finite]
        return PiecewiseLinearFn.from_max(affines, self.first_layer)

    def region(self, t: Sequence | None = None) -> list[HalfSpace]:
        """Blow-up of the unit ball: {x : l_j(x) <= t_j for all j}."""
        funcs = self.distinct_functionals()
        t = t if t is not None else [0] * len(funcs)
        out = []
        for g, tj in zip(funcs, t):
            if isinstance(tj, float) and math.isinf(tj):
                if tj > 0:
                    continue
                raise EmptyBlowup("translation -inf: the blow-up is empty")
            h = HalfSpace.make(g, tj)
            if h is not None:
                out.append(h)
        return out


class EmptyBlowup(ValueError):
    pass


def assemble_principal(norm: LayeredSupNorm, p: Sequence) -> BlowupFamily:
    """Principal blow-up of the norm at a point of the unit sphere."""
    face = norm.classify(p)
    partials = active_partials(norm, p, face)
    C = norm.algebra.linear_coefficients(p)
    funcs = tuple(partial_functional(norm, pt, C) for pt in partials)
    principal = PiecewiseLinearFn.from_max([(g, _zero_like(g)) for g in funcs], norm.algebra.first_layer,
                                           [pt.label for pt in partials])
    distinct: list[Vector] = []
    for g in funcs:
        if not any(_vec_close(g, h) for h in distinct):
            distinct.append(g)
    degenerate = len(distinct) < len(funcs) or (
        len(distinct) > 1 and _rank([tuple(a - b for a, b in zip(g, distinct[0])) for g in distinct[1:]])
        < len(distinct) - 1)
    return BlowupFamily(norm, tuple(p), face, tuple(partials), funcs, principal, degenerate)


def _zero_like(g: Sequence):
    return Fraction(0) if _exact(g) else 0.0


def _rank(rows: Sequence[Sequence], tol: float = 1e-8) -> int:
    if not rows:
        return 0
    if all(_exact(r) for r in rows):
        return linalg.rank(rows)
    return int(np.linalg.matrix_rank(np.array(rows, dtype=float), tol=tol))


def pansu_single_layer(norm: LayeredSupNorm, p: Sequence, i: int) -> PiecewiseLinearFn:
    """Pansu derivative of the norm at p when layer i alone attains the maximum."""
    face = norm.classify(p)
    if face.active_layers != (i,):
        raise ValueError(f"layer {i} is not the unique active layer (active: {face.active_layers})")
    return assemble_principal(norm, p).principal


def set_blowup(norm: LayeredSupNorm, p: Sequence, t: Sequence | None = None) -> tuple[str, list[HalfSpace]]:
    """Blow-up of the closed unit ball at p (principal, or translated by t).

    Returns ("empty", []) outside the ball, ("all", []) at interior points
    and ("halfspaces", H) at sphere points.
    """
    sign = norm.sphere_sign(p)
    if sign > 0:
        return "empty", []
    if sign < 0:
        return "all", []
    try:
        return "halfspaces", assemble_principal(norm, p).region(t)
    except EmptyBlowup:
        return "empty", []


# --------------------------------------------------------------------------
# Family dimension
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DimensionReport:
    dimension: int
    jacobian_rank: int
    translation_rank: int
    free_parameters: int
    pieces: int
    exact: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class _FaceSampler:
    """Random points of a sphere face with an affine (or local smooth) chart."""

    def __init__(self, norm: LayeredSupNorm, face: SphereFace, rng):
        self.norm = norm
        self.face = face
        self.rng = rng
        alg = norm.algebra
        self.smooth = any(not norm.layers[i - 1].polyhedral for i in face.active_layers)
        self.exact = not self.smooth and all(not isinstance(l, float) for l in norm.lambdas)
        self.layer_dirs: dict[int, list[Vector]] = {}
        self.layer_face: dict[int, Any] = {}
        for j in sorted(alg.layers):
            layer = norm.layers[j - 1]
            k = len(alg.layers[j])
            if j in face.active_layers:
                if layer.polyhedral:
                    facets = tuple(face.faces[j])
                    if k == 1:
                        self.layer_face[j] = [layer.polytope.vertices[0 if layer.facets[facets[0]][0] > 0 else 1]]
                        self.layer_dirs[j] = []
                    else:
                        target = frozenset(facets)
                        cands = [F for F in layer.polytope.faces if F.facet_ids == target]
                        if not cands:
                            raise ValueError(f"facets {facets} of layer {j} do not meet in a face")
                        F = cands[0]
                        self.layer_face[j] = F.vertices
                        self.layer_dirs[j] = F.directions
                else:
                    self.layer_dirs[j] = [None] * (k - 1)
            else:
                self.layer_dirs[j] = [tuple(Fraction(int(a == b)) for b in range(k)) for a in range(k)]
        self.free = sum(len(v) for v in self.layer_dirs.values())

    def point(self):
        """Base point p0 and, for polyhedral faces, the exact chart matrix D (n x d)."""
        norm, alg, rng = self.norm, self.norm.algebra, self.rng
        p = [Fraction(0)] * alg.dim
        cols: list[list] = []
        for j in sorted(alg.layers):
            idx = alg.layers[j]
            lam = norm.lambdas[j - 1]
            layer = norm.layers[j - 1]
            if j in self.face.active_layers and layer.polyhedral:
                verts = self.layer_face[j]
                w = [Fraction(int(rng.integers(1, 60))) for _ in verts]
                tot = sum(w)
                v = [sum(wi * vi[c] for wi, vi in zip(w, verts)) / tot / lam for c in range(len(idx))]
                dirs = self.layer_dirs[j]
            elif j in self.face.active_layers:
                g = rng.standard_normal(len(idx))
                g = g / (float(lam) * layer.value(g))
                v = list(g)
                dirs = []
            else:
                while True:
                    v = [Fraction(int(rng.integers(-90, 91)), 97) for _ in idx]
                    if layer.compare(v, Fraction(1) / lam if not isinstance(lam, float) else 1 / lam) < 0:
                        break
                dirs = self.layer_dirs[j]
            for c, i in enumerate(idx):
                p[i] = v[c]
            for d in dirs:
                col = [Fraction(0)] * alg.dim
                for c, i in enumerate(idx):
                    col[i] = d[c]
                cols.append(col)
        return p, cols


def _functionals_at(norm: LayeredSupNorm, face: SphereFace, p: Sequence) -> list[Vector]:
    partials = active_partials(norm, p, face)
    C = coefficient_matrix(norm.algebra, p)
    return [partial_functional(norm, pt, C) for pt in partials]


def _translation_rank(funcs: Sequence[Vector]) -> int:
    distinct: list[Vector] = []
    for g in funcs:
        if not any(_vec_close(g, h) for h in distinct):
            distinct.append(g)
    if len(distinct) < 2:
        return 0
    diffs = [tuple(a - b for a, b in zip(g, distinct[0])) for g in distinct[1:]]
    return min(len(distinct) - 1, _rank(diffs))


def family_dimension(norm: LayeredSupNorm, face: SphereFace, seed: int = 0, points: int = 3,
                     upper: int | None = None) -> DimensionReport:
    """Dimension of the family of blow-ups over a sphere face.

    Generic rank of the map (face parameters) -> (concatenated partial
    functionals), maximised over ``points`` random parameter points, plus
    min(#distinct partials - 1, rank of their pairwise differences) for
    translations.  ``upper`` (a known upper bound) allows stopping early.
    Polyhedral faces use exact Jacobians from the
    coefficient polynomials; faces with a smooth active layer fall back to
    float central differences in a radial chart.
    """
    if not face.active_layers:
        raise ValueError("empty face")
    rng = np.random.default_rng(seed)
    sampler = _FaceSampler(norm, face, rng)
    best_rank = best_trans = 0
    n_pieces = 0
    for _ in range(points):
        if sampler.exact:
            p, cols = sampler.point()
            jac = _exact_jacobian(norm, face, p, cols)
            funcs = _functionals_at(norm, face, p)
            r = linalg.rank(jac) if jac and jac[0] else 0
        else:
            p, cols = sampler.point()
            funcs, jac = _float_jacobian(norm, face, sampler, p, cols)
            r = int(np.linalg.matrix_rank(jac, tol=1e-6)) if jac.size else 0
        best_rank = max(best_rank, r)
        best_trans = max(best_trans, _translation_rank(funcs))
        n_pieces = max(n_pieces, len(funcs))
        if upper is not None and best_rank + best_trans >= upper:
            break
    return DimensionReport(best_rank + best_trans, best_rank, best_trans, sampler.free, n_pieces, sampler.exact)


def _exact_jacobian(norm: LayeredSupNorm, face: SphereFace, p: Sequence, cols: Sequence[Sequence]) -> list[list]:
    """Rows: entries of the concatenated functionals; columns: face parameters."""
    alg = norm.algebra
    jets = coefficient_jets(alg)
    partials = active_partials(norm, p, face)
    m = len(alg.first_layer)
    needed = sorted({r for pt in partials for r in alg.layers[pt.layer]})
    grads = {(r, c): [g(p) if g.terms else 0 for g in jets[r][c][1]] for r in needed for c in range(m)}
    rows = []
    for pt in partials:
        i = pt.layer
        lam = norm.lambdas[i - 1]
        layer_rows = alg.layers[i]
        for c in range(m):
            row = []
            for col in cols:
                val = 0
                for u, r in zip(pt.covector, layer_rows):
                    if u:
                        val += u * sum(v * d for v, d in zip(col, grads[(r, c)]) if v)
                row.append(lam / i * val)
            rows.append(row)
    return rows


def _float_jacobian(norm: LayeredSupNorm, face: SphereFace, sampler: _FaceSampler, p, cols, h: float = 1e-6):
    """Central differences of the functionals in a chart of the face."""
    alg = norm.algebra
    p = [float(v) for v in p]
    charts = []  # functions theta -> point
    for j in sorted(alg.layers):
        idx = alg.layers[j]
        layer = norm.layers[j - 1]
        lam = float(norm.lambdas[j - 1])
        if j in face.active_layers and not layer.polyhedral:
            v0 = np.array([p[i] for i in idx])
            g = np.array([float(c) for c in layer.gradient(v0)])
            basis = np.linalg.svd(g[None, :])[2][1:]
            for b in basis:
                def move(point, s, idx=idx, v0=v0, b=b, lam=lam, layer=layer):
                    w = v0 + s * b
                    w = w / (lam * layer.value(w))
                    out = list(point)
                    for c, i in enumerate(idx):
                        out[i] = float(w[c])
                    return out
                charts.append(move)
    for col in cols:
        colf = np.array([float(c) for c in col])
        charts.append(lambda point, s, colf=colf: list(np.array(point) + s * colf))

    def funcs_at(point):
        face_here = face
        return [np.array([float(c) for c in g]) for g in _functionals_float(norm, face_here, point)]

    base = funcs_at(p)
    columns = []
    for move in charts:
        plus = np.concatenate(funcs_at(move(p, h)))
        minus = np.concatenate(funcs_at(move(p, -h)))
        columns.append((plus - minus) / (2 * h))
    jac = np.column_stack(columns) if columns else np.zeros((0, 0))
    return [tuple(g) for g in base], jac


def _functionals_float(norm: LayeredSupNorm, face: SphereFace, p: Sequence) -> list[Vector]:
    alg = norm.algebra
    out = []
    C = coefficient_matrix(alg, [float(v) for v in p])
    for i in face.active_layers:
        layer = norm.layers[i - 1]
        v = norm.project(p, i)
        if layer.polyhedral:
            covs = [layer.facets[f] for f in face.faces[i]]
        else:
            covs = [layer.gradient(v)]
        for u in covs:
            out.append(partial_functional(norm, Partial(i, None, tuple(float(c) for c in u)),
                                          [[float(c) for c in row] for row in C]))
    return out
