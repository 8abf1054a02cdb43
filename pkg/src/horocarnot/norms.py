"""Layer norms, layered sup quasi-norms and Guivarc'h rescaling.

A layered sup norm on a graded group is

    |x| = max_j (lambda_j * ||pi_j x||_j) ** (1/j)

where pi_j projects onto the weight-j layer.  Sphere membership only needs
the layer values r_j = lambda_j ||pi_j x||_j, since |x| = 1 iff max_j r_j = 1;
this keeps the exact mode free of radicals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from .algebra import GradedLieAlgebra, from_config as algebra_from_config
from .convexity import SymPolytope, cube, dot
from .rational import format_rational, format_vector, parse_rational, parse_vector

DEFAULT_TOL = 1e-9


def _exact(values: Sequence[Any]) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def compare_layers(a, j: int, b, jp: int) -> int:
    """Sign of a^(1/j) - b^(1/jp) for a, b >= 0, decided by raising both to lcm(j, jp)."""
    if a < 0 or b < 0:
        raise ValueError("layer values must be nonnegative")
    m = math.lcm(j, jp)
    lhs, rhs = Fraction(a) ** (m // j), Fraction(b) ** (m // jp)
    return (lhs > rhs) - (lhs < rhs)


def rational_root(a: Fraction, j: int) -> Fraction | None:
    """Exact j-th root of a nonnegative rational, or None if irrational."""
    a = Fraction(a)
    if a < 0:
        raise ValueError("negative radicand")
    roots = []
    for part in (a.numerator, a.denominator):
        r = round(part ** (1.0 / j))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** j == part:
                roots.append(cand)
                break
        else:
            r = _int_root(part, j)
            if r is None:
                return None
            roots.append(r)
    return Fraction(roots[0], roots[1])


def _int_root(n: int, j: int) -> int | None:
    lo, hi = 0, 1
    while hi ** j < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** j < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** j == n else None


# --------------------------------------------------------------------------
# Layer norms
# --------------------------------------------------------------------------

class LayerNorm:
    """Interface shared by the three layer-norm variants."""

    dim: int
    polyhedral: bool = False

    def value(self, v: Sequence):
        raise NotImplementedError

    def batch(self, V: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def compare(self, v: Sequence, r) -> int:
        """Sign of ||v|| - r, exactly where the data allow it."""
        val = float(self.value(v))
        r = float(r)
        if abs(val - r) <= DEFAULT_TOL * max(1.0, abs(r)):
            return 0
        return 1 if val > r else -1

    def gradient(self, v: Sequence):
        raise NotImplementedError

    def scaled(self, c) -> "LayerNorm":
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


class PolyhedralNorm(LayerNorm):
    """Gauge of a symmetric polytope, stored by its facet covectors."""

    polyhedral = True

    def __init__(self, facets: Sequence[Sequence] | None = None, polytope: SymPolytope | None = None):
        if polytope is None:
            if facets is None:
                raise ValueError("need facets or a polytope")
            facets = [tuple(Fraction(c) for c in u) for u in facets]
            if len(facets[0]) == 1:
                polytope = _interval(facets)
            else:
                polytope = SymPolytope(facets=facets)
        self.polytope = polytope
        self.facets = polytope.facets
        self.dim = polytope.dim
        self._matrix = np.array([[float(c) for c in u] for u in self.facets])

    def __repr__(self) -> str:
        return f"PolyhedralNorm(dim={self.dim}, facets={len(self.facets)})"

    def value(self, v: Sequence):
        return max(dot(u, v) for u in self.facets)

    def batch(self, V: np.ndarray) -> np.ndarray:
        return (np.asarray(V, dtype=float) @ self._matrix.T).max(axis=1)

    def compare(self, v: Sequence, r) -> int:
        if _exact(v) and isinstance(r, (int, Fraction)):
            val = self.value(v)
            return (val > r) - (val < r)
        return super().compare(v, r)

    def active_facets(self, v: Sequence, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
        vals = [dot(u, v) for u in self.facets]
        top = max(vals)
        if _exact(v):
            return tuple(i for i, x in enumerate(vals) if x == top)
        return tuple(i for i, x in enumerate(vals) if float(top - x) <= tol)

    def gradient(self, v: Sequence):
        active = self.active_facets(v)
        if len(active) != 1:
            raise ValueError("gauge is not differentiable here (several active facets)")
        return self.facets[active[0]]

    def scaled(self, c) -> "PolyhedralNorm":
        c = Fraction(c)
        return PolyhedralNorm(facets=[tuple(c * a for a in u) for u in self.facets])

    def to_config(self) -> dict:
        return {"type": "polyhedral", "facets": [format_vector(u) for u in self.facets]}


class _Interval:
    """Stand-in polytope for a 1-dimensional layer: [-1/c, 1/c]."""

    def __init__(self, c: Fraction):
        self.dim = 1
        self.facets = ((c,), (-c,))
        self.vertices = ((1 / c,), (-1 / c,))

    def gauge(self, x):
        return max(dot(u, x) for u in self.facets)


def _interval(facets) -> _Interval:
    scales = {abs(u[0]) for u in facets}
    if len(scales) != 1 or 0 in scales or len(facets) != 2:
        raise ValueError("a 1-dimensional polyhedral norm needs facets [c] and [-c]")
    return _Interval(scales.pop())


class QuadraticNorm(LayerNorm):
    """sqrt(v^T A v) for a symmetric positive-definite rational A."""

    def __init__(self, matrix: Sequence[Sequence]):
        A = [[Fraction(c) for c in row] for row in matrix]
        k = len(A)
        if any(len(row) != k for row in A):
            raise ValueError("matrix must be square")
        if any(A[i][j] != A[j][i] for i in range(k) for j in range(k)):
            raise ValueError("matrix must be symmetric")
        self.matrix = tuple(tuple(r) for r in A)
        self.dim = k
        self._A = np.array([[float(c) for c in r] for r in A])
        if np.linalg.eigvalsh(self._A).min() <= 0:
            raise ValueError("matrix must be positive definite")

    def __repr__(self) -> str:
        return f"QuadraticNorm(dim={self.dim})"

    def squared(self, v: Sequence):
        return sum(v[i] * self.matrix[i][j] * v[j] for i in range(self.dim) for j in range(self.dim))

    def value(self, v: Sequence):
        if _exact(v):
            root = rational_root(self.squared(v), 2)
            if root is not None:
                return root
        return math.sqrt(float(self.squared([float(c) for c in v])))

    def batch(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V, dtype=float)
        return np.sqrt(np.einsum("mi,ij,mj->m", V, self._A, V))

    def compare(self, v: Sequence, r) -> int:
        if _exact(v) and isinstance(r, (int, Fraction)):
            lhs, rhs = self.squared(v), Fraction(r) ** 2
            return (lhs > rhs) - (lhs < rhs)
        return super().compare(v, r)

    def gradient(self, v: Sequence):
        """A v / ||v||; exact (rational) whenever ||v|| is rational."""
        Av = [sum(self.matrix[i][j] * v[j] for j in range(self.dim)) for i in range(self.dim)]
        norm = self.value(v)
        if norm == 0:
            raise ValueError("gradient undefined at the origin")
        return tuple(a / norm for a in Av)

    def dual_value(self, q: Sequence) -> float:
        """Dual norm sqrt(q^T A^{-1} q)."""
        q = np.asarray([float(c) for c in q])
        return float(math.sqrt(q @ np.linalg.solve(self._A, q)))

    def scaled(self, c) -> "QuadraticNorm":
        c = Fraction(c)
        return QuadraticNorm([[c * c * a for a in row] for row in self.matrix])

    def to_config(self) -> dict:
        return {"type": "quadratic", "matrix": [format_vector(r) for r in self.matrix]}


class PNorm(LayerNorm):
    """(sum_i w_i |v_i|^p)^(1/p), 1 < p < infinity."""

    def __init__(self, p: float, weights: Sequence | None = None, dim: int | None = None):
        p = float(p)
        if not 1 < p < math.inf:
            raise ValueError("p must lie in (1, inf)")
        if weights is None:
            if dim is None:
                raise ValueError("give weights or dim")
            weights = [1] * dim
        self.p = p
        self.weights = tuple(float(w) for w in weights)
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        self.dim = len(self.weights)
        self._w = np.array(self.weights)

    def __repr__(self) -> str:
        return f"PNorm(p={self.p}, dim={self.dim})"

    def value(self, v: Sequence) -> float:
        return float(sum(w * abs(float(c)) ** self.p for w, c in zip(self.weights, v)) ** (1 / self.p))

    def batch(self, V: np.ndarray) -> np.ndarray:
        V = np.abs(np.asarray(V, dtype=float))
        return ((V ** self.p) @ self._w) ** (1 / self.p)

    def gradient(self, v: Sequence) -> tuple[float, ...]:
        v = [float(c) for c in v]
        n = self.value(v)
        if n == 0:
            raise ValueError("gradient undefined at the origin")
        return tuple(w * math.copysign(abs(c) ** (self.p - 1), c) / n ** (self.p - 1)
                     for w, c in zip(self.weights, v))

    def scaled(self, c) -> "PNorm":
        c = float(c)
        return PNorm(self.p, [w * c ** self.p for w in self.weights])

    def to_config(self) -> dict:
        return {"type": "p", "p": self.p, "weights": list(self.weights)}


def euclidean(k: int, scale=1) -> QuadraticNorm:
    s = Fraction(scale) ** 2
    return QuadraticNorm([[s if i == j else 0 for j in range(k)] for i in range(k)])


def sup_layer(k: int) -> PolyhedralNorm:
    if k == 1:
        return PolyhedralNorm(facets=[(1,), (-1,)])
    return PolyhedralNorm(polytope=cube(k))


def layer_from_config(spec: Mapping[str, Any]) -> LayerNorm:
    kind = spec.get("type")
    if kind == "polyhedral":
        return PolyhedralNorm(facets=[parse_vector(u) for u in spec["facets"]])
    if kind == "quadratic":
        return QuadraticNorm([parse_vector(r) for r in spec["matrix"]])
    if kind == "p":
        weights = spec.get("weights")
        return PNorm(float(spec["p"]), weights=weights, dim=spec.get("dim"))
    if kind == "euclidean":
        return euclidean(int(spec["dim"]), parse_rational(spec.get("scale", 1)))
    if kind == "sup":
        return sup_layer(int(spec["dim"]))
    raise ValueError(f"unknown layer norm type {kind!r}")


# --------------------------------------------------------------------------
# Layered sup norm
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereFace:
    """Which layers attain the norm at a sphere point, and where inside each layer.

    ``faces[j]`` is the tuple of active facet indices for a polyhedral layer
    and the (rescaled) boundary point for a smooth one.
    """

    active_layers: tuple[int, ...]
    faces: Mapping[int, tuple]
    signs: Mapping[int, int]
    step: int

    @property
    def label(self) -> str:
        """ceiling / floor / wall / ceiling-seam / floor-seam vocabulary,
        falling back to the list of active layers for deeper groups."""
        s = self.step
        vertical = "ceiling" if self.signs.get(s, 1) > 0 else "floor"
        if self.active_layers == (1,):
            return "wall"
        if self.active_layers == (s,):
            return vertical
        if self.active_layers == (1, s):
            return vertical + "-seam"
        return "layers-" + "-".join(str(j) for j in self.active_layers)

    def as_dict(self) -> dict:
        return {"active_layers": list(self.active_layers), "label": self.label,
                "faces": {str(j): [format_rational(c) if not isinstance(c, int) else c for c in f]
                          for j, f in self.faces.items()}}


class LayeredSupNorm:
    """max_j (lambda_j ||pi_j x||_j)^(1/j) on a graded algebra.

    lambda_1 must be 1; the non-increasing condition on the lambdas is not
    enforced, so quasi-norms that fail the triangle inequality can be built
    and tested.
    """

    def __init__(self, algebra: GradedLieAlgebra, layers: Sequence[LayerNorm], lambdas: Sequence | None = None):
        weights = sorted(algebra.layers)
        if weights != list(range(1, len(weights) + 1)):
            raise ValueError("layer weights must be 1..s")
        if len(layers) != len(weights):
            raise ValueError(f"need {len(weights)} layer norms, got {len(layers)}")
        for j, norm in zip(weights, layers):
            if norm.dim != len(algebra.layers[j]):
                raise ValueError(f"layer {j} norm has dimension {norm.dim}, layer has {len(algebra.layers[j])}")
        if lambdas is None:
            lambdas = [1] * len(weights)
        lambdas = [l if isinstance(l, float) else Fraction(l) for l in lambdas]
        if len(lambdas) != len(weights):
            raise ValueError("one lambda per layer")
        if lambdas[0] != 1:
            raise ValueError("lambda_1 must be 1")
        if any(l <= 0 for l in lambdas):
            raise ValueError("lambdas must be positive")
        self.algebra = algebra
        self.layers = tuple(layers)
        self.lambdas = tuple(lambdas)
        self.step = len(weights)
        self._index = tuple(np.array(algebra.layers[j]) for j in weights)

    def __repr__(self) -> str:
        return f"LayeredSupNorm({self.algebra!r}, layers={self.layers}, lambdas={self.lambdas})"

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.lambdas, self.lambdas[1:]))

    def project(self, x: Sequence, j: int) -> tuple:
        return tuple(x[i] for i in self.algebra.layers[j])

    def layer_value(self, x: Sequence, j: int):
        """r_j = lambda_j ||pi_j x||_j (exact when the layer allows it)."""
        return self.lambdas[j - 1] * self.layers[j - 1].value(self.project(x, j))

    def evaluate(self, x: Sequence) -> float:
        self.algebra._check(x)
        return max(float(self.layer_value(x, j)) ** (1.0 / j) for j in range(1, self.step + 1))

    __call__ = evaluate

    def evaluate_exact(self, x: Sequence) -> Fraction | None:
        """The norm as a Fraction when all layer values are rational and the
        maximal one has a rational root; None otherwise."""
        vals = [self.layer_value(x, j) for j in range(1, self.step + 1)]
        if not _exact(vals):
            return None
        best = 1
        for j in range(2, self.step + 1):
            if compare_layers(vals[j - 1], j, vals[best - 1], best) > 0:
                best = j
        return rational_root(vals[best - 1], best)

    def batch(self, X: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation over the rows of X."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for j in range(1, self.step + 1):
            r = float(self.lambdas[j - 1]) * self.layers[j - 1].batch(X[:, self._index[j - 1]])
            out = np.maximum(out, r ** (1.0 / j))
        return out

    def layer_comparisons(self, x: Sequence, r=1) -> list[int]:
        """Sign of r_j - r^j per layer (exact when possible)."""
        out = []
        for j in range(1, self.step + 1):
            lam = self.lambdas[j - 1]
            target = Fraction(r) ** j / lam if not isinstance(lam, float) else float(r) ** j / lam
            out.append(self.layers[j - 1].compare(self.project(x, j), target))
        return out

    def sphere_sign(self, x: Sequence) -> int:
        """Sign of |x| - 1."""
        return max(self.layer_comparisons(x))

    def on_sphere(self, x: Sequence) -> bool:
        return self.sphere_sign(x) == 0

    def classify(self, p: Sequence, tol: float = DEFAULT_TOL) -> SphereFace:
        comps = self.layer_comparisons(p)
        if max(comps) != 0:
            raise ValueError("point is not on the unit sphere")
        active = tuple(j for j, c in enumerate(comps, start=1) if c == 0)
        faces: dict[int, tuple] = {}
        signs: dict[int, int] = {}
        for j in active:
            v = self.project(p, j)
            layer = self.layers[j - 1]
            lam = self.lambdas[j - 1]
            if layer.polyhedral:
                faces[j] = layer.active_facets(v, tol)
            else:
                faces[j] = tuple(lam * c for c in v)
            if len(v) == 1:
                signs[j] = 1 if v[0] > 0 else -1
        return SphereFace(active, faces, signs, self.step)

    def with_lambdas(self, lambdas: Sequence) -> "LayeredSupNorm":
        return LayeredSupNorm(self.algebra, self.layers, lambdas)

    def sample_sphere(self, rng, m: int) -> np.ndarray:
        """m float points on the unit sphere, by dilating Gaussian samples."""
        X = rng.standard_normal((m, self.algebra.dim))
        r = self.batch(X)
        return dilate_rows(self.algebra, 1.0 / r, X)

    def to_config(self) -> dict:
        return {"group": self.algebra.to_config(),
                "layers": [layer.to_config() for layer in self.layers],
                "lambdas": [format_rational(l) for l in self.lambdas]}


def dilate_rows(algebra: GradedLieAlgebra, t: np.ndarray, X: np.ndarray) -> np.ndarray:
    w = np.array(algebra.weights, dtype=float)
    return X * np.power(np.asarray(t, dtype=float)[:, None], w[None, :])


def multiply_rows(algebra: GradedLieAlgebra, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise float group product, vectorised over the sample axis."""
    prod = algebra.multiply(tuple(X.T), tuple(Y.T))
    return np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), (X.shape[0],)) for c in prod])


def homogeneous_sup_norm(algebra: GradedLieAlgebra, first_layer: LayerNorm | None = None,
                         lambdas: Sequence | None = None) -> LayeredSupNorm:
    """Sup norm on every layer (optionally a custom first-layer norm)."""
    layers = [sup_layer(len(algebra.layers[j])) for j in sorted(algebra.layers)]
    if first_layer is not None:
        layers[0] = first_layer
    return LayeredSupNorm(algebra, layers, lambdas)


def heisenberg_norm(algebra: GradedLieAlgebra, first_layer: LayerNorm, lam=1) -> LayeredSupNorm:
    """max(||(x, y)||, lam * sqrt|z|): the vertical layer scalar is lam**2."""
    lam2 = lam * lam if isinstance(lam, float) else Fraction(lam) ** 2
    return LayeredSupNorm(algebra, [first_layer, sup_layer(1)], [1, lam2])


def norm_from_config(spec: Mapping[str, Any], algebra: GradedLieAlgebra | None = None) -> LayeredSupNorm:
    if algebra is None:
        if "group" not in spec:
            raise ValueError("norm spec needs a 'group' entry or an explicit algebra")
        algebra = algebra_from_config(spec["group"])
    layers = spec.get("layers")
    if layers is None:
        layers = [{"type": "sup", "dim": len(algebra.layers[j])} for j in sorted(algebra.layers)]
    layer_norms = [layer_from_config(entry) for entry in layers]
    lambdas = spec.get("lambdas")
    if lambdas is not None:
        lambdas = [parse_rational(l) for l in lambdas]
    if "heisenberg_lambda" in spec:
        lam = parse_rational(spec["heisenberg_lambda"])
        lambdas = [Fraction(1)] + [lam ** 2] * (len(layer_norms) - 1)
    return LayeredSupNorm(algebra, layer_norms, lambdas)


# --------------------------------------------------------------------------
# Triangle inequality and rescaling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TriangleViolation:
    p: tuple
    q: tuple
    lhs: float
    rhs: float

    def as_dict(self) -> dict:
        return {"p": list(self.p), "q": list(self.q), "norm_pq": self.lhs, "norm_p_plus_norm_q": self.rhs}


def _structured_pairs(norm: LayeredSupNorm) -> tuple[np.ndarray, np.ndarray]:
    """Pairs of first-layer sphere points along coordinate axes and diagonals."""
    alg = norm.algebra
    first = alg.first_layer
    pts = []
    for i in first:
        for s in (1.0, -1.0):
            e = np.zeros(alg.dim)
            e[i] = s
            pts.append(e)
    for i in first:
        for k in first:
            if i < k:
                for s in (1.0, -1.0):
                    e = np.zeros(alg.dim)
                    e[i], e[k] = 1.0, s
                    pts.append(e)
    P = np.array(pts)
    P = dilate_rows(alg, 1.0 / norm.batch(P), P)
    m = len(P)
    idx_p, idx_q = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return P[idx_p.ravel()], P[idx_q.ravel()]


def check_triangle(norm: LayeredSupNorm, budget: int = 10_000, seed: int = 0, tol: float = 1e-9,
                   max_report: int = 20, chunk: int = 20_000) -> list[TriangleViolation]:
    """Sampled search for pairs with |pq| > |p| + |q| + tol.

    Samples lie on and near the unit sphere (radial factor in [1/2, 2]).  An
    empty result means no violation was found, not that none exists.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    alg = norm.algebra
    out: list[TriangleViolation] = []
    Ps, Qs = _structured_pairs(norm)
    batches = [(Ps, Qs)]
    remaining = budget
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        P = norm.sample_sphere(rng, m)
        Q = norm.sample_sphere(rng, m)
        P = dilate_rows(alg, rng.uniform(0.5, 2.0, m), P)
        Q = dilate_rows(alg, rng.uniform(0.5, 2.0, m), Q)
        batches.append((P, Q))
    for P, Q in batches:
        lhs = norm.batch(multiply_rows(alg, P, Q))
        rhs = norm.batch(P) + norm.batch(Q)
        bad = np.nonzero(lhs > rhs + tol)[0]
        order = bad[np.argsort(-(lhs[bad] - rhs[bad]))]
        for k in order[: max_report - len(out)]:
            out.append(TriangleViolation(tuple(P[k]), tuple(Q[k]), float(lhs[k]), float(rhs[k])))
        if len(out) >= max_report:
            break
    return out


@dataclass(frozen=True)
class RescaleResult:
    lambdas: tuple[Fraction, ...]
    passing: tuple[Fraction, ...]
    verified: bool
    iterations: int

    def as_dict(self) -> dict:
        return {"lambdas": [format_rational(l) for l in self.lambdas],
                "last_passing": [format_rational(l) for l in self.passing],
                "verified": self.verified, "iterations": self.iterations}


def guivarch_rescale(algebra: GradedLieAlgebra, layers: Sequence[LayerNorm], budget: int = 20_000,
                     seed: int = 0, bisection_steps: int = 12, max_halvings: int = 40) -> RescaleResult:
    """Find lambdas making the layered sup quasi-norm satisfy the sampled triangle inequality.

    Layers are fixed one at a time.  For layer j the higher layers are
    switched off (lambda = 0 would be the quotient norm; a vanishing
    1e-30 stands in for it), lambda_j is bisected between a passing and a
    failing dyadic value below lambda_{j-1}, and the returned value is half
    the last passing one.  The final vector is re-checked as a whole.
    """
    s = len(layers)
    lambdas = [Fraction(1)] + [Fraction(0)] * (s - 1)
    passing = [Fraction(1)] + [Fraction(0)] * (s - 1)
    tiny = 1e-30
    iterations = 0

    def passes(lams) -> bool:
        nonlocal iterations
        iterations += 1
        trial = [l if l > 0 else tiny for l in lams]
        norm = LayeredSupNorm(algebra, layers, [Fraction(1)] + [float(l) for l in trial[1:]])
        return not check_triangle(norm, budget=budget, seed=seed + iterations, max_report=1)

    for j in range(1, s):
        hi = lambdas[j - 1]
        trial = list(lambdas)
        trial[j] = hi
        if passes(trial):
            lo = hi
        else:
            lo = hi / 2
            for _ in range(max_halvings):
                trial[j] = lo
                if passes(trial):
                    break
                hi, lo = lo, lo / 2
            else:
                raise RuntimeError(f"no passing lambda found for layer {j + 1}")
            for _ in range(bisection_steps):
                mid = (lo + hi) / 2
                trial[j] = mid
                if passes(trial):
                    lo = mid
                else:
                    hi = mid
        passing[j] = lo
        lambdas[j] = lo / 2
    final = LayeredSupNorm(algebra, layers, lambdas)
    verified = not check_triangle(final, budget=budget, seed=seed + 10_000, max_report=1)
    return RescaleResult(tuple(lambdas), tuple(passing), verified, iterations)
