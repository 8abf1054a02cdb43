"""Independent numerical oracles for blow-ups and horofunction limits.

* :func:`fd_blowup` / :func:`check_blowup`: the difference quotient
  (||p . dilate(t, q)|| - 1) / t on a grid of q, over t = 2^-k.
* :func:`check_horofunction_embedding`: d(q_n, x) - d(q_n, e) with
  q_n = dilate(1/eps, p^-1) and d(a, b) = ||a^-1 b||, computed in unscaled
  coordinates.
* :func:`sampled_kuratowski`: rescaled sets p_n^-1 Omega sampled on a window
  grid and compared to a limit set by two-sided distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .algebra import GradedLieAlgebra
from .blowup import PiecewiseLinearFn
from .norms import LayeredSupNorm, dilate_rows, multiply_rows

STEPS = tuple(range(4, 17))
TAIL = 6
# rounding error of a difference quotient is about ROUNDING / t
ROUNDING = 1e-13


def _as_rows(x) -> np.ndarray:
    X = np.asarray(x, dtype=float)
    return X[None, :] if X.ndim == 1 else X


def _check_sphere(norm: LayeredSupNorm, p: Sequence) -> None:
    r = norm.evaluate_exact(p) if all(isinstance(c, (int, Fraction)) for c in p) else None
    if r is None:
        r = norm.evaluate(p)
    if abs(float(r) - 1) > 1e-9:
        raise ValueError(f"base point has norm {float(r)}, expected 1")


def fd_blowup(norm: LayeredSupNorm, p: Sequence, q, t: float) -> np.ndarray | float:
    """(||p . dilate(t, q)|| - 1) / t in floating point; q may be a row array."""
    if t <= 0:
        raise ValueError("t must be positive")
    alg = norm.algebra
    Q = _as_rows(q)
    P = np.broadcast_to(np.asarray([float(c) for c in p]), Q.shape)
    moved = multiply_rows(alg, P, dilate_rows(alg, np.full(Q.shape[0], t), Q))
    vals = (norm.batch(moved) - 1.0) / t
    return vals if np.ndim(q) == 2 else float(vals[0])


def distance(norm: LayeredSupNorm, a, b) -> np.ndarray:
    """d(a, b) = ||a^-1 b|| row-wise in floating point."""
    A, B = _as_rows(a), _as_rows(b)
    A = np.broadcast_to(A, B.shape) if A.shape[0] == 1 else A
    B = np.broadcast_to(B, A.shape) if B.shape[0] == 1 else B
    return norm.batch(multiply_rows(norm.algebra, -A, B))


def embedding_quotient(norm: LayeredSupNorm, p: Sequence, x, eps: float) -> np.ndarray:
    """d(q, x) - d(q, e) with q = dilate(1/eps, p^-1), evaluated without rescaling."""
    alg = norm.algebra
    X = _as_rows(x)
    qn = dilate_rows(alg, np.array([1.0 / eps]), -np.asarray([[float(c) for c in p]]))
    Qn = np.broadcast_to(qn, X.shape)
    return distance(norm, Qn, X) - distance(norm, Qn, np.zeros_like(X))


def homogeneous_grid(norm: LayeredSupNorm, m: int = 64, seed: int = 0) -> np.ndarray:
    """m points of the homogeneous ball ||q|| <= 1 (random directions, radii spread over (0, 1])."""
    rng = np.random.default_rng(seed)
    alg = norm.algebra
    G = rng.standard_normal((m, alg.dim))
    r = norm.batch(G)
    radii = (np.arange(1, m + 1) / m)[rng.permutation(m)]
    return dilate_rows(alg, radii / r, G)


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors |quotient(t_k) - f(q)| over a grid, with a fitted order on the tail.

    Steps whose error is within the rounding floor ROUNDING / t are left out
    of the fit; if no tail step rises above the floor the quotient is exact
    up to rounding (``exact``) and the order is reported as nan.
    """

    steps: tuple[float, ...]
    grid: np.ndarray
    errors: np.ndarray = field(repr=False)
    order: float
    residual: float
    worst_point: tuple
    final_error: float
    exact: bool = False
    order_range: tuple[float, float] = (0.75, 1.25)
    final_tol: float = 1e-3

    @property
    def max_errors(self) -> np.ndarray:
        return self.errors.max(axis=1)

    @property
    def passed(self) -> bool:
        lo, hi = self.order_range
        order_ok = self.exact or lo <= self.order <= hi
        return bool(np.isfinite(self.errors).all() and order_ok and self.final_error < self.final_tol)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "exact": self.exact, "order": None if self.exact else self.order, "residual": self.residual,
                "final_error": self.final_error, "worst_point": list(self.worst_point),
                "steps": list(self.steps), "max_errors": self.max_errors.tolist(), "grid_size": len(self.grid)}


def _fit(steps: Sequence[float], errs: np.ndarray) -> tuple[float, float, bool]:
    """Least-squares slope of log(max error) against log(t) over the last TAIL
    steps that are above the rounding floor."""
    t, e = np.asarray(steps[-TAIL:]), np.asarray(errs[-TAIL:])
    keep = e > 4 * ROUNDING / t
    if keep.sum() < 3:
        return math.nan, 0.0, bool(e.max() <= 4 * ROUNDING / t.min())
    t, e = np.log(t[keep]), np.log(e[keep])
    A = np.column_stack([t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(A, e, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - e) ** 2)))
    return float(coef[0]), resid, False


def _report(quotient: Callable[[float], np.ndarray], f: PiecewiseLinearFn, norm: LayeredSupNorm,
            grid: np.ndarray, ks: Sequence[int]) -> ConvergenceReport:
    target = f.batch(grid[:, list(norm.algebra.first_layer)])
    steps = tuple(2.0 ** -k for k in ks)
    errors = np.array([np.abs(quotient(t) - target) for t in steps])
    maxes = errors.max(axis=1)
    order, resid, exact = _fit(steps, maxes)
    worst = tuple(float(c) for c in grid[int(np.argmax(errors[-1]))])
    return ConvergenceReport(steps, grid, errors, order, resid, worst, float(maxes[-1]), exact)


def check_blowup(norm: LayeredSupNorm, p: Sequence, f: PiecewiseLinearFn, grid: np.ndarray | None = None,
                 ks: Sequence[int] = STEPS, seed: int = 0) -> ConvergenceReport:
    """Finite-difference convergence of the blow-up quotient at p to f."""
    _check_sphere(norm, p)
    grid = homogeneous_grid(norm, seed=seed) if grid is None else np.asarray(grid, dtype=float)
    return _report(lambda t: fd_blowup(norm, p, grid, t), f, norm, grid, ks)


def check_horofunction_embedding(norm: LayeredSupNorm, p: Sequence, f: PiecewiseLinearFn,
                                 grid: np.ndarray | None = None, ks: Sequence[int] = STEPS,
                                 seed: int = 0) -> ConvergenceReport:
    """Convergence of d(q_n, x) - d(q_n, e) to f for q_n = dilate(1/eps_n, p^-1)."""
    _check_sphere(norm, p)
    grid = homogeneous_grid(norm, seed=seed) if grid is None else np.asarray(grid, dtype=float)
    return _report(lambda t: embedding_quotient(norm, p, grid, t), f, norm, grid, ks)


def cross_oracle(norm: LayeredSupNorm, p: Sequence, grid: np.ndarray | None = None,
                 ks: Sequence[int] = STEPS, seed: int = 0) -> float:
    """Largest gap between the two oracles at matched t over the grid."""
    grid = homogeneous_grid(norm, seed=seed) if grid is None else np.asarray(grid, dtype=float)
    return max(float(np.max(np.abs(fd_blowup(norm, p, grid, 2.0 ** -k) - embedding_quotient(norm, p, grid, 2.0 ** -k))))
               for k in ks)


def left_invariance_defect(norm: LayeredSupNorm, samples: int = 200, seed: int = 0) -> float:
    """max |d(ga, gb) - d(a, b)| over random float triples."""
    rng = np.random.default_rng(seed)
    alg = norm.algebra
    G, A, B = (rng.uniform(-2, 2, (samples, alg.dim)) for _ in range(3))
    lhs = distance(norm, multiply_rows(alg, G, A), multiply_rows(alg, G, B))
    return float(np.max(np.abs(lhs - distance(norm, A, B))))


def exact_distance(norm: LayeredSupNorm, a: Sequence, b: Sequence):
    """d(a, b) exactly (a Fraction) or None when the norm value is irrational."""
    alg = norm.algebra
    return norm.evaluate_exact(alg.multiply(alg.inverse(a), b))


# --------------------------------------------------------------------------
# Kuratowski limits
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """{x : <normal, x> <= rhs for each inequality}; ``empty`` overrides."""

    inequalities: tuple[tuple[tuple[float, ...], float], ...] = ()
    empty: bool = False

    def mask(self, X: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        if self.empty:
            return np.zeros(X.shape[0], dtype=bool)
        out = np.ones(X.shape[0], dtype=bool)
        for normal, rhs in self.inequalities:
            out &= X @ np.asarray(normal, dtype=float) <= rhs + tol
        return out


def unit_square() -> Region:
    return Region((((1.0, 0.0), 1.0), ((-1.0, 0.0), 1.0), ((0.0, 1.0), 1.0), ((0.0, -1.0), 1.0)))


def half_plane(c: float = 0.0) -> Region:
    """{x_1 <= -c}."""
    return Region((((1.0, 0.0), -c),))


@dataclass(frozen=True)
class KuratowskiReport:
    ns: tuple[int, ...]
    distances: tuple[float, ...]
    resolution: float
    passed: bool

    def as_dict(self) -> dict:
        return {"passed": self.passed, "resolution": self.resolution, "ns": list(self.ns),
                "distances": [d if math.isfinite(d) else "inf" for d in self.distances]}


def _hausdorff(A: np.ndarray, B: np.ndarray, h: float) -> float:
    """Two-sided distance between grid masks; only the symmetric difference needs a transform."""
    if not A.any() and not B.any():
        return 0.0
    if not A.any() or not B.any():
        return math.inf
    worst = 0.0
    for X, Y in ((A, B), (B, A)):
        stray = X & ~Y
        if stray.any():
            d = ndimage.distance_transform_edt(~Y) * h
            worst = max(worst, float(d[stray].max()))
    return worst


def sampled_kuratowski(algebra: GradedLieAlgebra, region: Region, p_rule: Callable[[int], Sequence],
                       eps_rule: Callable[[int], float], expected: Region, window: float = 10.0,
                       resolution: float = 1 / 64, ns: Sequence[int] = tuple(2 ** k for k in range(4, 13))
                       ) -> KuratowskiReport:
    """Sample S_n = {y : p_n . dilate(eps_n, y) in Omega} on a planar window grid.

    Passes when the two-sided grid distance to the expected set is within one
    grid cell for every n in the second half of the sequence.
    """
    if algebra.dim != 2:
        raise ValueError("windowed sampling is implemented for planar groups")
    axis = np.arange(-window, window + resolution / 2, resolution)
    Y = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    target = expected.mask(Y).reshape(len(axis), len(axis))
    dists = []
    for n in ns:
        P = np.broadcast_to(np.asarray(p_rule(n), dtype=float), Y.shape)
        X = multiply_rows(algebra, P, dilate_rows(algebra, np.full(len(Y), eps_rule(n)), Y))
        S = region.mask(X).reshape(target.shape)
        dists.append(_hausdorff(S, target, resolution))
    tail = dists[len(dists) // 2:]
    ok = all(d <= resolution * (1 + 1e-9) for d in tail)
    return KuratowskiReport(tuple(ns), tuple(dists), resolution, ok)


def square_examples() -> dict[str, tuple]:
    """The unit-square fixtures: (p_n rule, eps_n rule, expected limit)."""
    out = {"fixed-base": (lambda n: (1.0, 0.0), lambda n: 1.0 / n, half_plane(0.0)),
           "fast-scale": (lambda n: (1.0 + 1.0 / n, 0.0), lambda n: 1.0 / n ** 2, Region(empty=True))}
    for c in (-1, 1, 5):
        out[f"shifted-base-{c}"] = (lambda n, c=c: (1.0 + c / n, 0.0), lambda n: 1.0 / n, half_plane(float(c)))
    return out
