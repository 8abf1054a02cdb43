"""Horofunction catalog of H_{2n+1} with a layered sup norm max(||(x,y)||, lam sqrt|z|).

Families of blow-ups, by sphere region:

* ceiling / floor (||(a,b)|| < 1, z = +-1/lam^2):  phi^+-_(a,b) = +-(lam^2/4)(-b.x + a.y)
* wall (||(a,b)|| = 1, lam^2 |z| < 1): Busemann-type functions of the first-layer norm
* ceiling / floor seams (both layers active): max of the two kinds above and its translates.

Here ``lam`` is the Heisenberg scalar; the layered norm uses lambda_2 = lam^2.
Covectors on the first layer are written in the coordinates (x_1..x_n, y_1..y_n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .algebra import heisenberg
from .blowup import (BlowupFamily, PiecewiseLinearFn, assemble_principal, family_dimension)
from .convexity import FaceDescriptor, dot
from .norms import (LayerNorm, LayeredSupNorm, QuadraticNorm, SphereFace,
                    heisenberg_norm, rational_root)


def _half(v: Sequence) -> int:
    if len(v) % 2:
        raise ValueError("first-layer vectors of H_{2n+1} have even length")
    return len(v) // 2


def rotate(v: Sequence) -> tuple:
    """J(a, b) = (-b, a): the covector (lam^2/4)^{-1} phi^+_(a,b)."""
    n = _half(v)
    a, b = v[:n], v[n:]
    return tuple(-c for c in b) + tuple(a)


def unrotate(q: Sequence) -> tuple:
    """J^{-1}: the (a, b) with J(a, b) = q."""
    n = _half(q)
    qx, qy = q[:n], q[n:]
    return tuple(qy) + tuple(-c for c in qx)


def _lam2(lam):
    return lam * lam if isinstance(lam, float) else Fraction(lam) ** 2


# --------------------------------------------------------------------------
# Ceiling / floor
# --------------------------------------------------------------------------

def ceiling_floor(a: Sequence, b: Sequence, sign: int, lam) -> PiecewiseLinearFn:
    """+-(lam^2/4)(-b.x + a.y) as a one-piece function of the first layer."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if len(a) != len(b):
        raise ValueError("a and b must have the same length")
    n = len(a)
    scale = sign * _lam2(lam) / 4
    coeffs = tuple(scale * c for c in rotate(tuple(a) + tuple(b)))
    return PiecewiseLinearFn.linear(coeffs, tuple(range(2 * n)), label="ceiling" if sign > 0 else "floor")


# --------------------------------------------------------------------------
# Walls
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WallFn:
    """h_{E,u}(y) = |u - y|_E - |u|_E with |x|_E = -min_{q in E} <q, x>.

    E is given by its vertices (points of the dual ball).  For smooth first
    layers E is the single gradient covector at a boundary point and h is
    linear.
    """

    dual_vertices: tuple[tuple, ...]
    u: tuple

    def function(self) -> PiecewiseLinearFn:
        # |u - y|_E = max_q <q, y - u>, so h is a max of affine functions
        k = len(self.u)
        shift = max(-dot(q, self.u) for q in self.dual_vertices)
        affines = [(q, -dot(q, self.u) - shift) for q in self.dual_vertices]
        return PiecewiseLinearFn.from_max(affines, tuple(range(k)))

    def __call__(self, y: Sequence):
        return max(dot(q, [a - b for a, b in zip(y, self.u)]) for q in self.dual_vertices) - \
            max(-dot(q, self.u) for q in self.dual_vertices)


@dataclass(frozen=True)
class WallFamily:
    """Generators h_{E,u} for one face F of Q_1: E = F° and u ranges over T(E)."""

    face: FaceDescriptor
    exposed: FaceDescriptor

    @property
    def parameter_dim(self) -> int:
        return self.exposed.dim

    def member(self, s: Sequence) -> WallFn:
        dirs = self.exposed.directions
        if len(s) != len(dirs):
            raise ValueError(f"expected {len(dirs)} parameters")
        k = self.face.polytope.dim
        u = tuple(sum(si * d[c] for si, d in zip(s, dirs)) for c in range(k))
        return WallFn(tuple(self.exposed.vertices), u)


def wall_catalog(first_layer: LayerNorm) -> list[WallFamily]:
    """One family per vertex of a polyhedral Q_1 (its exposed dual is a facet of Q_1°)."""
    if not first_layer.polyhedral:
        raise ValueError("smooth first layers have the gradient map instead; use smooth_wall")
    Q = first_layer.polytope
    return [WallFamily(F, Q.exposed_dual(F)) for F in Q.faces if F.dim == 0]


def smooth_wall(first_layer: LayerNorm, point: Sequence) -> PiecewiseLinearFn:
    """Wall function at a boundary point of a smooth ball: the gradient covector
    of the norm there, normalised so that it takes the value 1 at the point."""
    g = first_layer.gradient(point)
    val = sum(a * b for a, b in zip(g, point))
    coeffs = tuple(c / val for c in g)
    return PiecewiseLinearFn.linear(coeffs, tuple(range(len(point))), label="wall")


# --------------------------------------------------------------------------
# Seams
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeamFamily:
    family: BlowupFamily
    vertical_pds: tuple[tuple, ...]
    sign: int

    @property
    def principal(self) -> PiecewiseLinearFn:
        return self.family.principal


def vertical_constraint_pd(covector: Sequence, ab: Sequence, lam, sign: int) -> tuple:
    """Pansu derivative at p = (a, b, sign/lam^2) of G(x,y,z) = <u,(x,y)>^2 - sign lam^2 z.

    For the ceiling this is (2 alpha + lam^2/2 b).x + (2 beta - lam^2/2 a).y.
    """
    n = _half(ab)
    lam2 = _lam2(lam)
    a, b = ab[:n], ab[n:]
    alpha, beta = covector[:n], covector[n:]
    half = lam2 / 2
    return tuple(2 * al + sign * half * bi for al, bi in zip(alpha, b)) + \
        tuple(2 * be - sign * half * ai for be, ai in zip(beta, a))


def seam_family(norm: LayeredSupNorm, p: Sequence) -> SeamFamily:
    face = norm.classify(p)
    if face.label not in ("ceiling-seam", "floor-seam"):
        raise ValueError(f"not a seam point ({face.label})")
    sign = 1 if face.label == "ceiling-seam" else -1
    fam = assemble_principal(norm, p)
    lam = _heisenberg_lambda(norm)
    ab = norm.project(p, 1)
    pds = tuple(vertical_constraint_pd(pt.covector, ab, lam, sign) for pt in fam.partials if pt.layer == 1)
    return SeamFamily(fam, pds, sign)


def _heisenberg_lambda(norm: LayeredSupNorm):
    lam2 = norm.lambdas[1]
    if isinstance(lam2, float):
        return math.sqrt(lam2)
    root = rational_root(lam2, 2)
    return root if root is not None else math.sqrt(lam2)


# --------------------------------------------------------------------------
# Separation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Contact:
    """s* = min over linear wall functionals q of ||J^{-1} q||_{V1}.

    Phi(lam) = (lam^2/4) J(Q_1) meets the linear part of Delta exactly when
    lam^2/4 >= s*, so the critical scalar is lam* = 2 sqrt(s*).
    """

    s_star: Any
    witness_q: tuple
    exact: bool

    @property
    def lambda_squared(self):
        return 4 * self.s_star

    @property
    def critical_lambda(self) -> float:
        return 2 * math.sqrt(float(self.s_star))


def contact(first_layer: LayerNorm, samples: int = 4096) -> Contact:
    if first_layer.polyhedral:
        best = None
        for u in first_layer.facets:
            s = first_layer.value(unrotate(u))
            if best is None or s < best[0]:
                best = (s, tuple(u))
        return Contact(best[0], best[1], True)
    if isinstance(first_layer, QuadraticNorm):
        A = first_layer.matrix
        k = first_layer.dim
        scalar = A[0][0]
        if all(A[i][j] == (scalar if i == j else 0) for i in range(k) for j in range(k)):
            # A = c^2 I: the dual unit sphere is |q| = c and ||J^{-1} q|| = c |q| = c^2
            root = rational_root(scalar, 2)
            q = tuple(Fraction(1) * (root if root is not None else 1) if i == 0 else Fraction(0) for i in range(k))
            return Contact(scalar, q, root is not None)
        from scipy.linalg import eigh

        Af = first_layer._A
        Jinv = np.array([[float(c) for c in unrotate(e)] for e in np.eye(k)]).T
        M = Jinv.T @ Af @ Jinv
        vals, vecs = eigh(M, np.linalg.inv(Af))
        q = vecs[:, 0] / math.sqrt(vecs[:, 0] @ np.linalg.solve(Af, vecs[:, 0]))
        return Contact(math.sqrt(vals[0]), tuple(q), False)
    return _contact_sampled(first_layer, samples)


def _contact_sampled(first_layer: LayerNorm, samples: int) -> Contact:
    """Minimise ||J^{-1} grad(v)|| over the unit sphere of a smooth norm."""
    from scipy.optimize import minimize

    k = first_layer.dim
    rng = np.random.default_rng(0)

    def objective(w):
        w = np.asarray(w, dtype=float)
        if not w.any():
            return math.inf
        v = w / first_layer.value(w)
        g = np.array(first_layer.gradient(v), dtype=float)
        return first_layer.value(unrotate(g))

    W = rng.standard_normal((samples, k))
    vals = [objective(w) for w in W]
    start = W[int(np.argmin(vals))]
    res = minimize(objective, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
    v = res.x / first_layer.value(res.x)
    g = tuple(float(c) for c in first_layer.gradient(v))
    return Contact(float(res.fun), g, False)


@dataclass(frozen=True)
class Separation:
    separated: bool
    lam: Any
    s_star: Any
    witness: dict | None

    def as_dict(self) -> dict:
        return {"separated": self.separated, "lambda": str(self.lam), "contact_scale": str(self.s_star),
                "witness": self.witness}


def separation_check(first_layer: LayerNorm, lam, cached: Contact | None = None) -> Separation:
    """Whether Phi(lam) avoids the linear wall functionals."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    c = cached or contact(first_layer)
    reach = _lam2(lam) / 4
    if c.exact and not isinstance(reach, float):
        touching = reach >= c.s_star
    else:
        touching = float(reach) >= float(c.s_star) * (1 - 1e-12)
    witness = None
    if touching:
        ab = tuple(Fraction(1) / reach * x if not isinstance(reach, float) and c.exact else float(x) / float(reach)
                   for x in unrotate(c.witness_q))
        witness = {"functional": [str(x) for x in c.witness_q], "ceiling_point": [str(x) for x in ab]}
    return Separation(not touching, lam, c.s_star, witness)


@dataclass(frozen=True)
class CriticalLambda:
    value: float
    lambda_squared: Any
    exact: bool
    bracket: tuple[float, float]
    monotone: bool

    def as_dict(self) -> dict:
        return {"critical_lambda": self.value, "critical_lambda_squared": str(self.lambda_squared),
                "exact": self.exact, "bracket": list(self.bracket), "bracket_width": self.bracket[1] - self.bracket[0],
                "monotone": self.monotone}


def critical_lambda(first_layer: LayerNorm, tol: float = 1e-12, grid: int = 50) -> CriticalLambda:
    """The scalar at which Phi(lam) first touches the linear walls.

    Computed in closed form from the contact scale and independently
    bracketed by bisection on :func:`separation_check`; ``monotone`` records
    that the predicate flips exactly once on a grid of [lam*/10, 2 lam*].
    """
    c = contact(first_layer)
    lo, hi = 0.0, 1.0
    while not separation_check(first_layer, hi, c).separated is False:
        hi *= 2
        if hi > 1e12:
            raise RuntimeError("always separated")
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if separation_check(first_layer, mid, c).separated:
            lo = mid
        else:
            hi = mid
    star = c.critical_lambda
    lams = np.linspace(star / 10, 2 * star, grid)
    flags = [separation_check(first_layer, float(x), c).separated for x in lams]
    flips = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    monotone = flips == 1 and flags[0] and not flags[-1]
    return CriticalLambda(star, c.lambda_squared, c.exact, (lo, hi), monotone)


# --------------------------------------------------------------------------
# Boundary report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyReport:
    name: str
    dim: int
    generator_count: int

    def as_dict(self) -> dict:
        return {"name": self.name, "dim": self.dim, "generator_count": self.generator_count}


@dataclass(frozen=True)
class BoundaryReport:
    n: int
    lam: Any
    separated: bool
    critical: float
    families: tuple[FamilyReport, ...]
    topology_label: str
    gluing: str = ""

    @property
    def dimension(self) -> int:
        return max(f.dim for f in self.families)

    def as_dict(self) -> dict:
        out = {"n": self.n, "lambda": str(self.lam), "separated": self.separated,
               "critical_lambda": self.critical, "dimension": self.dimension,
               "families": [f.as_dict() for f in self.families], "topology_label": self.topology_label}
        if self.gluing:
            out["gluing"] = self.gluing
        return out


def _first_layer_faces(first_layer: LayerNorm) -> list[tuple[int, ...] | None]:
    """Facet-id sets of every face of a polyhedral Q_1, or [None] for a smooth one."""
    if not first_layer.polyhedral:
        return [None]
    return [tuple(sorted(F.facet_ids)) for F in first_layer.polytope.faces]


def _face(active: tuple[int, ...], first_facets, top_facet: int, sign: int) -> SphereFace:
    faces: dict[int, tuple] = {}
    if 1 in active:
        faces[1] = first_facets if first_facets is not None else ()
    if 2 in active:
        faces[2] = (top_facet,)
    return SphereFace(active, faces, {2: sign}, 2)


def boundary_report(n: int, first_layer: LayerNorm, lam, seed: int = 0) -> BoundaryReport:
    """Family dimensions of the four boundary pieces and a topology label."""
    alg = heisenberg(n)
    norm = heisenberg_norm(alg, first_layer, lam)
    up = next(f for f, u in enumerate(norm.layers[1].facets) if u[0] > 0)
    down = 1 - up
    faces = _first_layer_faces(first_layer)

    ceiling = family_dimension(norm, _face((2,), None, up, 1), seed=seed).dimension
    floor = family_dimension(norm, _face((2,), None, down, -1), seed=seed).dimension
    wall = max(family_dimension(norm, _face((1,), f, up, 1), seed=seed).dimension for f in faces)
    seam_up = max(family_dimension(norm, _face((1, 2), f, up, 1), seed=seed).dimension for f in faces)
    seam_down = max(family_dimension(norm, _face((1, 2), f, down, -1), seed=seed).dimension for f in faces)
    walls = len(wall_catalog(first_layer)) if first_layer.polyhedral else 1
    families = (
        FamilyReport("ceiling/floor ball", max(ceiling, floor), 2),
        FamilyReport("wall sphere", wall, walls),
        FamilyReport("ceiling seam shell", seam_up, len(faces)),
        FamilyReport("floor seam shell", seam_down, len(faces)),
    )
    sep = separation_check(first_layer, lam)
    crit = critical_lambda(first_layer)
    if sep.separated:
        label, gluing = "button-pillow", ""
    else:
        label = "non-separated: identified shells"
        gluing = ("the boundary sphere of the ceiling/floor ball meets the wall sphere; "
                  "the two seam shells are glued along their common boundary spheres")
    return BoundaryReport(n, lam, sep.separated, crit.value, families, label, gluing)
