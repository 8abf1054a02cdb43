"""Centrally symmetric rational polytopes: V/H conversion, faces, polar and exposed duals.

Facets are stored as covectors u with the facet hyperplane {x : <u, x> = 1},
so the body is {x : <u, x> <= 1 for all u} and the facet list of Q is the
vertex list of the polar dual Q°.  Everything is exact over Fractions and
works by brute force, which is fine for the small ambient dimensions used
here (first layers of dimension <= 4).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

from . import linalg
from .rational import format_vector, parse_vector

Vector = tuple[Fraction, ...]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _solve_square(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vector | None:
    """Unique solution of a square system by Gaussian elimination, None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[r][n] / m[r][r] for r in range(n))


def _hull_facets(points: Sequence[Vector], k: int) -> list[Vector]:
    """Facet covectors of conv(points), assuming the origin is interior."""
    found: dict[Vector, None] = {}
    for subset in itertools.combinations(range(len(points)), k):
        u = _solve_square([points[i] for i in subset], [Fraction(1)] * k)
        if u is None or u in found:
            continue
        if all(dot(u, v) <= 1 for v in points):
            found[u] = None
    return list(found)


def _extreme(points: Sequence[Vector], facets: Sequence[Vector], k: int) -> list[Vector]:
    """Points of the list that are vertices: the facets through them span R^k."""
    out = []
    seen = set()
    for v in points:
        if v in seen:
            continue
        tight = [u for u in facets if dot(u, v) == 1]
        if tight and linalg.rank(tight) == k:
            out.append(v)
            seen.add(v)
    return out


@dataclass(frozen=True)
class FaceDescriptor:
    """A face of a polytope, by the indices of its vertices.

    ``facets`` lists the indices of facets containing the face; the affine
    hull is ``point + span(directions)`` and ``directions`` is a basis of the
    translation space T(F).
    """

    polytope: "SymPolytope"
    vertex_ids: frozenset[int]
    facet_ids: frozenset[int]

    @property
    def vertices(self) -> list[Vector]:
        return [self.polytope.vertices[i] for i in sorted(self.vertex_ids)]

    @cached_property
    def directions(self) -> list[Vector]:
        verts = self.vertices
        base = verts[0]
        diffs = [tuple(a - b for a, b in zip(v, base)) for v in verts[1:]]
        return linalg.row_space(diffs, self.polytope.dim) if diffs else []

    @property
    def point(self) -> Vector:
        return self.vertices[0]

    @property
    def dim(self) -> int:
        return len(self.directions)

    def contains(self, x: Sequence) -> bool:
        return self.polytope.contains(x) and all(dot(self.polytope.facets[f], x) == 1 for f in self.facet_ids)

    def __repr__(self) -> str:
        return f"FaceDescriptor(dim={self.dim}, vertices={[format_vector(v) for v in self.vertices]})"


class SymPolytope:
    """A full-dimensional, centrally symmetric polytope with the origin inside."""

    def __init__(self, vertices: Iterable[Sequence] | None = None, facets: Iterable[Sequence] | None = None):
        if (vertices is None) == (facets is None):
            raise ValueError("give exactly one of vertices or facets")
        if vertices is not None:
            pts = [tuple(Fraction(c) for c in v) for v in vertices]
        else:
            pts = [tuple(Fraction(c) for c in u) for u in facets]
        if not pts:
            raise ValueError("empty point list")
        k = len(pts[0])
        if any(len(v) != k for v in pts):
            raise ValueError("inconsistent dimensions")
        point_set = set(pts)
        if any(tuple(-c for c in v) not in point_set for v in pts):
            raise ValueError("point list is not centrally symmetric")
        if linalg.rank(pts) < k:
            raise ValueError("polytope is not full-dimensional")
        if any(not any(v) for v in pts):
            raise ValueError("the origin must be interior, not a vertex or facet")
        hull = _hull_facets(pts, k)
        extreme = _extreme(pts, hull, k)
        if vertices is not None:
            self.vertices, self.facets = tuple(_sorted(extreme)), tuple(_sorted(hull))
        else:
            self.vertices, self.facets = tuple(_sorted(hull)), tuple(_sorted(extreme))
        self.dim = k

    # -- basic ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, SymPolytope) and set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash(frozenset(self.vertices))

    def __repr__(self) -> str:
        return f"SymPolytope(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    def gauge(self, x: Sequence):
        """Minkowski functional: max_u <u, x>."""
        return max(dot(u, x) for u in self.facets)

    def contains(self, x: Sequence) -> bool:
        return self.gauge(x) <= 1

    def scaled(self, c) -> "SymPolytope":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scale must be positive")
        return SymPolytope(vertices=[tuple(c * a for a in v) for v in self.vertices])

    def polar_dual(self) -> "SymPolytope":
        return self._polar

    @cached_property
    def _polar(self) -> "SymPolytope":
        out = object.__new__(SymPolytope)
        out.vertices, out.facets, out.dim = self.facets, self.vertices, self.dim
        out.__dict__["_polar"] = self
        return out

    # -- faces ------------------------------------------------------------

    @cached_property
    def facet_vertex_sets(self) -> tuple[frozenset[int], ...]:
        if "_polar" in self.__dict__ and "facet_vertex_sets" in self._polar.__dict__:
            # incidences are symmetric under polarity: transpose the dual's table
            dual_sets = self._polar.facet_vertex_sets
            return tuple(frozenset(i for i, s in enumerate(dual_sets) if f in s) for f in range(len(self.facets)))
        return tuple(frozenset(i for i, v in enumerate(self.vertices) if dot(u, v) == 1) for u in self.facets)

    def _descriptor(self, vertex_ids: frozenset[int]) -> FaceDescriptor:
        facet_ids = frozenset(f for f, s in enumerate(self.facet_vertex_sets) if vertex_ids <= s)
        return FaceDescriptor(self, vertex_ids, facet_ids)

    @cached_property
    def faces(self) -> tuple[FaceDescriptor, ...]:
        """All nonempty proper faces, as intersections of facet vertex sets."""
        found: set[frozenset[int]] = set(self.facet_vertex_sets)
        frontier = list(found)
        while frontier:
            nxt = []
            for a in frontier:
                for b in self.facet_vertex_sets:
                    c = a & b
                    if c and c not in found:
                        found.add(c)
                        nxt.append(c)
            frontier = nxt
        ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
        return tuple(self._descriptor(s) for s in ordered)

    def face(self, vertices: Iterable[Sequence]) -> FaceDescriptor:
        """The face with exactly these vertices; raises if they do not form a face."""
        wanted = {tuple(Fraction(c) for c in v) for v in vertices}
        index = {v: i for i, v in enumerate(self.vertices)}
        if not wanted or any(v not in index for v in wanted):
            raise ValueError("not a set of vertices of the polytope")
        ids = frozenset(index[v] for v in wanted)
        for f in self.faces:
            if f.vertex_ids == ids:
                return f
        raise ValueError("vertex set is not a face")

    def is_face(self, vertex_ids: Iterable[int]) -> bool:
        """Face test on vertex-pair intervals: whenever the midpoint of two
        vertices lies in conv(subset), both vertices must be in the subset.
        (Only used as an independent check of :attr:`faces`.)"""
        ids = frozenset(vertex_ids)
        face = next((f for f in self.faces if f.vertex_ids == ids), None)
        if face is None:
            return False
        for i, j in itertools.combinations(range(len(self.vertices)), 2):
            mid = tuple((a + b) / 2 for a, b in zip(self.vertices[i], self.vertices[j]))
            if face.contains(mid) and not {i, j} <= ids:
                return False
        return True

    def exposed_dual(self, face: FaceDescriptor) -> FaceDescriptor:
        """F° = {y in Q° : <y, f> = 1 for all f in F}, as a face of Q°."""
        if face.polytope != self or face not in self.faces:
            raise ValueError("argument is not a face of this polytope")
        dual = self.polar_dual()
        return dual._descriptor(frozenset(face.facet_ids))

    def active_facets(self, x: Sequence) -> frozenset[int]:
        return frozenset(f for f, u in enumerate(self.facets) if dot(u, x) == 1)

    def faces_containing(self, x: Sequence) -> list[FaceDescriptor]:
        x = tuple(Fraction(c) for c in x)
        if self.gauge(x) != 1:
            raise ValueError("point is not on the boundary of the polytope")
        active = self.active_facets(x)
        return [f for f in self.faces if f.facet_ids <= active]

    def minimal_face(self, x: Sequence) -> FaceDescriptor:
        faces = self.faces_containing(x)
        return min(faces, key=lambda f: len(f.vertex_ids))

    # -- config -----------------------------------------------------------

    def to_config(self) -> dict:
        return {"vertices": [format_vector(v) for v in self.vertices],
                "facets": [format_vector(u) for u in self.facets]}

    @classmethod
    def from_config(cls, spec: Mapping[str, Any]) -> "SymPolytope":
        if "vertices" in spec:
            return cls(vertices=[parse_vector(v) for v in spec["vertices"]])
        if "facets" in spec:
            return cls(facets=[parse_vector(u) for u in spec["facets"]])
        raise ValueError("polytope spec needs 'vertices' or 'facets'")


def _sorted(points: Iterable[Vector]) -> list[Vector]:
    return sorted(points, reverse=True)


def support_value(vertices: Iterable[Sequence], x: Sequence):
    """|x|_C = -min_{q in C} <q, x> for C = conv(vertices)."""
    return -min(dot(q, x) for q in vertices)


def cross_polytope(k: int) -> SymPolytope:
    verts = []
    for i in range(k):
        for s in (1, -1):
            verts.append(tuple(Fraction(s if j == i else 0) for j in range(k)))
    return SymPolytope(vertices=verts)


def cube(k: int) -> SymPolytope:
    return SymPolytope(vertices=list(itertools.product((Fraction(1), Fraction(-1)), repeat=k)))


def diamond() -> SymPolytope:
    return cross_polytope(2)


def square() -> SymPolytope:
    return cube(2)


def random_symmetric_polytope(rng, k: int, n_points: int = 4, spread: int = 4) -> SymPolytope:
    """conv(±v) for random small-integer v, resampled until full-dimensional."""
    while True:
        pts = []
        for _ in range(n_points):
            v = tuple(Fraction(int(c)) for c in rng.integers(-spread, spread + 1, size=k))
            if any(v):
                pts.append(v)
                pts.append(tuple(-c for c in v))
        if pts and linalg.rank(pts) == k:
            return SymPolytope(vertices=list(dict.fromkeys(pts)))
