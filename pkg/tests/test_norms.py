import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horocarnot.algebra import abelian, filiform, heisenberg
from horocarnot.convexity import random_symmetric_polytope
from horocarnot.norms import (LayeredSupNorm, PNorm, PolyhedralNorm, QuadraticNorm, check_triangle,
                              compare_layers, euclidean, guivarch_rescale, heisenberg_norm,
                              homogeneous_sup_norm, norm_from_config, rational_root, sup_layer)


@pytest.mark.parametrize("alg,x,expected", [
    (heisenberg(1), (1, 0, 0), 1),
    (heisenberg(1), (0, 0, 4), 2),
    (filiform(4), (0, 0, 0, 8), 2),
])
def test_norm_examples(alg, x, expected):
    norm = homogeneous_sup_norm(alg)
    assert norm.evaluate_exact(x) == expected
    assert norm(x) == pytest.approx(expected)


@pytest.mark.parametrize("a,j,b,jp,expected", [
    (4, 2, 8, 3, 0),
    (1, 1, 1, 5, 0),
    (9, 2, 26, 3, 1),
    (26, 3, 9, 2, -1),
])
def test_compare_layers(a, j, b, jp, expected):
    assert compare_layers(F(a), j, F(b), jp) == expected


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=0, max_value=50, max_denominator=20), st.integers(1, 5),
       st.fractions(min_value=0, max_value=50, max_denominator=20), st.integers(1, 5))
def test_compare_layers_matches_float(a, j, b, jp):
    gap = float(a) ** (1 / j) - float(b) ** (1 / jp)
    if abs(gap) > 1e-6:
        assert compare_layers(a, j, b, jp) == (1 if gap > 0 else -1)


def test_rational_root():
    assert rational_root(F(27, 8), 3) == F(3, 2)
    assert rational_root(F(2), 2) is None


def test_triangle_violation_reported():
    norm = LayeredSupNorm(heisenberg(1), [sup_layer(2), sup_layer(1)], [1, 100])
    x = heisenberg(1).multiply((1, 0, 0), (0, 1, 0))
    assert norm(x) == pytest.approx(10 * math.sqrt(0.5))
    bad = check_triangle(norm, budget=1000)
    assert bad
    assert any(v.p[:2] == (1.0, 0.0) and v.q[:2] == (0.0, 1.0) for v in bad)


def test_euclidean_plane_has_no_violations():
    norm = LayeredSupNorm(abelian(2), [euclidean(2)])
    assert check_triangle(norm, budget=5000) == []


def test_guivarch_abelian():
    res = guivarch_rescale(abelian(2), [euclidean(2)], budget=1000)
    assert res.lambdas == (1,)


@pytest.mark.parametrize("first", [euclidean(2), sup_layer(2)])
def test_guivarch_heisenberg(first):
    res = guivarch_rescale(heisenberg(1), [first, sup_layer(1)], budget=4000)
    assert res.verified
    assert list(res.lambdas) == sorted(res.lambdas, reverse=True)
    norm = LayeredSupNorm(heisenberg(1), [first, sup_layer(1)], res.lambdas)
    assert check_triangle(norm, budget=20_000, seed=99) == []


def test_guivarch_l4_non_increasing():
    alg = filiform(4)
    res = guivarch_rescale(alg, homogeneous_sup_norm(alg).layers, budget=2000)
    assert res.verified
    assert all(a >= b for a, b in zip(res.lambdas, res.lambdas[1:]))


@pytest.mark.parametrize("p,active,label", [
    ((0, 0, 1), (2,), "ceiling"),
    ((0, 0, -1), (2,), "floor"),
    ((1, 0, 0), (1,), "wall"),
    ((1, 0, 1), (1, 2), "ceiling-seam"),
    ((F(3, 5), F(-4, 5), -1), (1, 2), "floor-seam"),
])
def test_classify(p, active, label):
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    face = norm.classify(p)
    assert face.active_layers == active
    assert face.label == label


def test_classify_off_sphere():
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    with pytest.raises(ValueError):
        norm.classify((F(1, 2), 0, 0))


norms_under_test = [
    homogeneous_sup_norm(heisenberg(1)),
    heisenberg_norm(heisenberg(2), euclidean(4), F(1, 2)),
    homogeneous_sup_norm(filiform(5)),
    LayeredSupNorm(heisenberg(1), [PNorm(3, dim=2), sup_layer(1)], [1, F(1, 4)]),
]


@pytest.mark.parametrize("norm", norms_under_test)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.floats(1 / 8, 8))
def test_homogeneity(norm, seed, t):
    x = np.random.default_rng(seed).uniform(-2, 2, norm.algebra.dim)
    scaled = norm.algebra.dilate(t, tuple(x))
    assert norm(scaled) == pytest.approx(t * norm(tuple(x)), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("norm", norms_under_test)
def test_symmetry(norm):
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = tuple(rng.uniform(-2, 2, norm.algebra.dim))
        assert norm(tuple(-c for c in x)) == pytest.approx(norm(x), abs=1e-12)


def test_symmetry_exact():
    norm = homogeneous_sup_norm(filiform(4))
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = tuple(F(int(c), 7) for c in rng.integers(-30, 31, 4))
        assert [norm.layer_value(x, j) for j in (1, 2, 3)] == \
            [norm.layer_value(tuple(-c for c in x), j) for j in (1, 2, 3)]


def test_gauge_matches_scaling_search():
    rng = np.random.default_rng(4)
    layer = PolyhedralNorm(polytope=random_symmetric_polytope(rng, 3))
    for _ in range(100):
        v = rng.uniform(-3, 3, 3)
        lo, hi = 0.0, 100.0
        for _ in range(80):
            mid = (lo + hi) / 2
            inside = all(np.dot([float(c) for c in u], v / mid) <= 1 for u in layer.facets)
            lo, hi = (lo, mid) if inside else (mid, hi)
        assert float(layer.value(v)) == pytest.approx(hi, abs=1e-9)


def test_quadratic_gradient_exact():
    q = euclidean(2, 2)
    assert q.value((F(3, 10), F(2, 5))) == 1
    assert q.gradient((F(3, 10), F(2, 5))) == (F(6, 5), F(8, 5))
    with pytest.raises(ValueError):
        QuadraticNorm([[1, 2], [2, 1]])


def test_norm_config_round_trip():
    spec = {"group": "H3", "layers": [{"type": "euclidean", "dim": 2, "scale": "2"}, {"type": "sup", "dim": 1}],
            "heisenberg_lambda": "1/2"}
    norm = norm_from_config(spec)
    assert norm.lambdas == (1, F(1, 4))
    again = norm_from_config(norm.to_config())
    x = (F(1, 3), F(-1, 2), F(1, 5))
    assert again.layer_value(x, 1) == norm.layer_value(x, 1)
    assert again.lambdas == norm.lambdas


def test_sample_sphere_on_sphere():
    norm = homogeneous_sup_norm(filiform(5))
    X = norm.sample_sphere(np.random.default_rng(0), 200)
    assert np.allclose(norm.batch(X), 1)
