import itertools
from fractions import Fraction as F

import numpy as np
import pytest

from horocarnot.algebra import heisenberg
from horocarnot.blowup import assemble_principal, pl_equal
from horocarnot.heisenberg import (boundary_report, ceiling_floor, contact, critical_lambda, rotate, seam_family,
                                   separation_check, smooth_wall, unrotate, vertical_constraint_pd, wall_catalog)
from horocarnot.norms import PNorm, euclidean, heisenberg_norm, sup_layer
from horocarnot.oracle import check_blowup

grid = [F(k, 4) for k in range(-2, 3)]


def test_rotation_round_trip():
    v = (F(1), F(2), F(3), F(4))
    assert rotate(v) == (-3, -4, 1, 2)
    assert unrotate(rotate(v)) == v


def test_ceiling_floor_values():
    zero = ceiling_floor((0,), (0,), 1, 1)
    assert zero((F(3), F(-2))) == 0
    f = ceiling_floor((F(1, 2),), (0,), 1, 1)
    assert f.pieces[0].coeffs == (0, F(1, 8))
    with pytest.raises(ValueError):
        ceiling_floor((1,), (1,), 0, 1)


@pytest.mark.parametrize("lam", [F(1), F(1, 2), F(3, 2)])
def test_ceiling_matches_principal(lam):
    norm = heisenberg_norm(heisenberg(1), euclidean(2), lam)
    for a, b in [(F(1, 3), F(-1, 4)), (F(-1, 2), F(1, 5))]:
        for sign in (1, -1):
            p = (a, b, sign / lam ** 2)
            f = assemble_principal(norm, p).principal
            assert pl_equal(f, ceiling_floor((a,), (b,), sign, lam))


def test_ceiling_oracle_first_order():
    norm = heisenberg_norm(heisenberg(2), euclidean(4), 1)
    p = (F(1, 3), 0, F(-1, 4), F(1, 5), F(1))
    f = ceiling_floor(p[:2], p[2:4], 1, 1)
    rep = check_blowup(norm, p, f)
    assert rep.passed and 0.9 < rep.order < 1.1


def test_ceiling_set_equals_floor_set():
    lam = F(1, 2)
    up = [ceiling_floor((a,), (b,), 1, lam) for a, b in itertools.product(grid, grid)]
    down = [ceiling_floor((a,), (b,), -1, lam) for a, b in itertools.product(grid, grid)]
    for f in down:
        assert any(pl_equal(f, g, cross_check=False) for g in up)


def test_square_wall_catalog():
    fams = wall_catalog(sup_layer(2))
    assert len(fams) == 4
    assert all(fam.parameter_dim == 1 and len(fam.exposed.vertices) == 2 for fam in fams)
    for fam in fams:
        for s in grid:
            h = fam.member([s])
            assert h((0, 0)) == 0
            f = h.function()
            assert f((0, 0)) == 0
            for y in [(F(1), F(2)), (F(-1, 3), F(1, 2))]:
                assert f(y) == h(y)


def test_square_wall_is_vertex_blowup():
    norm = heisenberg_norm(heisenberg(1), sup_layer(2), 1)
    fam = next(w for w in wall_catalog(sup_layer(2)) if w.face.vertices == [(1, 1)])
    principal = assemble_principal(norm, (1, 1, F(1, 3))).principal
    assert pl_equal(fam.member([0]).function(), principal)


@pytest.mark.parametrize("r", [F(1), F(2), F(1, 2)])
def test_smooth_wall_disk(r):
    layer = euclidean(2, 1 / r)
    a, b = F(3, 5) * r, F(4, 5) * r
    h = smooth_wall(layer, (a, b))
    assert h.pieces[0].coeffs == (a / r ** 2, b / r ** 2)
    assert h((a, b)) == 1
    norm = heisenberg_norm(heisenberg(1), layer, 1)
    rep = check_blowup(norm, (a, b, F(1, 7)), h)
    assert rep.passed


def test_wall_ignores_vertical():
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    f = assemble_principal(norm, (F(3, 5), F(4, 5), F(1, 4))).principal
    assert f.higher_layer_invariant(norm.algebra, np.random.default_rng(0))


def test_smooth_seam():
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    p = (F(3, 5), F(4, 5), F(1))
    seam = seam_family(norm, p)
    fam = seam.family
    assert len(fam.principal.pieces) == 2
    phi = ceiling_floor((p[0],), (p[1],), 1, 1)
    wall = smooth_wall(euclidean(2), p[:2])
    assert pl_equal(fam.translate([float("inf"), 0]), phi)
    assert pl_equal(fam.translate([0, float("inf")]), wall)
    minus = (-p[0], -p[1])
    assert phi(minus) > wall(minus)
    assert seam.vertical_pds == (vertical_constraint_pd(p[:2], p[:2], 1, 1),)
    assert not pl_equal(fam.principal, seam_family(norm, (-p[0], -p[1], F(1))).principal)


def test_seams_on_a_facet_are_distinct():
    norm = heisenberg_norm(heisenberg(1), sup_layer(2), 1)
    fs = [seam_family(norm, (F(1), b, F(1))).principal for b in (F(-1, 2), F(0), F(1, 3), F(3, 4))]
    for f, g in itertools.combinations(fs, 2):
        assert not pl_equal(f, g)


def test_seam_rejects_non_seam():
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    with pytest.raises(ValueError):
        seam_family(norm, (0, 0, 1))


def test_separation_small_lambda():
    for layer in (euclidean(2), sup_layer(2), euclidean(2, 2)):
        assert separation_check(layer, F(1, 100)).separated


def test_two_euclidean_contact():
    layer = euclidean(2, 2)
    c = contact(layer)
    assert c.exact and c.s_star == 4
    crit = critical_lambda(layer)
    assert crit.value == 4
    assert crit.monotone
    assert crit.bracket[1] - crit.bracket[0] < 1e-10
    assert separation_check(layer, F(399, 100)).separated
    assert not separation_check(layer, F(4)).separated


def test_square_contact_exact():
    c = contact(sup_layer(2))
    assert c.exact and c.s_star == 1 and c.critical_lambda == 2
    sep = separation_check(sup_layer(2), 2)
    assert not sep.separated
    assert sep.witness["functional"] in (["1", "0"], ["0", "1"], ["-1", "0"], ["0", "-1"])


def test_p_norm_contact_matches_quadratic():
    # p = 2 through the generic minimiser equals the closed form
    assert contact(PNorm(2, dim=2)).critical_lambda == pytest.approx(2, abs=1e-6)


def test_enlarging_ball_never_raises_threshold():
    values = [critical_lambda(euclidean(2, s)).value for s in (F(1, 2), F(1), F(2), F(3))]
    assert values == sorted(values)
    assert critical_lambda(sup_layer(2)).value >= critical_lambda(euclidean(2)).value


@pytest.mark.parametrize("n,layer", [(1, euclidean(2)), (1, sup_layer(2)), (2, euclidean(4))])
def test_boundary_report_dimension(n, layer):
    rep = boundary_report(n, layer, F(1, 2))
    assert rep.dimension == 2 * n
    assert rep.separated and rep.topology_label == "button-pillow"
    dims = {f.name: f.dim for f in rep.families}
    assert dims["wall sphere"] == 2 * n - 1
    assert dims["ceiling/floor ball"] == 2 * n


def test_boundary_report_non_separated():
    rep = boundary_report(1, euclidean(2, 2), 4)
    assert not rep.separated
    assert rep.topology_label.startswith("non-separated")
    assert rep.dimension == 2
