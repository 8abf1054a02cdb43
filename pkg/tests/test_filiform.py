from fractions import Fraction as F

import numpy as np
import pytest

from horocarnot.algebra import filiform, heisenberg, random_rational_point
from horocarnot.blowup import pl_equal
from horocarnot.filiform import (bernoulli, beta, boundary_dimension, cross_validate, expected_dimension,
                                 table1_row, table2_pansu, x2_coefficients_depend_on_a1_only)
from horocarnot.heisenberg import ceiling_floor


@pytest.mark.parametrize("m,value", [(0, 1), (1, F(-1, 2)), (2, F(1, 6)), (3, 0), (4, F(-1, 30)),
                                     (6, F(1, 42)), (8, F(-1, 30)), (10, F(5, 66))])
def test_bernoulli(m, value):
    assert bernoulli(m) == value


def test_bch_one_y_series_coefficients():
    # x/(1 - e^-x) = sum beta_m x^m
    x = 0.3
    series = sum(float(beta(m)) * x ** m for m in range(14))
    assert series == pytest.approx(x / (1 - np.exp(-x)), rel=1e-12)


def test_linear_row_examples():
    p = (F(2, 3), F(-1, 5), F(1, 2), F(3), F(-4, 7), F(1, 9))
    assert table1_row(6, 1, p) == (1, 0)
    assert table1_row(6, 2, p) == (0, 1)
    assert table1_row(6, 3, p) == (-p[1] / 2, p[0] / 2)
    assert table1_row(6, 4, p)[1] == p[0] ** 2 / 12
    assert table1_row(6, 5, p)[1] == 0


def test_linear_rows_match_l4_display():
    # coordinate 4 of the explicit product: w + w' + (xz' - zx')/2 + (x - x')(xy' - yx')/12
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = random_rational_point(rng, 4)
        c1 = -a[2] / 2 - a[0] * a[1] / 12
        c2 = a[0] ** 2 / 12
        assert table1_row(4, 4, a) == (c1, c2)


def test_odd_rows_have_no_x2_term():
    rng = np.random.default_rng(1)
    for n in range(5, 13):
        p = random_rational_point(rng, n)
        for i in range(5, n + 1, 2):
            assert table1_row(n, i, p)[1] == 0


def test_face_functional_examples():
    p = (F(1, 3), F(-1, 2), F(1))
    f = table2_pansu(3, 3, p)
    assert f.pieces[0].coeffs == (F(1, 8), F(1, 12))
    assert pl_equal(f, ceiling_floor((p[0],), (p[1],), 1, 1))
    q = (0, F(1, 5), F(2, 7), F(1))
    assert table2_pansu(4, 4, q).pieces[0].coeffs == (-q[2] / 6, 0)
    with pytest.raises(ValueError):
        table2_pansu(3, 3, (F(1, 3), F(1, 2), F(1, 2)))


@pytest.mark.parametrize("n", [3, 4, 7, 10])
def test_cross_validate(n):
    assert cross_validate(n, points=5, seed=n).ok


def test_l3_is_heisenberg_rows():
    p = (F(1, 3), F(2, 5), F(-1, 7))
    assert filiform(3).linear_coefficients(p) == heisenberg(1).linear_coefficients(p)


@pytest.mark.parametrize("n", [6, 9])
def test_x2_depends_on_a1_only(n):
    assert x2_coefficients_depend_on_a1_only(n)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_small_n_dimensions(n):
    res = boundary_dimension(n)
    assert res.dimension == n - 1
    assert res.full_dimensional


def test_witness_n5():
    res = boundary_dimension(5)
    assert res.witness.fixed == (3, 5)
    assert res.witness.free == (1, 2, 4)
    assert not res.witness.uses_first_layer


@pytest.mark.parametrize("n,value", [(3, 2), (7, 6), (8, 6), (10, 7), (12, 8)])
def test_expected_dimension(n, value):
    assert expected_dimension(n) == value


def test_dimension_8():
    res = boundary_dimension(8)
    assert res.dimension == 6 and not res.full_dimensional


def test_rejects_out_of_range():
    with pytest.raises(ValueError):
        boundary_dimension(2)
    with pytest.raises(ValueError):
        cross_validate(13)
