from math import sin

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expshock.errors import DomainError, StencilError
from expshock.grids import (ComovingGrid, NullGrid, QuadrantGrid, ScalarField,
                            finite_difference, interpolate_field)


def fill_null(grid, f):
    vals = grid.new_values()
    for i in range(grid.n_rows):
        for j in range(i + 1):
            vals[grid.node_index(i, j)] = f(grid.u(i), grid.v(j))
    return ScalarField(grid, vals)


def fill_quadrant(grid, f):
    vals = grid.new_values()
    for i in range(grid.n_u):
        for j in range(grid.n_v):
            vals[i, j] = f(grid.u(i), grid.v(j))
    return ScalarField(grid, vals)


def fill_comoving(grid, f):
    vals = grid.new_values()
    for c in range(grid.n_chi):
        for k in range(grid.col_start[c], grid.n_tau):
            vals[c, k] = f(grid.tau(k), grid.chi(c))
    return ScalarField(grid, vals)


def test_null_grid_layout():
    grid = NullGrid(0.25, 1.0)
    assert grid.n_rows == 5
    assert grid.n_nodes == 15
    assert grid.node_index(0, 0) == 0
    assert grid.node_index(4, 4) == 14
    assert grid.contains((0.6, 0.3))
    assert not grid.contains((0.3, 0.6))
    with pytest.raises(DomainError):
        grid.node_index(2, 3)


def test_scalar_field_rejects_bad_shape_and_nan():
    grid = NullGrid(0.25, 1.0)
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros(7))
    bad = np.zeros(grid.n_nodes)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        ScalarField(grid, bad)


def test_interpolation_exact_on_cubic_null_grid():
    grid = NullGrid(0.125, 1.0)
    f = lambda u, v: 1.0 + u - 2 * v + 0.5 * u * v + u ** 3 - v ** 3 + u ** 2 * v
    field = fill_null(grid, f)
    for (u, v) in [(0.9, 0.1), (0.5, 0.49), (0.77, 0.31), (1.0, 0.0)]:
        assert abs(interpolate_field(field, (u, v)) - f(u, v)) < 1e-12


def test_interpolation_domain_error_reports_bounds():
    grid = NullGrid(0.125, 1.0)
    field = fill_null(grid, lambda u, v: u + v)
    with pytest.raises(DomainError) as err:
        interpolate_field(field, (0.25, 0.5))
    assert "0.25" in str(err.value) and "<=" in str(err.value)


def test_cubic_interpolation_error_shrinks_by_eight():
    # Smooth non-polynomial field: halving the spacing must shrink the
    # interpolation error by at least 2^3 with the cubic stencil.
    f = lambda u, v: sin(u + 2 * v)
    probes = [(0.21, 0.13), (0.55, 0.37), (0.83, 0.61), (0.47, 0.71)]
    errs = []
    for spacing in (1.0 / 16, 1.0 / 32):
        grid = QuadrantGrid(spacing, 0.0, 1.0, 0.0, 1.0)
        field = fill_quadrant(grid, f)
        errs.append(max(abs(interpolate_field(field, p) - f(*p)) for p in probes))
    assert errs[0] / errs[1] >= 8.0


def test_finite_difference_exact_on_polynomials():
    grid = QuadrantGrid(0.125, -1.0, 0.0, 0.0, 1.0)
    f = lambda u, v: 2.0 + 3 * u - v + u * v + 0.5 * u ** 2 - v ** 2
    field = fill_quadrant(grid, f)
    assert abs(finite_difference(field, (-0.5, 0.5), (1, 0)) - (3 + 0.5 + (-0.5))) < 1e-11
    assert abs(finite_difference(field, (-0.5, 0.5), (0, 1)) - (-1 + (-0.5) - 2 * 0.5)) < 1e-11
    assert abs(finite_difference(field, (-0.5, 0.5), (1, 1)) - 1.0) < 1e-10
    assert abs(finite_difference(field, (-0.5, 0.5), (2, 0)) - 1.0) < 1e-9
    assert abs(finite_difference(field, (-0.5, 0.5), (0, 2)) + 2.0) < 1e-9


def test_finite_difference_second_order():
    f = lambda u, v: sin(u + 2 * v)
    errs = []
    for spacing in (1.0 / 32, 1.0 / 64):
        grid = QuadrantGrid(spacing, 0.0, 1.0, 0.0, 1.0)
        field = fill_quadrant(grid, f)
        got = finite_difference(field, (0.5, 0.25), (2, 0))
        errs.append(abs(got + sin(1.0)))
    assert errs[0] / errs[1] > 3.4


def test_finite_difference_total_degree_capped():
    grid = QuadrantGrid(0.25, 0.0, 1.0, 0.0, 1.0)
    field = fill_quadrant(grid, lambda u, v: u * v)
    with pytest.raises(ValueError):
        finite_difference(field, (0.5, 0.5), (2, 2))


def test_stencil_error_on_tiny_grid():
    grid = QuadrantGrid(0.5, 0.0, 1.0, 0.0, 1.0)
    field = fill_quadrant(grid, lambda u, v: u + v)
    with pytest.raises(StencilError):
        finite_difference(field, (0.5, 0.5), (3, 0))


def test_comoving_grid_past_boundary():
    past = lambda chi: -0.5 * chi
    grid = ComovingGrid(0.125, 0.125, -0.5, 0.5, 0.0, 1.0, past=past)
    assert grid.col_start[0] == 4
    assert grid.col_start[-1] == 0
    assert grid.contains((-0.4, 0.9))
    assert not grid.contains((-0.4, 0.1))
    f = lambda tau, chi: tau ** 2 + chi * tau - chi
    field = fill_comoving(grid, f)
    for p in [(0.3, 0.5), (-0.2, 0.7), (0.0, 0.0)]:
        assert abs(interpolate_field(field, p) - f(*p)) < 1e-12
    # Interpolating just above the past boundary only uses valid nodes.
    p = (-0.35, 0.8)
    assert abs(interpolate_field(field, p) - f(*p)) < 1e-12


def test_comoving_finite_difference_orders_follow_point_ordering():
    grid = ComovingGrid(0.1, 0.1, 0.0, 1.0, 0.0, 1.0)
    f = lambda tau, chi: tau ** 2 - 3 * chi ** 2 + tau * chi
    field = fill_comoving(grid, f)
    assert abs(finite_difference(field, (0.5, 0.5), (2, 0)) - 2.0) < 1e-9
    assert abs(finite_difference(field, (0.5, 0.5), (0, 2)) + 6.0) < 1e-9
    assert abs(finite_difference(field, (0.5, 0.5), (1, 1)) - 1.0) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0.02, 0.98), st.floats(0.02, 0.98),
       st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_interpolation_exact_on_random_quadratics(u, v, coeffs):
    a, b, c, d = coeffs
    grid = QuadrantGrid(0.125, 0.0, 1.0, 0.0, 1.0)
    f = lambda x, y: a + b * x + c * y + d * x * y
    field = fill_quadrant(grid, f)
    assert abs(interpolate_field(field, (u, v)) - f(u, v)) < 1e-10


def test_interpolation_is_deterministic():
    grid = QuadrantGrid(0.125, 0.0, 1.0, 0.0, 1.0)
    field = fill_quadrant(grid, lambda u, v: sin(3 * u) + v ** 2)
    a = interpolate_field(field, (0.33, 0.67))
    b = interpolate_field(field, (0.33, 0.67))
    assert a == b
