from math import pi

import numpy as np
import pytest

from expshock import kernel, kernel_py
from expshock.errors import CollapseError, TrappedRegionError
from expshock.evolve import advance_cell


def flat_state(u, v):
    # nu = kappa = 1/2, zeta = eta = 1, r = 1 + (v - u)/2, phi = (v - u)/2
    s = np.zeros(kernel.NVARS)
    s[0] = 1.0 + 0.5 * (v - u)
    s[1] = 0.5 * (v - u)
    s[3] = 0.5
    s[4] = 0.5
    s[5] = 1.0
    s[6] = 1.0
    return s


def test_flat_cell_is_exact():
    d = 0.01
    S = flat_state(0.0, 0.0)
    W = flat_state(d, d)
    out = np.empty(kernel.NVARS)
    status, iters, rr, rm = kernel.solve_cell(S, W, -d, d, 0.0, 1e-14, 40, out)
    assert status == 0
    expect = flat_state(0.0, d)
    assert np.max(np.abs(out - expect)) < 1e-15
    assert rr < 1e-15
    assert rm < 1e-15


def test_python_twin_matches_on_flat_cell():
    d = 0.02
    S = flat_state(0.0, 0.0)
    W = flat_state(d, d)
    out_a = np.empty(kernel.NVARS)
    out_b = np.empty(kernel.NVARS)
    res_a = kernel.solve_cell(S, W, -d, d, 0.0, 1e-14, 40, out_a)
    res_b = kernel_py.solve_cell(S, W, -d, d, 0.0, 1e-14, 40, out_b)
    assert res_a[0] == res_b[0]
    assert np.array_equal(out_a, out_b)


def test_collapse_status():
    d = 0.01
    S = flat_state(0.0, 0.0)
    W = flat_state(d, d)
    S[0] = 0.01
    W[0] = 0.01
    S[4] = -5.0
    W[4] = -5.0
    with pytest.raises(CollapseError):
        advance_cell(S, W, -d, d, fourpi=0.0)


def test_trapped_status():
    d = 0.01
    S = flat_state(0.0, 0.0)
    W = flat_state(d, d)
    S[2] = 0.8
    W[2] = 0.8
    with pytest.raises(TrappedRegionError):
        advance_cell(S, W, -d, d, fourpi=0.0)


def test_nonconvergence_is_reported():
    d = 0.05
    S = flat_state(0.0, 0.0)
    W = flat_state(d, d)
    out = np.empty(kernel.NVARS)
    status, iters, rr, rm = kernel.solve_cell(S, W, -d, d, 4.0 * pi,
                                              1e-16, 1, out)
    assert status == -1
    assert iters == 1
