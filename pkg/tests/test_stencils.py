from math import cos, sin

import numpy as np
import pytest

from expshock.errors import StencilError
from expshock.stencils import apply_line, fornberg_weights, pick_window


def test_centered_second_derivative_weights():
    w = fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2)
    assert np.allclose(w, [1.0, -2.0, 1.0], atol=1e-14)


def test_centered_first_derivative_weights():
    w = fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 1)
    assert np.allclose(w, [-0.5, 0.0, 0.5], atol=1e-14)


def test_interpolation_weights_sum_to_one():
    xs = np.array([0.0, 0.1, 0.2, 0.3])
    w = fornberg_weights(0.137, xs, 0)
    assert abs(w.sum() - 1.0) < 1e-13


def test_weights_exact_on_monomials():
    xs = np.linspace(0.0, 1.0, 5)
    x0 = 0.421
    for m in range(3):
        w = fornberg_weights(x0, xs, m)
        for p in range(5):
            exact = 0.0
            if p >= m:
                c = 1.0
                for q in range(m):
                    c *= p - q
                exact = c * x0 ** (p - m)
            assert abs(np.dot(w, xs ** p) - exact) < 1e-10


def test_apply_line_derivative_of_sine():
    xs = np.linspace(0.0, 1.0, 33)
    vals = np.sin(xs)
    d = apply_line(vals, xs, 0.5, 1, 3)
    assert abs(d - cos(0.5)) < 1e-3
    d2 = apply_line(vals, xs, 0.5, 2, 4)
    assert abs(d2 + sin(0.5)) < 1e-3


def test_apply_line_too_few_nodes():
    xs = np.array([0.0, 1.0])
    with pytest.raises(StencilError):
        apply_line(np.array([1.0, 2.0]), xs, 0.5, 2, 4)


def test_pick_window_clamps_to_edges():
    assert pick_window(10, 0, 10, 0.2, 4) == 0
    assert pick_window(10, 0, 10, 8.9, 4) == 6
    assert pick_window(10, 0, 10, 4.5, 4) == 3
    with pytest.raises(StencilError):
        pick_window(3, 0, 3, 1.0, 4)
