from math import pi

import pytest

from expshock.errors import DomainError, HardPhaseDegeneracyError
from expshock.raydata import CharacteristicData


def symmetric_ray():
    return CharacteristicData(1.0, -1.0, -4 * pi, 12 * pi, 0.0)


def test_endpoint_values():
    ray = symmetric_ray()
    assert ray.radius(0.0) == 1.0
    assert ray.slope(0.0) == -1.0
    assert ray.z(0.0) == 1.0
    assert abs(ray.xi(0.0) + 4 * pi) < 1e-13
    assert abs(ray.xi_minus(0.0) - (12 * pi + 48 * pi ** 2)) < 1e-11
    assert abs(ray.mass(0.0)) < 1e-15
    assert abs(ray.alpha(0.0) - 1.0) < 1e-15
    assert abs(ray.barrier(0.0)) < 1e-12
    assert abs(ray.barrier_minus(0.0) - 4 * pi) < 1e-10


def test_profile_antiderivatives_consistent():
    # R, R', R'' are claimed to be exact antiderivatives of the damped
    # third derivative; check with central differences.
    ray = CharacteristicData(2.0, -0.7, 1.3, -5.0, 0.1, tail=0.17)
    h = 1e-5
    for t in (0.0123, 0.11, 0.29):
        d1 = (ray.radius(t + h) - ray.radius(t - h)) / (2 * h)
        d2 = (ray.slope(t + h) - ray.slope(t - h)) / (2 * h)
        d3 = (ray.curvature(t + h) - ray.curvature(t - h)) / (2 * h)
        assert abs(d1 - ray.slope(t)) < 1e-8
        assert abs(d2 - ray.curvature(t)) < 1e-8
        assert abs(d3 - ray.third(t)) < 1e-7


def test_mass_initial_rate():
    ray = symmetric_ray()
    h = 1e-5
    rate = (ray.mass(h) - ray.mass(0.0)) / h
    assert abs(rate + 4 * pi) < 1e-3


def test_mass_integrator_fourth_order():
    # Halving the step should cut the mass error by about 2^4.
    ref = CharacteristicData(1.0, -1.0, -4 * pi, 12 * pi, 0.0, dt=2.0 ** -13)
    coarse = CharacteristicData(1.0, -1.0, -4 * pi, 12 * pi, 0.0, dt=2.0 ** -7)
    fine = CharacteristicData(1.0, -1.0, -4 * pi, 12 * pi, 0.0, dt=2.0 ** -8)
    t = 0.25
    err_c = abs(coarse.mass(t) - ref.mass(t))
    err_f = abs(fine.mass(t) - ref.mass(t))
    assert err_c > 0
    assert 10.0 < err_c / err_f < 24.0


def test_barrier_minus_matches_difference_quotient():
    ray = symmetric_ray()
    h = 2.5e-5
    for t in (0.01, 0.05, 0.12):
        ded = (ray.barrier(t + h) - ray.barrier(t - h)) / (2 * h)
        assert abs(ray.barrier_minus(t) - ray.z(t) * ded) < 5e-6


def test_shifted_family():
    ray = symmetric_ray()
    member = ray.shifted(0.01, 0.002, 0.03)
    assert abs(member.radius(0.0) - 1.01) < 1e-15
    assert abs(member.slope(0.0) + 0.998) < 1e-15
    assert abs(member.curvature(0.0) - (-4 * pi + 0.03)) < 1e-13
    assert member.third(0.0) == ray.third(0.0)


def test_validity_window():
    ray = symmetric_ray()
    # the symmetric profile collapses before t = 0.5
    assert 0.25 < ray.t_valid < 0.5
    with pytest.raises(DomainError):
        ray.mass(ray.t_valid + 0.01)
    with pytest.raises(HardPhaseDegeneracyError):
        CharacteristicData(1.0, 0.5, 0.0, 0.0, 0.0)
