from math import pi

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from expshock.grids import ComovingGrid
from expshock.scenarios import reference_scenario
from expshock.softphase import (evolve_flowline, flowline_state,
                                init_from_interface, rho_return_curve,
                                soft_diagnostics)


def test_endpoint_entry_state():
    sc = reference_scenario()
    d = flowline_state(sc.interface, 0.0, 0.0)
    assert abs(d["r"] - 1.0) < 1e-13
    assert abs(d["rho"] - 1.0) < 1e-13
    assert abs(d["eomega"] - 0.5) < 1e-13
    assert abs(d["a_minus"] - 1.0) < 1e-13
    assert abs(d["a_plus"] - 1.0) < 1e-13
    assert abs(d["m"]) < 1e-13


def test_compression_matches_quadratic_locally():
    # rho = 1 + 2*pi*(tau + chi/2)*(tau - 3*chi/2) + cubic corrections
    # for the symmetric case, so halving the probe scale should shrink
    # the defect by about eight.
    sc = reference_scenario()

    def defect(s):
        d = flowline_state(sc.interface, s, s)
        quad = 1.0 + 2.0 * pi * (s + 0.5 * s) * (s - 1.5 * s)
        return abs(d["rho"] - quad)

    d1, d2 = defect(0.012), defect(0.006)
    assert d1 < 1e-3
    assert d1 / d2 > 5.0


def test_flowline_energy_is_conserved():
    taus = np.linspace(0.0, 0.5, 33)
    r, rdot = evolve_flowline(0.05, 1.0, -0.1, 0.0, taus)
    energy = rdot ** 2 - 2.0 * 0.05 / r
    assert np.max(np.abs(energy - energy[0])) < 1e-11


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.15), st.floats(-0.25, 0.25))
def test_flowline_energy_conserved_generally(m_shell, rdot0):
    taus = np.linspace(0.0, 0.3, 7)
    r, rdot = evolve_flowline(m_shell, 1.0, rdot0, 0.0, taus)
    energy = rdot ** 2 - 2.0 * m_shell / r
    assert np.max(np.abs(energy - energy[0])) < 1e-9


def make_grid(p):
    d = 2.0 ** -p
    sc = reference_scenario()
    grid = ComovingGrid(d, d, -0.03125, 0.0625, 0.0, 0.03125,
                        past=lambda chi: -sc.interface.f(chi))
    return sc, grid


def test_field_diagnostics_converge():
    sc, g1 = make_grid(7)
    _, g2 = make_grid(8)
    rep1 = soft_diagnostics(init_from_interface(sc.interface, g1))
    rep2 = soft_diagnostics(init_from_interface(sc.interface, g2))
    for key in ("dual_delta", "hessian"):
        assert rep1[key] / rep2[key] > 3.0
    for rep in (rep1, rep2):
        assert rep["energy_drift"] < 1e-10
        assert rep["slope_product"] < 1e-12
        assert rep["min_w2"] > 0.5
        assert rep["rho_min"] < 1.0 <= rep["rho_max"] + 1e-9


def test_return_curve_slope():
    # The compression factor dips below one after entry and climbs back
    # at tau close to 1.5 chi in the symmetric case.
    sc = reference_scenario()
    chis = np.array([0.004, 0.008, 0.016])
    taus = rho_return_curve(sc.interface, chis)
    ratios = taus / chis
    assert np.all(np.diff(taus) > 0)
    assert abs(ratios[0] - 1.5) < 0.1
    # linear extrapolation of the ratio toward chi = 0
    extrap = 2.0 * ratios[0] - ratios[1]
    assert abs(extrap - 1.5) < 0.03
