from math import pi

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expshock.barrier import (barrier_minus_of_state, barrier_of_state,
                              barrier_plus_of_state, xi_plus_of_state)
from expshock.errors import InfeasibleScenarioError, NonGenericScenarioError
from expshock.geometry import NullPointInvariants, rho_hessian_closed_form


def symmetric_case():
    return NullPointInvariants(1.0, 1.0, 1.0, 1.0, 2 * pi)


def test_symmetric_scalars():
    inv = symmetric_case()
    assert inv.mu0 == 0.0
    assert inv.m0 == 0.0
    assert inv.rdot0 == 0.0
    assert abs(inv.rate_product - 2 * pi) < 1e-15
    assert abs(inv.intrinsic_rate - pi) < 1e-15
    assert abs(inv.shock_parameter - 3.0) < 1e-14
    assert abs(inv.initial_velocity - 0.5) < 1e-15


def test_symmetric_jets():
    jets = symmetric_case().jets()
    assert abs(jets["r_uu"] + pi) < 1e-14
    assert abs(jets["r_uv"] - pi) < 1e-14
    assert abs(jets["phi_vv"] + pi) < 1e-14
    assert abs(jets["phi_uuu"] - pi) < 1e-14
    assert abs(jets["xi"] + 4 * pi) < 1e-13
    assert abs(jets["xi_minus"] - (12 * pi + 48 * pi ** 2)) < 1e-12
    assert abs(jets["xi_plus"] - (4 * pi - 48 * pi ** 2)) < 1e-12
    assert abs(jets["e_u"] - 2 * pi) < 1e-14
    assert abs(jets["e_v"] - 2 * pi) < 1e-14
    assert abs(jets["e_plus"] - 4 * pi) < 1e-14
    assert abs(jets["e_minus"] - 4 * pi) < 1e-14
    assert abs(jets["rho_tautau"] - 4 * pi) < 1e-14
    assert abs(jets["rho_tauchi"] + 2 * pi) < 1e-14
    assert abs(jets["rho_chichi"] + 3 * pi) < 1e-14
    assert abs(jets["rdotstar_chichi"] - 3 * pi) < 1e-13
    assert abs(jets["r_tauchichi"] - pi) < 1e-13
    assert abs(jets["f_ddot"] + 0.5) < 1e-15
    assert abs(jets["omega_star_prime"] - 1.0) < 1e-15
    assert abs(jets["rstar_chichi"] - (0.5 - pi)) < 1e-14
    assert jets["rdotstar_chi"] == 0.0


def test_hessian_matches_jets():
    inv = NullPointInvariants(1.0, 1.0, 2.0, 2.0, 4.0)
    jets = inv.jets()
    hess = rho_hessian_closed_form(inv)
    assert hess["rho_tautau"] == jets["rho_tautau"]
    assert hess["rho_tauchi"] == jets["rho_tauchi"]
    assert hess["rho_chichi"] == jets["rho_chichi"]
    assert abs(hess["identity_residual"]) < 1e-13
    assert abs(hess["shock_parameter"] - inv.shock_parameter) < 1e-13


def test_rejects_bad_endpoints():
    with pytest.raises(InfeasibleScenarioError):
        NullPointInvariants(-1.0, 1.0, 1.0, 1.0, 7.0)
    with pytest.raises(InfeasibleScenarioError):
        NullPointInvariants(1.0, -1.0, 1.0, 1.0, 7.0)
    with pytest.raises(NonGenericScenarioError):
        NullPointInvariants(1.0, 1.0, 1.0, -1.0, 7.0)
    with pytest.raises(NonGenericScenarioError):
        NullPointInvariants(1.0, 1.0, 1.0, 1.0, 1.0)  # product below intrinsic rate


invariant_sets = st.tuples(
    st.floats(0.5, 2.0), st.floats(0.5, 1.5), st.floats(0.2, 1.2),
    st.floats(0.5, 3.0), st.floats(8.0, 40.0))


def corner_state(inv):
    jets = inv.jets()
    am = inv.a_minus0
    return dict(r=inv.r0, mu=inv.mu0, zeta=1.0 / am, eta=am,
                xi=jets["xi"], xi_minus=jets["xi_minus"],
                xi_plus=jets["xi_plus"])


@settings(max_examples=60, deadline=None)
@given(invariant_sets)
def test_barrier_algebra_consistent_at_endpoint(params):
    r0, am, ap, k, j = params
    if j * k <= 1.05 * (0.375 * (ap - am) ** 2 + pi * r0 ** 2) / r0 ** 2:
        return
    inv = NullPointInvariants(r0, am, ap, k, j)
    s = corner_state(inv)
    jets = inv.jets()
    # Closed-form endpoint derivatives of the steepening rate and barrier
    # must agree with the general pointwise algebra evaluated there.
    assert abs(xi_plus_of_state(s["r"], s["mu"], s["zeta"], s["eta"], s["xi"])
               - jets["xi_plus"]) < 1e-10 * (1 + abs(jets["xi_plus"]))
    assert abs(barrier_of_state(s["r"], s["mu"], s["zeta"], s["xi"])) < 1e-12
    assert abs(barrier_minus_of_state(s["r"], s["mu"], s["zeta"], s["xi"],
                                      s["xi_minus"])
               - jets["e_minus"]) < 1e-9 * (1 + abs(jets["e_minus"]))
    assert abs(barrier_plus_of_state(s["r"], s["mu"], s["zeta"], s["eta"],
                                     s["xi"], s["xi_plus"])
               - jets["e_plus"]) < 1e-9 * (1 + abs(jets["e_plus"]))


def test_asymmetric_pins():
    inv = NullPointInvariants(1.0, 1.0, 2.0, 2.0, 4.0)
    assert abs(inv.mu0 + 1.0) < 1e-15
    assert abs(inv.rdot0 - 0.5) < 1e-15
    jets = inv.jets()
    assert abs(jets["xi"] - (1 - 4 * pi)) < 1e-13
    assert abs(jets["xi_plus"] - (8 * pi - 48 * pi ** 2 - 1)) < 1e-11
