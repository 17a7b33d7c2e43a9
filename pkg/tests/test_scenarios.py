from math import pi

import numpy as np
import pytest

from expshock import evolve, kernel, kernel_py
from expshock.errors import TrappedRegionError
from expshock.evolve import evolve_quadrant
from expshock.hardfield import consistency_report
from expshock.scenarios import bottom_ray, edge_ray, reference_scenario

RAY_FIELDS = ("r", "phi", "m", "nu", "kappa", "zeta", "eta", "xi",
              "N", "K", "Mint")


def corner_expect():
    return {"r": 1.0, "phi": 0.0, "m": 0.0, "nu": 0.5, "kappa": 0.5,
            "zeta": 1.0, "eta": 1.0, "xi": -4.0 * pi,
            "N": 0.0, "K": 0.0, "Mint": 0.0}


def test_ray_endpoint_values():
    sc = reference_scenario()
    us = np.linspace(-0.04, 0.0, 9)
    vs = np.linspace(0.0, 0.015, 7)
    bottom = bottom_ray(sc, us)
    edge = edge_ray(sc, vs)
    want = corner_expect()
    for nm in RAY_FIELDS:
        assert abs(bottom[nm][-1] - want[nm]) < 1e-12, nm
        assert abs(edge[nm][0] - want[nm]) < 1e-12, nm


def test_bottom_ray_matches_jet_expansion():
    sc = reference_scenario()
    h = 0.02
    us = np.linspace(-h, 0.0, 5)
    bottom = bottom_ray(sc, us)
    # r = 1 + h/2 - (pi/2) h^2 - (pi/12) h^3 + O(h^4) at u = -h
    taylor = 1.0 + 0.5 * h - 0.5 * pi * h * h - (pi / 12.0) * h ** 3
    assert abs(bottom["r"][0] - taylor) < 5e-6
    # eta leaves the endpoint at rate 2 pi
    assert abs(bottom["eta"][0] - (1.0 - 2.0 * pi * h)) < 0.1 * h


def test_edge_ray_keeps_unit_conformal_factor():
    # On the outgoing data ray the gauge fixes 4 nu kappa = 1; the
    # transported nu satisfies it to the stepping order.
    sc = reference_scenario()

    def worst(n):
        vs = np.linspace(0.0, 0.015, n)
        edge = edge_ray(sc, vs)
        return np.max(np.abs(4.0 * edge["nu"] * edge["kappa"] - 1.0))

    w1, w2 = worst(5), worst(9)
    assert w1 < 1e-4
    assert w1 / w2 > 3.0


def test_quadrant_march_residuals_converge():
    sc = reference_scenario()
    reps = {p: consistency_report(evolve_quadrant(sc, spacing=2.0 ** -p))
            for p in (8, 9)}
    for key in ("hess_uu", "hess_vv", "hess_uv", "wave",
                "mass_u", "mass_v", "grad_sigma"):
        ratio = reps[8][key] / reps[9][key]
        assert 3.2 < ratio < 5.0, (key, ratio)
    assert reps[8]["cell_resid_r"] / reps[9]["cell_resid_r"] > 6.0
    assert reps[9]["iters_max"] < 20


def test_march_backends_agree():
    if kernel.BACKEND != "compiled":
        pytest.skip("compiled kernel not available")
    sc = reference_scenario()
    fld_c = evolve_quadrant(sc, spacing=2.0 ** -8)
    saved = evolve.solve_cell
    evolve.solve_cell = kernel_py.solve_cell
    try:
        fld_p = evolve_quadrant(sc, spacing=2.0 ** -8)
    finally:
        evolve.solve_cell = saved
    assert np.max(np.abs(fld_c.values - fld_p.values)) < 1e-13


def test_march_guard_rejects_near_trapped_run():
    sc = reference_scenario()
    with pytest.raises(TrappedRegionError):
        evolve_quadrant(sc, spacing=2.0 ** -7, mu_cap=0.4)
