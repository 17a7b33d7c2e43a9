from math import pi, sqrt

import numpy as np
import pytest

from expshock import interface as itf
from expshock.errors import (DegenerateEndpointError, InsufficientCollarError,
                             NoInterfaceError, UndefinedNormalError)
from expshock.evolve import evolve_quadrant
from expshock.geometry import InterfaceCurve, NullPointInvariants
from expshock.grids import (ComovingGrid, QuadrantGrid, ScalarField,
                            interpolate_field)
from expshock.hardfield import VAR_NAMES, HardField
from expshock.scenarios import reference_scenario, synthesize_scenario
from expshock.softphase import init_from_interface

_cache = {}


def _hard(p):
    if p not in _cache:
        _cache[p] = evolve_quadrant(reference_scenario(), spacing=2.0 ** -p)
    return _cache[p]


def _curve(p):
    key = ("curve", p)
    if key not in _cache:
        _cache[key] = itf.build_interface(_hard(p))
    return _cache[key]


def _soft(p, scenario=None):
    d = 2.0 ** -p
    if scenario is None:
        scenario = reference_scenario()
    grid = ComovingGrid(d, d, -8 * d, 4 * d, 0.0, 8 * d,
                        past=lambda c: -scenario.interface.f(c))
    return init_from_interface(scenario.interface, grid)


def test_extracted_curve_tracks_the_level_set():
    hard = _hard(8)
    curve = _curve(8)
    sigma = hard.derived("sigma_sq")
    for u in (-0.04, -0.02, -0.01):
        assert abs(interpolate_field(sigma, (u, curve.h(u))) - 1.0) < 1e-8


def test_extracted_curve_is_parabolic_near_endpoint():
    curve = _curve(8)
    u = -0.02
    assert curve.h(u) == pytest.approx(0.5 * u * u, rel=0.02)
    assert curve.hprime(u) == pytest.approx(u, rel=0.05)
    assert abs(curve.hprime(0.0)) < 1e-3


def test_endpoint_data_and_tilt():
    curve = _curve(8)
    d = 2.0 ** -8
    assert abs(curve.f(0.0)) < 1e-10
    assert curve.fprime(0.0) == pytest.approx(0.5, abs=1e-3)
    assert curve.r_star(0.0) == pytest.approx(1.0, abs=1e-9)
    assert abs(curve.m_star(0.0)) < 1e-9
    assert abs(curve.rdot_star(0.0)) < 1e-3
    assert curve.delta(0.0) == pytest.approx(1.0, abs=1e-3)
    assert curve.delta(3 * d) < 1.0


def test_boost_rate_matches_curvature():
    synth = reference_scenario().interface
    assert synth.boost(0.0) == pytest.approx(4.0, abs=1e-4)
    curve = _curve(9)
    assert curve.boost(0.0, step=4 * 2.0 ** -9) == pytest.approx(4.0, rel=0.02)


def test_measured_invariants_match_scenario():
    inv = itf.nullpoint_invariants(_curve(9), _hard(9))
    assert inv.r0 == pytest.approx(1.0, abs=1e-8)
    assert inv.a_minus0 == pytest.approx(1.0, abs=1e-8)
    assert inv.a_plus0 == pytest.approx(1.0, abs=1e-8)
    assert inv.curvature == pytest.approx(1.0, rel=0.02)
    assert inv.sigma_decay == pytest.approx(2.0 * pi, rel=1e-3)


def test_continuity_report_second_order():
    reps = {p: itf.continuity_report(_hard(p), _soft(p), _curve(p))
            for p in (7, 8)}
    for key in ("omega", "phi_u", "phi_v", "r_u", "r_v", "m", "rho"):
        coarse, fine = reps[7]["sup"][key], reps[8]["sup"][key]
        assert fine < 0.02, key
        if coarse > 1e-10:
            assert coarse / max(fine, 1e-300) > 3.4, key
    assert np.max(np.abs(reps[8]["rho_soft_limit"] - 1.0)) < 1e-5


def test_report_flags_mismatched_pair():
    good = itf.continuity_report(_hard(8), _soft(8), _curve(8))
    pert = synthesize_scenario(
        NullPointInvariants(1.0, 1.0, 1.15, 1.0, 2.0 * pi))
    bad = itf.continuity_report(_hard(8), _soft(8, pert), _curve(8))
    assert bad["sup"]["m"] > 20.0 * good["sup"]["m"]


def test_out_of_collar_probe_raises():
    with pytest.raises(InsufficientCollarError):
        itf.continuity_report(_hard(8), _soft(8), _curve(8),
                              probe_multiples=(2, 200))


def test_no_crossing_raises():
    hard = _hard(8)
    vals = hard.values.copy()
    vals[:, :, VAR_NAMES.index("zeta")] *= 1.2
    with pytest.raises(NoInterfaceError):
        itf.build_interface(HardField(hard.grid, vals))


def test_truncated_patch_fails_endpoint_gate():
    hard = _hard(8)
    d = hard.grid.spacing
    n_keep = hard.grid.n_u - 6
    grid = QuadrantGrid(d, hard.grid.u_lo, hard.grid.u(n_keep - 1),
                        hard.grid.v_lo, hard.grid.v_hi)
    with pytest.raises(DegenerateEndpointError):
        itf.build_interface(HardField(grid, hard.values[:n_keep].copy()))


def test_canonicalize_is_idempotent():
    hard = _hard(8)
    curve2, hard2, maps = itf.canonicalize(_curve(8), hard)
    assert maps["boost"] == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(maps["utilde"] - maps["u"])) < 1e-4
    assert np.max(np.abs(maps["vtilde"] - maps["v"])) < 1e-4
    old = hard.values[hard.grid.n_u - hard2.grid.n_u:, :hard2.grid.n_v, :]
    for k, nm in enumerate(VAR_NAMES):
        scale = max(1.0, np.max(np.abs(old[:, :, k])))
        assert np.max(np.abs(hard2.values[:, :, k] - old[:, :, k])) < 1e-3 * scale, nm


def _skewed_patch(hard, lam):
    # consistent reparameterization u = lam (t + t^2/2), v = (s - 0.3 s^2)/lam
    d = hard.grid.spacing
    iv = {nm: k for k, nm in enumerate(VAR_NAMES)}
    grid = QuadrantGrid(d, hard.grid.u_lo, 0.0, 0.0, 3 * d)
    vals = np.empty((grid.n_u, grid.n_v, len(VAR_NAMES)))
    for i in range(grid.n_u):
        t = grid.u(i)
        u = lam * (t + 0.5 * t * t)
        for j in range(grid.n_v):
            s = grid.v(j)
            p = (u, (s - 0.3 * s * s) / lam)
            for nm in ("r", "phi", "m", "zeta", "eta", "xi"):
                vals[i, j, iv[nm]] = interpolate_field(getattr(hard, nm), p)
            vals[i, j, iv["nu"]] = (interpolate_field(hard.nu, p)
                                    * lam * (1.0 + t))
            vals[i, j, iv["kappa"]] = (interpolate_field(hard.kappa, p)
                                       * (1.0 - 0.6 * s) / lam)
    vals[:, :, iv["N"]] = np.log(vals[:, :, iv["nu"]]
                                 / vals[:, :, iv["nu"]][:, :1])
    vals[:, :, iv["K"]] = np.log(vals[-1:, :, iv["kappa"]]
                                 / vals[:, :, iv["kappa"]])
    r = vals[:, :, iv["r"]]
    mu = 2.0 * vals[:, :, iv["m"]] / r
    g = hard.fourpi * r * r
    rate = (vals[:, :, iv["phi"]] * (mu - g) * vals[:, :, iv["kappa"]] / r
            * np.exp(vals[:, :, iv["N"]]))
    mint = np.zeros_like(rate)
    mint[:, 1:] = np.cumsum(0.5 * (rate[:, 1:] + rate[:, :-1]) * d, axis=1)
    vals[:, :, iv["Mint"]] = mint
    return HardField(grid, vals, scenario=hard.scenario, fourpi=hard.fourpi)


def test_canonicalize_undoes_reparameterization():
    hard = _hard(8)
    lam = 0.9
    skewed = _skewed_patch(hard, lam)
    curve2, hard2, maps = itf.canonicalize(itf.build_interface(skewed), skewed)
    assert maps["boost"] == pytest.approx(1.0 / lam, abs=1e-9)
    corner = (hard2.grid.u_hi, hard2.grid.v_lo)
    assert interpolate_field(hard2.nu, corner) == pytest.approx(0.5, abs=1e-9)
    assert interpolate_field(hard2.kappa, corner) == pytest.approx(0.5, abs=1e-9)
    old = hard.values[hard.grid.n_u - hard2.grid.n_u:, :hard2.grid.n_v, :]
    for nm in ("r", "phi", "m", "nu", "kappa", "zeta", "eta"):
        k = VAR_NAMES.index(nm)
        assert np.max(np.abs(hard2.values[:, :, k] - old[:, :, k])) < 1e-4, nm
    inv = itf.nullpoint_invariants(curve2, hard2)
    assert inv.r0 == pytest.approx(1.0, abs=1e-5)
    assert inv.curvature == pytest.approx(1.0, rel=0.03)
    assert inv.sigma_decay == pytest.approx(2.0 * pi, rel=1e-2)


def test_curvature_jump_refinement_stable():
    a = itf.curvature_jump(_hard(8), _curve(8), 0.02)
    b = itf.curvature_jump(_hard(9), _curve(9), 0.02)
    assert a == pytest.approx(b, rel=0.02)


def test_curvature_jump_gates_near_endpoint():
    with pytest.raises(UndefinedNormalError):
        itf.curvature_jump(_hard(8), _curve(8), 2.0 ** -9)


def test_curvature_jump_vanishes_for_uniform_sigma():
    d = 2.0 ** -7
    grid = QuadrantGrid(d, -8 * d, 0.0, 0.0, 8 * d)
    vals = np.zeros((grid.n_u, grid.n_v, len(VAR_NAMES)))
    iv = {nm: k for k, nm in enumerate(VAR_NAMES)}
    for i in range(grid.n_u):
        for j in range(grid.n_v):
            vals[i, j, iv["r"]] = 1.0 + 0.5 * (grid.v(j) - grid.u(i))
    vals[:, :, iv["nu"]] = 0.5
    vals[:, :, iv["kappa"]] = 0.5
    vals[:, :, iv["zeta"]] = 1.0
    vals[:, :, iv["eta"]] = 1.0
    flat = HardField(grid, vals, fourpi=0.0)
    zero = lambda chi: 0.0
    curve = InterfaceCurve(
        h=lambda u: -0.5 * u, hprime=lambda u: -0.5,
        f=zero, fprime=zero, r_star=zero, drstar_dchi=zero,
        rdot_star=zero, drdotstar_dchi=zero, m_star=zero,
        dmstar_dchi=zero, chi_max=8 * d)
    assert abs(itf.curvature_jump(flat, curve, 0.03)) < 1e-12
