"""Scenario synthesis: turn endpoint invariants into usable data.

A scenario bundles three things built from one set of endpoint
invariants: the interface curve with the soft-side data induced along it
(polynomial jets, with the shell mass integrated exactly so the
compression factor is one on the curve), the hard-phase radius profile
along the incoming ray, and initial data on the two null rays through
the endpoint for the hard-phase solver.

The jets are quadratic; that is exactly the order the endpoint
invariants control, and every acceptance measurement is taken in
windows shrinking toward the endpoint where the truncation is
subdominant.
"""

from math import pi

import numpy as np
from numpy.polynomial import Polynomial

from .barrier import xi_plus_of_state
from .errors import StepDivergenceError, TrappedRegionError
from .geometry import InterfaceCurve, NullPointInvariants
from .raydata import CharacteristicData

FOURPI = 4.0 * pi


def reference_scenario():
    """The symmetric benchmark case: unit radius, unit null slopes,
    unit interface curvature, gradient decay 2*pi."""
    return synthesize_scenario(
        NullPointInvariants(1.0, 1.0, 1.0, 1.0, 2 * pi), name="reference")


def formation_scenario(invariants=None, name="formation", tail=0.25,
                       tau_hat=0.09375, chi_max=0.40):
    """A scenario with extents sized for marching the free boundary.

    The default extents of synthesize_scenario cover the small endpoint
    neighbourhood the quadrant solver probes; the boundary march needs a
    longer comoving window before its fitted coefficients stabilise, so
    this widens the interface domain accordingly.  Defaults to the
    reference invariants."""
    if invariants is None:
        invariants = NullPointInvariants(1.0, 1.0, 1.0, 1.0, 2 * pi)
    return synthesize_scenario(invariants, name=name, tail=tail,
                               tau_hat=tau_hat, chi_max=chi_max)


def synthesize_scenario(invariants, name="custom", tail=0.25,
                        phi_vvv=0.0, u_extent=14.0 / 256, v_extent=4.0 / 256,
                        tau_hat=0.05, chi_max=0.06):
    inv = invariants
    jets = inv.jets()

    f = Polynomial([0.0, 0.5, 0.5 * jets["f_ddot"]])
    r_star = Polynomial([inv.r0, jets["rstar_chi"],
                         0.5 * jets["rstar_chichi"]])
    rdot_star = Polynomial([inv.rdot0, jets["rdotstar_chi"],
                            0.5 * jets["rdotstar_chichi"]])
    # Shell mass: the exact antiderivative of 4 pi r*^2 (r*' + f' rdot*),
    # which keeps the compression factor exactly one along the curve.
    dm_star = FOURPI * r_star ** 2 * (r_star.deriv() + f.deriv() * rdot_star)
    m_star = dm_star.integ() + inv.m0

    interface = InterfaceCurve(
        h=None, hprime=None,
        f=f, fprime=f.deriv(),
        r_star=r_star, drstar_dchi=r_star.deriv(),
        rdot_star=rdot_star, drdotstar_dchi=rdot_star.deriv(),
        m_star=m_star, dmstar_dchi=dm_star,
        chi_max=chi_max, invariants=inv)

    rddot0 = (2.0 / inv.r0) * (inv.a_minus0 * inv.rdot0
                               - 2.0 * pi * inv.r0 ** 2)
    rdddot0 = inv.a_minus0 ** 4 * jets["xi_minus"] - 3.0 * rddot0 ** 2 / inv.a_minus0
    ray = CharacteristicData(inv.r0, -inv.a_minus0, rddot0, rdddot0, inv.m0,
                             tail=tail)

    return Scenario(inv, interface, ray, name=name, phi_vvv=phi_vvv,
                    u_extent=u_extent, v_extent=v_extent,
                    tau_hat=tau_hat, chi_max=chi_max)


class Scenario(object):

    def __init__(self, invariants, interface, ray, name="custom",
                 phi_vvv=0.0, u_extent=14.0 / 256, v_extent=4.0 / 256,
                 tau_hat=0.05, chi_max=0.06):
        self.invariants = invariants
        self.interface = interface
        self.ray = ray
        self.name = name
        self.phi_vvv = float(phi_vvv)
        self.u_extent = float(u_extent)
        self.v_extent = float(v_extent)
        self.tau_hat = float(tau_hat)
        self.chi_max = float(chi_max)
        self.jets = invariants.jets()


def _rk4_grid(rhs, y0, xs, substeps):
    """Integrate dy/dx = rhs(x, y) through the points xs, returning the
    state at every xs entry.  xs may run in either direction."""
    out = np.empty((len(xs), len(y0)))
    y = np.asarray(y0, dtype=float)
    out[0] = y
    for i in range(len(xs) - 1):
        x0, x1 = xs[i], xs[i + 1]
        h = (x1 - x0) / substeps
        x = x0
        for _ in range(substeps):
            k1 = rhs(x, y)
            k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(x + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            x += h
        out[i + 1] = y
    return out


def _trapezoid_grid(rate, y0, xs):
    """Implicit-trapezoid march through the points xs, the same stepping
    the cell kernel uses, so data built this way shares its error profile.
    rate(i, y) is the right-hand side at node index i."""
    out = np.empty((len(xs), len(y0)))
    y = np.asarray(y0, dtype=float)
    out[0] = y
    for i in range(len(xs) - 1):
        h = xs[i + 1] - xs[i]
        f0 = rate(i, y)
        cur = y + h * f0
        done = False
        for _ in range(80):
            nxt = y + 0.5 * h * (f0 + rate(i + 1, cur))
            if np.max(np.abs(nxt - cur) / (1.0 + np.abs(nxt))) <= 1e-14:
                cur = nxt
                done = True
                break
            cur = nxt
        if not done:
            raise StepDivergenceError(
                "trapezoid step %d of a data ray did not converge" % (i + 1))
        y = cur
        out[i + 1] = y
    return out


def bottom_ray(scenario, us, substeps=8):
    """Data on the ingoing ray (v = 0, u <= 0), on the given ascending
    u values ending at 0.

    The fields the interior march advances in u (m, eta, K, and kappa
    through its transport) are rebuilt with the kernel's trapezoid
    stepping on top of the fine reference integration; the ray anchors
    (r, phi, zeta, xi, nu) keep the reference accuracy.
    """
    inv = scenario.invariants
    jets = scenario.jets
    phi = Polynomial([0.0, 0.5, 0.5 * jets["phi_uu"],
                      jets["phi_uuu"] / 6.0])
    phi_u = phi.deriv()
    phi_uu = phi_u.deriv()

    def rhs(u, y):
        r, rp, m, eta, kint = y
        pu = phi_u(u)
        nu = -rp
        zeta = pu / nu
        mu = 2.0 * m / r
        g = FOURPI * r * r
        return np.array([
            rp,
            -FOURPI * r * pu * pu,
            -0.5 * g * nu * ((1.0 - mu) * zeta ** 2 + 1.0),
            (nu / r) * ((1.0 + g * zeta ** 2) * eta - (1.0 - mu) * zeta),
            g * nu * zeta ** 2 / r,
        ])

    us = np.asarray(us, dtype=float)
    y0 = np.array([inv.r0, -0.5 * inv.a_minus0, inv.m0, inv.a_minus0, 0.0])
    states = _rk4_grid(rhs, y0, us[::-1], substeps)[::-1]
    r, rp = states[:, 0], states[:, 1]
    nu = -rp
    pu = phi_u(us)
    zeta = pu / nu
    rpp = -FOURPI * r * pu * pu
    xi = (rp * phi_uu(us) - pu * rpp) / rp ** 3

    n_last = len(us) - 1

    def urate(i, y):
        m, eta, kint = y
        k = n_last - i
        mu = 2.0 * m / r[k]
        g = FOURPI * r[k] * r[k]
        return np.array([
            -0.5 * g * nu[k] * ((1.0 - mu) * zeta[k] ** 2 + 1.0),
            (nu[k] / r[k]) * ((1.0 + g * zeta[k] ** 2) * eta
                              - (1.0 - mu) * zeta[k]),
            g * nu[k] * zeta[k] ** 2 / r[k],
        ])

    y0u = np.array([inv.m0, inv.a_minus0, 0.0])
    m, eta, kint = _trapezoid_grid(urate, y0u, us[::-1]).T
    m, eta, kint = m[::-1], eta[::-1], kint[::-1]
    kappa = (0.5 / inv.a_minus0) * np.exp(-kint)
    return {
        "r": r, "phi": phi(us), "m": m, "nu": nu, "kappa": kappa,
        "zeta": zeta, "eta": eta, "xi": xi,
        "N": np.zeros_like(us), "K": kint, "Mint": np.zeros_like(us),
    }


def edge_ray(scenario, vs, substeps=8):
    """Data on the outgoing ray (u = 0, v >= 0), on the given ascending
    v values starting at 0."""
    inv = scenario.invariants
    jets = scenario.jets
    phi = Polynomial([0.0, 0.5, 0.5 * jets["phi_vv"],
                      scenario.phi_vvv / 6.0])
    phi_v = phi.deriv()

    def rhs(v, y):
        r, rv, m, zeta, xi, nint, mint = y
        mu = 2.0 * m / r
        if mu >= 1.0:
            raise TrappedRegionError("2m/r reached one on the outgoing ray")
        kappa = rv / (1.0 - mu)
        pv = phi_v(v)
        eta = pv / kappa
        g = FOURPI * r * r
        return np.array([
            rv,
            -FOURPI * r * pv * pv,
            0.5 * g * kappa * ((1.0 - mu) + eta ** 2),
            (kappa / r) * (eta - (1.0 - g) * zeta),
            kappa * xi_plus_of_state(r, mu, zeta, eta, xi),
            (mu - g) * kappa / r,
            phi(v) * (mu - g) * (kappa / r) * np.exp(nint),
        ])

    vs = np.asarray(vs, dtype=float)
    y0 = np.array([inv.r0, 0.5 * inv.a_plus0, inv.m0, 1.0 / inv.a_minus0,
                   jets["xi"], 0.0, 0.0])
    states = _rk4_grid(rhs, y0, vs, substeps)
    m = states[:, 2]
    mu_ref = 2.0 * m / states[:, 0]
    kappa = states[:, 1] / (1.0 - mu_ref)
    eta = phi_v(vs) / kappa

    def vrate(i, y):
        r, ph, zeta, xi, nint, mint = y
        mu = 2.0 * m[i] / r
        if mu >= 1.0:
            raise TrappedRegionError("2m/r reached one on the outgoing ray")
        g = FOURPI * r * r
        return np.array([
            (1.0 - mu) * kappa[i],
            kappa[i] * eta[i],
            (kappa[i] / r) * (eta[i] - (1.0 - g) * zeta),
            kappa[i] * xi_plus_of_state(r, mu, zeta, eta[i], xi),
            (mu - g) * kappa[i] / r,
            ph * (mu - g) * (kappa[i] / r) * np.exp(nint),
        ])

    y0v = np.array([inv.r0, 0.0, 1.0 / inv.a_minus0, jets["xi"], 0.0, 0.0])
    r, ph, zeta, xi, nint, mint = _trapezoid_grid(vrate, y0v, vs).T
    return {
        "r": r, "phi": ph, "m": m,
        "nu": 0.5 * inv.a_minus0 * np.exp(nint), "kappa": kappa,
        "zeta": zeta, "eta": eta, "xi": xi,
        "N": nint, "K": np.zeros_like(vs), "Mint": mint,
    }


def quadrant_rays(scenario, grid, substeps=8):
    us = grid.u_lo + grid.spacing * np.arange(grid.n_u)
    vs = grid.v_lo + grid.spacing * np.arange(grid.n_v)
    return bottom_ray(scenario, us, substeps), edge_ray(scenario, vs, substeps)
