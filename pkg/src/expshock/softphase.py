"""Soft-phase evolution in comoving coordinates.

Behind the interface the fluid is pressureless, so each flow line (fixed
comoving label chi) falls freely in the mass inside it.  We integrate
four quantities per line: the radius r, its rate rdot, and their
chi-derivatives delta and deltadot, the last two by the variational
equations.  Everything else is algebra: the compression factor rho, the
conformal factor of the line element, and the two null slopes of the
radius.

A flow line starts on the interface at tau = -f(chi) with data induced
from the hard side; the shell mass m(chi) never changes afterwards.
"""

from math import sqrt

import numpy as np

from .errors import (CollapseError, DomainError, SignatureError,
                     StencilError)
from .grids import ScalarField, finite_difference

FOURPI = 4.0 * np.pi


def _rhs(y, m_shell, dm_shell):
    r, rdot, delta, deltadot = y
    inv2 = 1.0 / (r * r)
    return np.array([
        rdot,
        -m_shell * inv2,
        deltadot,
        -dm_shell * inv2 + 2.0 * m_shell * delta * inv2 / r,
    ])


def _rk4_to(y, t0, t1, m_shell, dm_shell, h_nom):
    n = max(1, int(np.ceil(abs(t1 - t0) / h_nom)))
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        k1 = _rhs(y, m_shell, dm_shell)
        k2 = _rhs(y + 0.5 * h * k1, m_shell, dm_shell)
        k3 = _rhs(y + 0.5 * h * k2, m_shell, dm_shell)
        k4 = _rhs(y + h * k3, m_shell, dm_shell)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if y[0] <= 0:
            raise CollapseError("flow line radius hit zero at tau = %.6g" % t)
    return y


def _line_start(interface, chi):
    f = interface.f(chi)
    fp = interface.fprime(chi)
    r = interface.r_star(chi)
    rdot = interface.rdot_star(chi)
    m = interface.m_star(chi)
    dm = interface.dmstar_dchi(chi)
    delta = interface.drstar_dchi(chi) + fp * rdot
    deltadot = interface.drdotstar_dchi(chi) - fp * m / r ** 2
    w2 = 1.0 - 2.0 * m / r + rdot * rdot
    if w2 <= 0:
        raise SignatureError("comoving chart degenerates at chi = %.6g" % chi)
    y = np.array([r, rdot, delta, deltadot])
    return -f, y, m, dm


def _derived(y, m, dm):
    r, rdot, delta, deltadot = y
    mu = 2.0 * m / r
    w2 = 1.0 - mu + rdot * rdot
    if w2 <= 0:
        raise SignatureError("1 - 2m/r + rdot^2 <= 0 on a flow line")
    if delta <= 0:
        raise CollapseError("flow lines cross: delta <= 0")
    w = sqrt(w2)
    return {
        "r": r, "rdot": rdot, "delta": delta, "deltadot": deltadot,
        "m": m, "dm": dm, "mu": mu, "w2": w2,
        "rho": dm / (FOURPI * r * r * delta),
        "eomega": delta / w,
        "a_minus": -rdot + w,
        "a_plus": rdot + w,
        "energy": rdot * rdot - mu,
    }


def flowline_state(interface, chi, tau, h_nom=2.0 ** -10):
    """Soft-phase state at one comoving point, by integrating the flow
    line from its entry on the interface."""
    t0, y, m, dm = _line_start(interface, chi)
    if tau < t0 - 1e-12:
        raise DomainError("tau = %.6g is before the interface at chi = %.6g"
                          % (tau, chi))
    y = _rk4_to(y, t0, tau, m, dm, h_nom)
    return _derived(y, m, dm)


def evolve_flowline(m_shell, r_init, rdot_init, tau_init, taus,
                    h_nom=2.0 ** -10):
    """Free fall of one shell: radius and rate at the requested times.

    taus must be nondecreasing and start at or after tau_init.
    """
    y = np.array([r_init, rdot_init, 1.0, 0.0])
    out_r = np.empty(len(taus))
    out_rdot = np.empty(len(taus))
    t = tau_init
    for idx, tau in enumerate(taus):
        if tau < t - 1e-12:
            raise DomainError("requested times must be nondecreasing")
        y = _rk4_to(y, t, tau, m_shell, 0.0, h_nom)
        t = tau
        out_r[idx] = y[0]
        out_rdot[idx] = y[1]
    return out_r, out_rdot


class SoftField(object):
    """Soft-phase fields sampled on a comoving grid.

    Scalar fields: r, rdot, delta, deltadot, rho, eomega (the conformal
    factor itself, not its log).  Per-line arrays: m_star, dm_star,
    energy0 (the conserved rdot^2 - 2m/r at entry).
    """

    FIELD_NAMES = ("r", "rdot", "delta", "deltadot", "rho", "eomega")

    def __init__(self, grid, interface, arrays, m_star, dm_star, energy0):
        self.grid = grid
        self.interface = interface
        for nm in self.FIELD_NAMES:
            setattr(self, nm, ScalarField(grid, arrays[nm], nm))
        self.m_star = m_star
        self.dm_star = dm_star
        self.energy0 = energy0


def init_from_interface(interface, grid, h_nom=2.0 ** -10):
    """Fill a comoving grid by integrating every flow line from its entry
    point on the interface up the tau axis."""
    arrays = {nm: grid.new_values() for nm in SoftField.FIELD_NAMES}
    m_star = np.empty(grid.n_chi)
    dm_star = np.empty(grid.n_chi)
    energy0 = np.empty(grid.n_chi)
    for ic in range(grid.n_chi):
        chi = grid.chi_lo + ic * grid.dchi
        t0, y, m, dm = _line_start(interface, chi)
        m_star[ic] = m
        dm_star[ic] = dm
        energy0[ic] = y[1] ** 2 - 2.0 * m / y[0]
        t = t0
        for k in range(grid.col_start[ic], grid.n_tau):
            tau = grid.tau_lo + k * grid.dtau
            y = _rk4_to(y, t, tau, m, dm, h_nom)
            t = tau
            d = _derived(y, m, dm)
            for nm in SoftField.FIELD_NAMES:
                arrays[nm][ic, k] = d[nm]
    return SoftField(grid, interface, arrays, m_star, dm_star, energy0)


def soft_diagnostics(fld, probe_every=1):
    """Residual sups over the valid region.

    dual_delta compares the integrated chi-derivative of r against a
    finite difference across lines; hessian checks the cross-derivative
    identity rdot_chi = omega_tau * delta; energy_drift tracks the
    conserved energy per line.  All but energy_drift shrink at second
    order in the grid spacing.
    """
    grid = fld.grid
    with np.errstate(invalid="ignore"):
        log_omega = ScalarField(grid, np.log(fld.eomega.values), "log_omega")
    sup_dual = 0.0
    sup_hess = 0.0
    sup_energy = 0.0
    sup_product = 0.0
    min_w2 = np.inf
    for ic in range(0, grid.n_chi, probe_every):
        chi = grid.chi_lo + ic * grid.dchi
        for k in range(grid.col_start[ic], grid.n_tau, probe_every):
            tau = grid.tau_lo + k * grid.dtau
            pt = (tau, chi)
            try:
                fd_delta = finite_difference(fld.r, pt, (0, 1))
                fd_rdchi = finite_difference(fld.rdot, pt, (0, 1))
                fd_omtau = finite_difference(log_omega, pt, (1, 0))
            except StencilError:
                continue
            delta = fld.delta.values[ic, k]
            sup_dual = max(sup_dual, abs(delta - fd_delta))
            sup_hess = max(sup_hess, abs(fd_rdchi - fd_omtau * delta))
            r = fld.r.values[ic, k]
            rdot = fld.rdot.values[ic, k]
            mu = 2.0 * fld.m_star[ic] / r
            w2 = 1.0 - mu + rdot * rdot
            min_w2 = min(min_w2, w2)
            sup_energy = max(sup_energy,
                             abs(rdot * rdot - mu - fld.energy0[ic]))
            am = -rdot + sqrt(w2)
            ap = rdot + sqrt(w2)
            sup_product = max(sup_product, abs(am * ap + mu - 1.0))
    vals = fld.rho.values
    return {
        "dual_delta": sup_dual,
        "hessian": sup_hess,
        "energy_drift": sup_energy,
        "slope_product": sup_product,
        "min_w2": float(min_w2),
        "rho_min": float(np.nanmin(vals)),
        "rho_max": float(np.nanmax(vals)),
    }


def rho_return_curve(interface, chis, tol=1e-10, h_nom=2.0 ** -10,
                     tau_cap=1.0):
    """For each chi, the time at which the compression factor climbs back
    to one after its excursion below.  Returns an array aligned to chis.
    """
    out = np.empty(len(chis))
    for idx, chi in enumerate(chis):
        t0, y0, m, dm = _line_start(interface, chi)

        def excess(tau):
            y = _rk4_to(y0.copy(), t0, tau, m, dm, h_nom)
            return _derived(y, m, dm)["rho"] - 1.0

        step = max(4.0 * h_nom, 0.25 * abs(t0))
        lo = t0 + step
        if excess(lo) >= 0:
            raise DomainError("no decompression dip at chi = %.6g" % chi)
        hi = lo
        while excess(hi) < 0:
            hi += step
            if hi > tau_cap:
                raise DomainError("compression never returns to one "
                                  "below tau = %.6g" % tau_cap)
        lo = hi - step
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = excess(mid)
            if abs(val) <= tol:
                break
            if val < 0:
                lo = mid
            else:
                hi = mid
        else:
            raise DomainError("return-curve bisection stalled at chi = %.6g"
                              % chi)
        out[idx] = mid
    return out
