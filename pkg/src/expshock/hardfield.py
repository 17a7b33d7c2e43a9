"""Hard-phase field container and consistency diagnostics.

A HardField wraps the eleven per-node variables of the characteristic
march on a quadrant grid and exposes them as interpolatable scalar
fields.  The consistency report recomputes, by finite differences, the
four second-order relations the kernel never integrates directly (the
three Hessian components of r and the wave relation for phi), the two
mass rates, and the exact gradient identity for sigma^2; all of them
should shrink at second order under grid refinement.
"""

from math import pi

import numpy as np

from .barrier import barrier_of_state
from .errors import StencilError
from .grids import ScalarField, finite_difference

VAR_NAMES = ("r", "phi", "m", "nu", "kappa", "zeta", "eta", "xi",
             "N", "K", "Mint")


class HardField(object):

    def __init__(self, grid, values, scenario=None, fourpi=4.0 * pi):
        self.grid = grid
        self.values = values
        self.scenario = scenario
        self.fourpi = fourpi
        for k, nm in enumerate(VAR_NAMES):
            setattr(self, nm, ScalarField(grid, values[..., k], nm))
        self.iters_max = 0
        self.resid_r_sup = 0.0
        self.resid_m_sup = 0.0

    def derived(self, name):
        """Pointwise algebraic combinations: mu, sigma_sq, omega_sq,
        barrier, phi_u, phi_v, r_u, r_v."""
        v = self.values
        r, m = v[..., 0], v[..., 2]
        nu, kappa = v[..., 3], v[..., 4]
        zeta, eta, xi = v[..., 5], v[..., 6], v[..., 7]
        mu = 2.0 * m / r
        if name == "mu":
            arr = mu
        elif name == "sigma_sq":
            arr = zeta * eta
        elif name == "omega_sq":
            arr = 4.0 * nu * kappa
        elif name == "barrier":
            arr = barrier_of_state(r, mu, zeta, xi)
        elif name == "phi_u":
            arr = nu * zeta
        elif name == "phi_v":
            arr = kappa * eta
        elif name == "r_u":
            arr = -nu
        elif name == "r_v":
            arr = (1.0 - mu) * kappa
        else:
            raise KeyError(name)
        return ScalarField(self.grid, arr, name)


def consistency_report(field, stride=1):
    """Sup of the finite-difference residuals of the relations the march
    does not enforce directly.  Keys: hess_uu, hess_vv, hess_uv, wave,
    mass_u, mass_v, grad_sigma (exact identity), grad_sigma_leading
    (the small-sigma^2-1 approximation, meaningful near the endpoint),
    plus the per-cell cross-route sups recorded by the driver."""
    g = field.grid
    fourpi = field.fourpi
    v = field.values
    omega = field.derived("omega_sq")
    sigma = field.derived("sigma_sq")
    barrier = field.derived("barrier")
    sups = {k: 0.0 for k in ("hess_uu", "hess_vv", "hess_uv", "wave",
                             "mass_u", "mass_v", "grad_sigma",
                             "grad_sigma_leading")}

    def fd(f, pt, order):
        try:
            return finite_difference(f, pt, order)
        except StencilError:
            return None

    for i in range(0, g.n_u, stride):
        for j in range(0, g.n_v, stride):
            pt = (g.u(i), g.v(j))
            r, phi, m = v[i, j, 0], v[i, j, 1], v[i, j, 2]
            nu, kappa = v[i, j, 3], v[i, j, 4]
            zeta, eta, xi = v[i, j, 5], v[i, j, 6], v[i, j, 7]
            mu = 2.0 * m / r
            gg = fourpi * r * r
            om = omega.values[i, j]
            e = barrier.values[i, j]
            r_uu = fd(field.r, pt, (2, 0))
            r_vv = fd(field.r, pt, (0, 2))
            r_uv = fd(field.r, pt, (1, 1))
            phi_uv = fd(field.phi, pt, (1, 1))
            om_u = fd(omega, pt, (1, 0))
            om_v = fd(omega, pt, (0, 1))
            m_u = fd(field.m, pt, (1, 0))
            m_v = fd(field.m, pt, (0, 1))
            sig_u = fd(sigma, pt, (1, 0))
            res = {}
            if r_uu is not None and om_u is not None:
                res["hess_uu"] = (r_uu + nu * om_u / om
                                  + (gg / r) * (nu * zeta) ** 2)
            if r_vv is not None and om_v is not None:
                res["hess_vv"] = (r_vv - (1.0 - mu) * kappa * om_v / om
                                  + (gg / r) * (kappa * eta) ** 2)
            if r_uv is not None:
                res["hess_uv"] = r_uv + (nu * kappa / r) * (mu - gg)
            if phi_uv is not None:
                res["wave"] = (phi_uv
                               + (nu * kappa / r) * ((1.0 - mu) * zeta - eta))
            if m_u is not None:
                res["mass_u"] = (m_u + 0.5 * gg * nu
                                 * ((1.0 - mu) * zeta ** 2 + 1.0))
            if m_v is not None:
                res["mass_v"] = (m_v - 0.5 * gg * kappa
                                 * ((1.0 - mu) + eta ** 2))
            if sig_u is not None:
                res["grad_sigma"] = (sig_u - 2.0 * nu * zeta * e
                                     - nu * (sigma.values[i, j] - 1.0)
                                     * (xi / zeta + (1.0 + gg * zeta ** 2) / r))
                res["grad_sigma_leading"] = sig_u - 2.0 * nu * zeta * e
            for key, val in res.items():
                if abs(val) > sups[key]:
                    sups[key] = abs(val)
    sups["cell_resid_r"] = field.resid_r_sup
    sups["cell_resid_m"] = field.resid_m_sup
    sups["iters_max"] = field.iters_max
    return sups
