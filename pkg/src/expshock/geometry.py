"""Corner invariants, corner jets, and the interface-curve container.

Everything in here is closed-form algebra in the handful of numbers that
characterize the solution at the interface endpoint (the null point): the
radius, the two null slopes of the radius, the curvature of the interface
in double-null coordinates, and the decay rate of the gradient-squared of
the potential off the endpoint.  The jet formulas assume the canonical
gauge (unit conformal factor on the two rays through the endpoint, unit
fluid velocity components there, potential normalized to zero).
"""

from math import pi, sqrt

import numpy as np

from .errors import (InfeasibleScenarioError, NonGenericScenarioError,
                     NonSpacelikeInterfaceError)
from .stencils import apply_line


class NullPointInvariants(object):
    """Scalar data at the interface endpoint.

    curvature is the second chi-derivative of the interface onset curve;
    sigma_decay is minus the v-derivative of the gradient-squared of the
    potential at the endpoint.  Both must be positive for a generic
    endpoint, and their product (rate_product) must exceed the intrinsic
    rate for a shock to form.
    """

    def __init__(self, r0, a_minus0, a_plus0, curvature, sigma_decay):
        self.r0 = float(r0)
        self.a_minus0 = float(a_minus0)
        self.a_plus0 = float(a_plus0)
        self.curvature = float(curvature)
        self.sigma_decay = float(sigma_decay)
        self.validate()

    def validate(self):
        if self.r0 <= 0:
            raise InfeasibleScenarioError("endpoint radius must be positive")
        if self.a_minus0 <= 0 or self.a_plus0 <= 0:
            raise InfeasibleScenarioError("null slopes a-+ must be positive")
        if self.mu0 >= 1:
            raise InfeasibleScenarioError("2m/r >= 1 at the endpoint")
        if self.curvature <= 0:
            raise NonGenericScenarioError("interface curvature must be positive")
        if self.sigma_decay <= 0:
            raise NonGenericScenarioError("gradient decay rate must be positive")
        if self.shock_parameter <= 1:
            raise NonGenericScenarioError(
                "rate product %.6g does not exceed intrinsic rate %.6g; "
                "no expansion shock forms" % (self.rate_product, self.intrinsic_rate))

    @property
    def mu0(self):
        return 1.0 - self.a_minus0 * self.a_plus0

    @property
    def m0(self):
        return 0.5 * self.r0 * self.mu0

    @property
    def rdot0(self):
        return 0.5 * (self.a_plus0 - self.a_minus0)

    @property
    def rate_product(self):
        return self.sigma_decay * self.curvature

    @property
    def intrinsic_rate(self):
        return (0.375 * (self.a_plus0 - self.a_minus0) ** 2
                + pi * self.r0 ** 2) / self.r0 ** 2

    @property
    def shock_parameter(self):
        return 2.0 * self.rate_product / self.intrinsic_rate - 1.0

    @property
    def initial_velocity(self):
        l = self.shock_parameter
        return (5.0 + l) / (5.0 * l + 1.0)

    def jets(self):
        """Corner jets of the canonical-gauge solution, double-null side
        and comoving side, as a flat dict."""
        r0, am, ap = self.r0, self.a_minus0, self.a_plus0
        k, j = self.curvature, self.sigma_decay
        i = self.rate_product
        i0 = self.intrinsic_rate
        mu0, rd = self.mu0, self.rdot0
        out = {
            "phi_u": 0.5,
            "phi_v": 0.5,
            "r_u": -0.5 * am,
            "r_v": 0.5 * ap,
            "r_uu": -pi * r0,
            "r_vv": -pi * r0,
            "r_uv": (4 * pi * r0 ** 2 - mu0) / (4 * r0),
            "phi_uu": rd / (2 * r0),
            "phi_uv": -rd / (2 * r0),
            "phi_vv": -0.5 * j + (ap - am) / (4 * r0),
            "phi_uuu": 0.5 * i + (3 * ap * (ap - am) - mu0) / (8 * r0 ** 2),
            "phi_uuv": (1 - ap ** 2 - 2 * ap * am + 2 * am ** 2) / (8 * r0 ** 2),
            "r_uuu": 0.5 * pi * (am - 4 * rd),
            "r_uuv": (2 * pi * r0 ** 2 * ap - am * mu0) / (4 * r0 ** 2),
            "nu": 0.5 * am,
            "kappa": 0.5 / am,
            "zeta": 1.0 / am,
            "eta": am,
            "xi": 2 * (am * rd - 2 * pi * r0 ** 2) / (am ** 3 * r0),
            "xi_minus": (4 * i / am ** 3
                         + (12 * rd ** 2 / am ** 3
                            + (6 / am ** 2 - 40 * pi * r0 ** 2 / am ** 4) * rd
                            + (-mu0 + 4 * pi * r0 ** 2
                               + 48 * pi ** 2 * r0 ** 4 / am ** 2) / am ** 3)
                         / r0 ** 2),
            "xi_plus": (-48 * pi ** 2 * r0 ** 4
                        + 12 * pi * r0 ** 2 * (1 - ap * am)
                        + 4 * pi * r0 ** 2 * am * (4 * ap - 3 * am)
                        + am * (am - 2 * ap + ap ** 2 * am
                                - 2 * ap * am ** 2 + 2 * am ** 3)
                        ) / (am ** 3 * r0 ** 2),
            "e_u": i,
            "e_v": 2 * i0,
            "e_plus": 4 * am * i0,
            "e_minus": 2 * i / am,
            # Comoving-side jets (soft phase coordinates).
            "r_tau": rd,
            "r_chi": 0.25 * (ap + am),
            "r_tautau": -mu0 / (2 * r0),
            "r_tauchi": -(ap ** 2 - am ** 2) / (4 * r0),
            "r_chichi": ((-3 * ap ** 2 + ap * am + am ** 2 + 1) / (8 * r0)
                         - pi * r0 + 0.25 * k * (ap + am)),
            "r_tauchichi": (0.5 * i * (ap + am)
                            + k * (am ** 2 - ap ** 2) / (4 * r0)
                            + (3 * ap ** 3 - ap ** 2 * am - 2 * am ** 3
                               - ap + am) / (8 * r0 ** 2)
                            + 0.5 * pi * (ap - 3 * am)),
            "rho_tautau": 4 * i0,
            "rho_tauchi": 2 * i0 - 2 * i,
            "rho_chichi": i0 - 2 * i,
            # Interface-induced jets.
            "f_ddot": -rd / (2 * r0) - 0.5 * k,
            "omega_star_prime": -rd / r0 + k,
            "boost_rate": 4 * k,
            "rstar_chi": 0.5 * am,
            "rstar_chichi": -pi * r0 + 0.5 * ap * k,
            "rdotstar_chi": (mu0 - ap ** 2 + am ** 2) / (4 * r0),
            "rdotstar_chichi": (0.5 * (ap + am) * i
                                + k * (am ** 2 - ap ** 2 + am * ap - 1) / (4 * r0)
                                + (3 * ap ** 3 + ap ** 2 * am + 2 * ap * am ** 2
                                   - 2 * am ** 3 - 3 * ap - am) / (8 * r0 ** 2)
                                + 0.5 * pi * (3 * ap - am)),
        }
        return out


def rho_hessian_closed_form(inv):
    """Closed-form corner Hessian of the compression factor rho in
    comoving coordinates, with its two internal consistency checks."""
    i, i0 = inv.rate_product, inv.intrinsic_rate
    h_tt = 4 * i0
    h_tc = 2 * i0 - 2 * i
    h_cc = i0 - 2 * i
    identity = 0.25 * h_tt - h_tc + h_cc
    l_from_hessian = -4 * h_cc / h_tt
    return {
        "rho_tautau": h_tt,
        "rho_tauchi": h_tc,
        "rho_chichi": h_cc,
        "identity_residual": identity,
        "shock_parameter": l_from_hessian,
    }


def _interp1d(xs, ys, m=0):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)

    def call(x):
        return apply_line(ys, xs, float(x), m, 4 if m == 0 else m + 2)

    return call


class InterfaceCurve(object):
    """The phase interface as a curve v = h(u) (u <= 0) in double-null
    coordinates, with the data the soft side needs induced along it.

    All attributes ending in an underscore-free name are callables of a
    single argument; h and hprime take u, everything else takes the
    comoving label chi = -u.  Synthesized scenarios provide closed-form
    callables; extracted interfaces wrap interpolants around samples.
    """

    def __init__(self, h, hprime, f, fprime, r_star, drstar_dchi,
                 rdot_star, drdotstar_dchi, m_star, dmstar_dchi,
                 chi_max, invariants=None, samples=None):
        self.h = h
        self.hprime = hprime
        self.f = f
        self.fprime = fprime
        self.r_star = r_star
        self.drstar_dchi = drstar_dchi
        self.rdot_star = rdot_star
        self.drdotstar_dchi = drdotstar_dchi
        self.m_star = m_star
        self.dmstar_dchi = dmstar_dchi
        self.chi_max = float(chi_max)
        self.invariants = invariants
        self.samples = samples or {}

    def check_spacelike(self, n_probe=33):
        """The curve must be spacelike away from the endpoint: h' < 0 for
        u < 0 (equivalently f' and the soft metric keep their signs)."""
        for chi in np.linspace(self.chi_max / n_probe, self.chi_max, n_probe):
            if self.hprime(-chi) >= 0:
                raise NonSpacelikeInterfaceError(
                    "h'(%.6g) = %.6g >= 0" % (-chi, self.hprime(-chi)))

    def eomega_star(self, chi):
        """Soft conformal factor on the curve, from the induced data."""
        r = self.r_star(chi)
        rdot = self.rdot_star(chi)
        w2 = 1.0 - 2.0 * self.m_star(chi) / r + rdot * rdot
        return (self.drstar_dchi(chi) + self.fprime(chi) * rdot) / sqrt(w2)

    def delta(self, chi):
        """Tilt of the curve against the soft light cones; 1 at the
        endpoint (null there), strictly below 1 where spacelike."""
        return self.fprime(chi) / self.eomega_star(chi)

    def boost(self, chi, step=None):
        """Boost rate -2 d(delta)/dchi by second-order differencing;
        equals four times the curvature at the endpoint."""
        if step is None:
            step = max(self.chi_max / 256.0, 1e-5)
        if chi < step:
            d0 = self.delta(chi)
            d1 = self.delta(chi + step)
            d2 = self.delta(chi + 2.0 * step)
            return -2.0 * (-3.0 * d0 + 4.0 * d1 - d2) / (2.0 * step)
        if chi + step > self.chi_max:
            step = 0.5 * (self.chi_max - chi)
        return -(self.delta(chi + step) - self.delta(chi - step)) / step

    @classmethod
    def from_samples(cls, u_samples, h_samples, data, invariants=None):
        """Build from sampled arrays. u_samples must be increasing and end
        at the endpoint u = 0; data maps names to arrays over chi = -u
        (reversed order relative to u_samples)."""
        u_samples = np.asarray(u_samples, dtype=float)
        chi = -u_samples[::-1]
        h_samples = np.asarray(h_samples, dtype=float)
        f_vals = data["f"]

        def make(vals, m=0, on_u=False):
            if on_u:
                return _interp1d(u_samples, vals, m)
            return _interp1d(chi, vals, m)

        return cls(
            h=make(h_samples, 0, on_u=True),
            hprime=make(h_samples, 1, on_u=True),
            f=make(f_vals),
            fprime=make(f_vals, 1),
            r_star=make(data["r_star"]),
            drstar_dchi=make(data["r_star"], 1),
            rdot_star=make(data["rdot_star"]),
            drdotstar_dchi=make(data["rdot_star"], 1),
            m_star=make(data["m_star"]),
            dmstar_dchi=make(data["m_star"], 1),
            chi_max=float(chi[-1]),
            invariants=invariants,
            samples={"u": u_samples, "h": h_samples, "chi": chi, **data},
        )
