"""Hard-phase data along the incoming characteristic ray.

The hard fluid ahead of the forming shock is described by the radius as a
function of the potential along the ray, R(t).  We represent R by its
3-jet at the endpoint plus an exponentially damped third derivative,

    R'''(t) = d0 * exp(-t / tail),

which has closed-form antiderivatives, so R, R', R'' are exact.  Every
other quantity on the ray (slope inverse, steepening rate, mass, barrier)
follows from R by algebra or by one cached quadrature.
"""

from math import exp, pi

import numpy as np

from .errors import CollapseError, DomainError, HardPhaseDegeneracyError
from .stencils import apply_line


class CharacteristicData(object):
    """Radius profile R(t) on the ray and everything derived from it.

    t is the potential measured from the endpoint, increasing into the
    region the shock will sweep.  The profile stays valid as long as R
    shrinks monotonically and stays positive and untrapped; evaluations
    past that point raise DomainError.
    """

    def __init__(self, r0, rdot0, rddot0, rdddot0, m0,
                 tail=0.25, t_max=0.5, dt=2.0 ** -13):
        self.r0 = float(r0)
        self.rdot0 = float(rdot0)
        self.rddot0 = float(rddot0)
        self.rdddot0 = float(rdddot0)
        self.m0 = float(m0)
        self.tail = float(tail)
        self.t_max = float(t_max)
        self.dt = float(dt)
        if self.rdot0 >= 0:
            raise HardPhaseDegeneracyError("radius must decrease along the ray")
        self._build_mass_cache()

    # -- closed forms --------------------------------------------------

    def radius(self, t):
        td, d0 = self.tail, self.rdddot0
        g = exp(-t / td)
        return (self.r0 + self.rdot0 * t + 0.5 * self.rddot0 * t * t
                + d0 * td * (0.5 * t * t - td * t + td * td * (1.0 - g)))

    def slope(self, t):
        td, d0 = self.tail, self.rdddot0
        g = exp(-t / td)
        return (self.rdot0 + self.rddot0 * t
                + d0 * td * (t - td * (1.0 - g)))

    def curvature(self, t):
        td, d0 = self.tail, self.rdddot0
        return self.rddot0 + d0 * td * (1.0 - exp(-t / td))

    def third(self, t):
        return self.rdddot0 * exp(-t / self.tail)

    def z(self, t):
        return -1.0 / self.slope(t)

    def xi(self, t):
        rd = self.slope(t)
        return -self.curvature(t) / rd ** 3

    def xi_minus(self, t):
        rd = self.slope(t)
        rdd = self.curvature(t)
        return self.third(t) / rd ** 4 - 3.0 * rdd ** 2 / rd ** 5

    def alpha(self, t):
        return self.radius(t) * self.z(t) - t

    # -- mass ----------------------------------------------------------

    def _mass_rate(self, t, m):
        r = self.radius(t)
        rd = self.slope(t)
        mu = 2.0 * m / r
        return 2.0 * pi * r * r * rd * ((1.0 - mu) / rd ** 2 + 1.0)

    def _build_mass_cache(self):
        n = int(round(self.t_max / self.dt))
        ts = np.empty(n + 1)
        ms = np.empty(n + 1)
        ts[0], ms[0] = 0.0, self.m0
        h = self.dt
        m = self.m0
        stop = n
        for idx in range(n):
            t = idx * h
            k1 = self._mass_rate(t, m)
            k2 = self._mass_rate(t + 0.5 * h, m + 0.5 * h * k1)
            k3 = self._mass_rate(t + 0.5 * h, m + 0.5 * h * k2)
            k4 = self._mass_rate(t + h, m + h * k3)
            m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t_next = (idx + 1) * h
            r = self.radius(t_next)
            if r <= 0:
                stop = idx
                break
            if self.slope(t_next) >= 0 or 2.0 * m / r >= 1.0:
                stop = idx
                break
            ts[idx + 1] = t_next
            ms[idx + 1] = m
        if stop < 4:
            raise CollapseError("ray data degenerates within four mass steps")
        self._mass_t = ts[:stop + 1]
        self._mass_m = ms[:stop + 1]
        self.t_valid = float(self._mass_t[-1])

    def mass(self, t):
        if t < -1e-12 or t > self.t_valid + 1e-12:
            raise DomainError("t = %.6g outside ray validity [0, %.6g]"
                              % (t, self.t_valid))
        t = min(max(t, 0.0), self.t_valid)
        return apply_line(self._mass_m, self._mass_t, t, 0, 4)

    def mu(self, t):
        return 2.0 * self.mass(t) / self.radius(t)

    # -- barrier -------------------------------------------------------

    def barrier(self, t):
        r = self.radius(t)
        rd = self.slope(t)
        mu = self.mu(t)
        g = 4.0 * pi * r * r
        # xi/(2 z^2) collapses to -R''/(2 R'); the rest uses 1/z = -R'.
        return (-self.curvature(t) / (2.0 * rd)
                + (0.5 / r) * (-rd + (1.0 - mu - g) / rd))

    def barrier_minus(self, t):
        r = self.radius(t)
        rd = self.slope(t)
        rdd = self.curvature(t)
        rddd = self.third(t)
        m = self.mass(t)
        mu = 2.0 * m / r
        g = 4.0 * pi * r * r
        mdot = 2.0 * pi * r * r * rd * ((1.0 - mu) / rd ** 2 + 1.0)
        mudot = 2.0 * mdot / r - 2.0 * m * rd / r ** 2
        da = -rddd / (2.0 * rd) + rdd ** 2 / (2.0 * rd ** 2)
        db = (-(rd / (2.0 * r ** 2)) * (-rd + (1.0 - mu - g) / rd)
              + (0.5 / r) * (-rdd + ((-mudot - 8.0 * pi * r * rd) * rd
                                     - (1.0 - mu - g) * rdd) / rd ** 2))
        return -(da + db) / rd

    # -- regularized family --------------------------------------------

    def shifted(self, dr, dslope, dcurv, m0=None):
        """Member of the regularized family: endpoint radius moved by dr,
        initial slope steepened by dslope, initial curvature by dcurv,
        same damped tail."""
        return CharacteristicData(
            self.r0 + dr, self.rdot0 + dslope, self.rddot0 + dcurv,
            self.rdddot0, self.m0 if m0 is None else m0,
            tail=self.tail, t_max=self.t_max, dt=self.dt)
