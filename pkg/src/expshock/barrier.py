"""Pointwise algebra for the steepening barrier.

The barrier e measures how far the potential gradient sits from the
steepening threshold; e > 0 everywhere is what keeps the hard-phase
evolution regular.  Its two null derivatives e_minus and e_plus, and the
null derivative xi_plus of the steepening rate, all reduce to algebra in
the local state (r, mu, zeta, eta, xi), so they live here as free
functions shared by the field diagnostics and the front march.
"""

from math import pi


def xi_plus_of_state(r, mu, zeta, eta, xi):
    """Outgoing null derivative of the steepening rate, divided by kappa."""
    g = 4.0 * pi * r * r
    return (-(xi / r) * (1.0 + mu - 2.0 * g)
            + 2.0 * eta / r ** 2
            - (zeta / r ** 2) * ((1.0 - mu) + (1.0 + g)
                                 - g * zeta ** 2 * (1.0 - g)))


def barrier_of_state(r, mu, zeta, xi):
    g = 4.0 * pi * r * r
    return (0.5 * xi / zeta ** 2
            + (0.5 / r) * (1.0 / zeta - (1.0 - mu - g) * zeta))


def barrier_minus_of_state(r, mu, zeta, xi, xi_minus):
    """Ingoing null derivative of the barrier, divided by nu."""
    g = 4.0 * pi * r * r
    return (0.5 * xi_minus / zeta ** 2
            - xi ** 2 / zeta ** 3
            - (0.5 * xi / r) * (1.0 / zeta ** 2 + 1.0 - mu - g)
            + (0.5 / r ** 2) * (1.0 / zeta
                                + (2.0 * mu - 1.0 - 2.0 * g) * zeta
                                - g * (1.0 - mu) * zeta ** 3))


def barrier_plus_of_state(r, mu, zeta, eta, xi, xi_plus=None):
    """Outgoing null derivative of the barrier, divided by kappa."""
    if xi_plus is None:
        xi_plus = xi_plus_of_state(r, mu, zeta, eta, xi)
    g = 4.0 * pi * r * r
    drift = eta - (1.0 - g) * zeta
    return (0.5 * xi_plus / zeta ** 2
            - (drift / r) * (xi / zeta ** 3
                             + (0.5 / r) * (1.0 / zeta ** 2 + 1.0 - mu - g))
            - (0.5 * (1.0 - mu) / r ** 2) * (1.0 / zeta - (1.0 - mu - g) * zeta)
            + (0.5 * zeta / r ** 2) * ((1.0 - mu) * (g - mu)
                                       + g * eta ** 2
                                       + 2.0 * g * (1.0 - mu)))
