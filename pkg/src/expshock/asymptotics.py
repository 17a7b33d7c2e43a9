"""Corner coefficients of a formation run: closed forms and fits.

Each scenario pins down a short list of polynomial coefficients that a
marched front has to reproduce near its corner.  closed_form_suite
evaluates the list from the endpoint invariants alone, fit_series pulls
the same numbers out of sampled curves, corner_report probes the soft
side for the critical-point structure, and validate_run packages the
whole comparison for a finished run.
"""
from math import pi

import numpy as np

from .errors import ConditioningError, SignatureError
from .softphase import flowline_state

FOURPI = 4.0 * pi

# relative tolerances by coefficient degree: extraction difficulty grows
# with degree at fixed grid cost
DEFAULT_TOLERANCES = {"slope": 0.02, "quad": 0.10, "quintic": 0.20,
                      "rate": 0.05}


class CoefficientTable(object):
    """Closed-form corner coefficients of one scenario.

    Everything is a direct substitution of the five endpoint invariants;
    the construction never touches a marched solution, so the table
    doubles as the independent oracle for the fits.
    """

    def __init__(self, r0, a_minus0, a_plus0, curvature, sigma_decay):
        self.r0 = float(r0)
        self.a_minus0 = float(a_minus0)
        self.a_plus0 = float(a_plus0)
        self.curvature = float(curvature)
        self.sigma_decay = float(sigma_decay)

        r0, am, ap = self.r0, self.a_minus0, self.a_plus0
        self.mu0 = 1.0 - am * ap
        self.rdot0 = 0.5 * (ap - am)
        self.g0 = FOURPI * r0 * r0
        i = self.curvature * self.sigma_decay
        i0 = (0.375 * (ap - am) ** 2 + pi * r0 * r0) / (r0 * r0)
        self.rate_product = i
        self.intrinsic_rate = i0
        self.shock_parameter = 2.0 * i / i0 - 1.0
        l = self.shock_parameter
        self.beta0 = (5.0 + l) / (5.0 * l + 1.0)

        # corner Hessian of the compression factor in comoving
        # coordinates, and the combination that must vanish identically
        self.hessian = (4.0 * i0, 2.0 * i0 - 2.0 * i, i0 - 2.0 * i)
        tt, tc, cc = self.hessian
        self.hessian_identity = 0.25 * tt - tc + cc
        # the corner quadratic of 1 - rho factors through two lines
        # tau = s * chi; these are the two slopes
        self.drop_roots = (-0.5, 0.5 * l)

        # quadratic jets of the front energy excess and compression
        # drop, as (tau^2, tau chi, chi^2) coefficient triples
        self.excess_jet = (i + 2.0 * i0, 2.0 * i0 - i, 0.25 * (2.0 * i0 - 3.0 * i))
        self.drop_jet = (-0.5 * tt, -tc, -0.5 * cc)

        den = 5.0 * i - 2.0 * i0
        self.chi_slope = (2.0 * i + 4.0 * i0) / den
        self.xstar_slope = (2.0 / 3.0) * (1.0 - i0 / i)
        self.rho_quad = -24.0 * i * i * (i - i0) / den ** 2
        self.rho_minus_quad = -8.0 * (i - i0)
        self.gamma_quad = -6.0 * i * i * (i + 2.0 * i0) / den ** 2
        self.phi_quintic = (-12.0 * i ** 3 * (i - i0) * (i + 2.0 * i0) ** 2
                            / (5.0 * den ** 4))
        self.rbottom_slope = -am * 2.0 * (i - i0) / den
        self.rddot0 = (2.0 / r0) * (am * self.rdot0 - 2.0 * pi * r0 * r0)

        # transported-integral jets along the front (coefficients of the
        # gauge shift N*, the lag integral M*, and the retardation delta)
        pref = (self.mu0 - self.g0) / (2.0 * am * r0)
        self.nstar_slope_pair = (pref, 0.5 * pref)
        self.mstar_pref = (self.mu0 - self.g0) / (8.0 * am * r0)
        mu0, g0 = self.mu0, self.g0
        a2 = am * am
        self.nstar_A = (1.0 / (2.0 * a2 * r0 * r0)) * (
            -mu0 + 0.5 * mu0 * mu0 - g0 + g0 * mu0 + 0.5 * g0 * g0
            + (2.0 * mu0 + 0.5 * g0) * a2)
        self.nstar_B = (1.0 / (8.0 * a2 * r0 * r0)) * (
            -mu0 * (2.0 - 1.5 * mu0) + g0 - 0.5 * g0 * g0
            - 0.5 * g0 * a2 + mu0 * a2)
        self.nstar_C = (1.0 / (8.0 * a2 * r0 * r0)) * (
            -4.0 * mu0 + 3.5 * mu0 * mu0 + 4.0 * g0 - 2.0 * g0 * mu0
            - 1.5 * g0 * g0 + 2.0 * r0 * (mu0 - g0) * self.curvature * am
            + (mu0 - 2.5 * g0) * a2)
        dd = am * (ap - am)
        self.dlag_jet = (
            -(1.0 / (2.0 * r0 * am)) * 2.0 * pi * r0 * r0,
            -(1.0 / (2.0 * r0 * am)) * (dd - 2.0 * pi * r0 * r0),
            -(1.0 / (2.0 * r0 * am)) * 0.25 * (dd + 2.0 * pi * r0 * r0
                                               - 2.0 * am * r0 * self.curvature))

    def mstar_quadratic(self, tau, chi):
        """Leading form of the lag integral along the front."""
        return self.mstar_pref * (3.0 * tau * tau + tau * chi
                                  - 0.25 * chi * chi)

    def nstar_leading(self, tau, chi):
        """First-order form of the gauge shift along the front."""
        c1, c2 = self.nstar_slope_pair
        return c1 * tau + 2.0 * c2 * 0.5 * chi

    def nstar_quadratic(self, tau, chi):
        """Second-order correction to the gauge shift."""
        return (0.5 * self.nstar_A * tau * tau + self.nstar_B * tau * chi
                + 0.5 * self.nstar_C * chi * chi)

    def dlag_quadratic(self, tau, chi):
        """Leading form of the retardation of the front."""
        a, b, c = self.dlag_jet
        return a * tau * tau + b * tau * chi + c * chi * chi

    def identity_residuals(self):
        """The exact internal identities of the table; all must vanish
        to round-off for any valid invariant set."""
        i, i0, l = self.rate_product, self.intrinsic_rate, self.shock_parameter
        et, xt = self.excess_jet, self.drop_jet
        s = self.chi_slope
        energy_rate = sum((e + x) * s ** p
                          for p, (e, x) in enumerate(zip(et, xt)))
        t_rate = (1.0 + 0.5 * s) ** 2
        return {
            "hessian": self.hessian_identity,
            "slope_closure": self.chi_slope * (5.0 * i - 2.0 * i0)
            - (2.0 * i + 4.0 * i0),
            "speed_closure": self.beta0 * (5.0 * l + 1.0) - (5.0 + l),
            "slope_is_twice_speed": self.chi_slope - 2.0 * self.beta0,
            "energy_rate": energy_rate / t_rate - i,
        }

    def as_dict(self):
        out = {
            "rate_product": self.rate_product,
            "intrinsic_rate": self.intrinsic_rate,
            "shock_parameter": self.shock_parameter,
            "beta0": self.beta0,
            "hessian_tautau": self.hessian[0],
            "hessian_tauchi": self.hessian[1],
            "hessian_chichi": self.hessian[2],
            "drop_root_low": self.drop_roots[0],
            "drop_root_high": self.drop_roots[1],
            "chi_slope": self.chi_slope,
            "xstar_slope": self.xstar_slope,
            "rho_quad": self.rho_quad,
            "rho_minus_quad": self.rho_minus_quad,
            "gamma_quad": self.gamma_quad,
            "phi_quintic": self.phi_quintic,
            "rbottom_slope": self.rbottom_slope,
            "rddot0": self.rddot0,
        }
        for k, v in zip(("tau2", "tauchi", "chi2"), self.excess_jet):
            out["excess_" + k] = v
        for k, v in zip(("tau2", "tauchi", "chi2"), self.drop_jet):
            out["drop_" + k] = v
        return out


def closed_form_suite(inv):
    """Evaluate the full coefficient table of one invariant set."""
    return CoefficientTable(inv.r0, inv.a_minus0, inv.a_plus0,
                            inv.curvature, inv.sigma_decay)


class FitResult(object):
    """Polynomial coefficients extracted from samples.

    estimates holds the window-extrapolated coefficient per degree;
    errors combines the statistical error of the finest window with the
    spread across windows, so shrinking the base window by two moves the
    estimate by less than the reported error.
    """

    def __init__(self, degrees, estimates, errors, orders, window, levels):
        self.degrees = tuple(degrees)
        self.estimates = dict(estimates)
        self.errors = dict(errors)
        self.orders = dict(orders)
        self.window = float(window)
        self.levels = int(levels)

    def estimate(self, degree):
        return self.estimates[degree]

    def error(self, degree):
        return self.errors[degree]

    def order(self, degree):
        return self.orders[degree]


def _wls_poly(xs, ys, degrees, weights, scale):
    cols = [weights * (xs / scale) ** d for d in degrees]
    design = np.stack(cols, axis=1)
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > 1e10:
        raise ConditioningError(
            "design matrix condition %.3g for degrees %s; widen the "
            "window above %.3g or drop a degree" % (cond, degrees, scale))
    coef, res, rank, sv = np.linalg.lstsq(design, weights * ys, rcond=None)
    if rank < len(degrees):
        raise ConditioningError(
            "rank-deficient fit for degrees %s at window %.3g" %
            (degrees, scale))
    fitted = design @ coef
    dof = max(len(xs) - len(degrees), 1)
    s2 = float(np.sum((weights * ys - fitted) ** 2)) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    out = {}
    err = {}
    for k, d in enumerate(degrees):
        out[d] = coef[k] / scale ** d
        err[d] = np.sqrt(max(cov[k, k], 0.0)) / scale ** d
    return out, err


def fit_series(xs, ys, degrees, base_window=None, shrink=2.0, levels=3,
               weights=None):
    """Weighted least squares over nested shrinking windows.

    Fits the monomials x^d for d in degrees on windows [0, w], w
    halving per level, then extrapolates each coefficient to window
    size zero from the cross-window trend.  Raises ConditioningError
    when a window holds fewer than three samples per coefficient or the
    design matrix degenerates.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if weights is None:
        weights = np.ones_like(xs)
    else:
        weights = np.asarray(weights, dtype=float)
    if base_window is None:
        base_window = float(np.max(xs))
    need = 3 * len(degrees)
    per_level = []
    for lev in range(levels):
        w = base_window / shrink ** lev
        mask = xs <= w * (1.0 + 1e-12)
        if int(np.sum(mask)) < need:
            order = np.sort(xs)
            hint = order[min(need, len(order)) - 1] if len(order) >= need \
                else float("nan")
            raise ConditioningError(
                "window %.6g holds %d samples, need %d for degrees %s; "
                "smallest adequate window is %.6g"
                % (w, int(np.sum(mask)), need, tuple(degrees), hint))
        per_level.append(_wls_poly(xs[mask], ys[mask], degrees,
                                   weights[mask], w))
    estimates, errors, orders = {}, {}, {}
    for d in degrees:
        seq = [lev[0][d] for lev in per_level]
        se = per_level[-1][1][d]
        fine = seq[-1]
        est, order = fine, 0.0
        if len(seq) >= 3:
            d01, d12 = seq[-3] - seq[-2], seq[-2] - seq[-1]
            if abs(d12) > 1e-300 and d01 * d12 > 0 and abs(d01) > abs(d12):
                ratio = d01 / d12
                est = fine - d12 / (ratio - 1.0)
                order = float(np.log(ratio) / np.log(shrink))
        spread = max(abs(seq[-1] - seq[-2]), abs(est - fine))
        estimates[d] = est
        errors[d] = max(se, spread)
        orders[d] = order
    return FitResult(degrees, estimates, errors, orders, base_window, levels)


def _poly2d_fit(taus, chis, vals, include_linear=True):
    """Least-squares jet of a corner-anchored surface: constant, the
    optional linear pair, the quadratic triple, and a cubic guard."""
    t = np.asarray(taus, dtype=float)
    c = np.asarray(chis, dtype=float)
    v = np.asarray(vals, dtype=float)
    scale = max(float(np.max(t)), float(np.max(c)))
    ts, cs = t / scale, c / scale
    cols = [np.ones_like(ts)]
    names = ["const"]
    if include_linear:
        cols += [ts, cs]
        names += ["t", "c"]
    cols += [ts ** 2, ts * cs, cs ** 2,
             ts ** 3, ts ** 2 * cs, ts * cs ** 2, cs ** 3]
    names += ["t2", "tc", "c2", "t3", "t2c", "tc2", "c3"]
    design = np.stack(cols, axis=1)
    coef, _, rank, _ = np.linalg.lstsq(design, v, rcond=None)
    if rank < len(cols):
        raise ConditioningError("corner jet fit is rank deficient")
    out = {}
    for name, ck in zip(names, coef):
        power = {"const": 0, "t": 1, "c": 1, "t2": 2, "tc": 2, "c2": 2,
                 "t3": 3, "t2c": 3, "tc2": 3, "c3": 3}[name]
        out[name] = ck / scale ** power
    return out


def corner_report(scenario, h=2.0 ** -8, h_nom=2.0 ** -10, mid_chi=None):
    """Critical-point structure of the compression factor at the corner.

    Probes the soft field on two nested one-sided stencils of pitch h
    and h/2, fits the corner jet on each, and extrapolates the gradient
    assuming second-order stencil bias.  The Hessian triple comes from
    the finer stencil.  Also reports the comoving-time slope of rho at
    the middle of the pre-formation interface for scale contrast.
    """
    interface = scenario.interface

    def jet(pitch):
        taus, chis, vals = [], [], []
        for a in range(5):
            for b in range(5):
                if a == 0 and b == 0:
                    continue
                tau, chi = a * pitch, b * pitch
                st = flowline_state(interface, chi, tau, h_nom=h_nom)
                taus.append(tau)
                chis.append(chi)
                vals.append(st["rho"] - 1.0)
        return _poly2d_fit(taus, chis, vals)

    coarse = jet(h)
    fine = jet(0.5 * h)
    grad_tau = (4.0 * fine["t"] - coarse["t"]) / 3.0
    grad_chi = (4.0 * fine["c"] - coarse["c"]) / 3.0
    hess = (2.0 * fine["t2"], fine["tc"], 2.0 * fine["c2"])
    combo = 0.25 * hess[0] - hess[1] + hess[2]

    if mid_chi is None:
        mid_chi = 8.0 * h
    sm = flowline_state(interface, mid_chi, -h, h_nom=h_nom)
    sp = flowline_state(interface, mid_chi, h, h_nom=h_nom)
    mid_slope = 0.5 * (sp["rho"] - sm["rho"]) / h

    table = closed_form_suite(scenario.invariants)
    dev = max(abs(hess[k] - table.hessian[k]) / abs(table.hessian[k])
              for k in range(3))
    return {
        "grad_tau": grad_tau,
        "grad_chi": grad_chi,
        "hessian": hess,
        "hessian_closed": table.hessian,
        "hessian_rel_dev": dev,
        "identity_combo": combo,
        "identity_rel": abs(combo) / abs(hess[0]),
        "mid_slope_tau": mid_slope,
        "stencil": h,
    }


def null_ray_drop(scenario, taus, h_nom=2.0 ** -10, n_steps=48):
    """Compression samples along the outgoing null ray from the corner.

    The ray obeys dchi/dtau = e^{-omega}; it is traced with a fourth
    order stepper (midpoint start, the corner itself is degenerate for
    the probe) until it leaves the comoving chart, and rho - 1 is
    returned at the requested times the trace reached.  Returns the
    pair (times used, drops).
    """
    interface = scenario.interface
    tau_end = float(np.max(taus))
    hh = tau_end / n_steps

    def slope(chi, tau):
        return 1.0 / flowline_state(interface, chi, tau, h_nom=h_nom)["eomega"]

    path_t, path_c = [0.0], [0.0]
    chi, tau = 0.0, 0.0
    for k in range(n_steps):
        try:
            if k == 0:
                step = hh * slope(0.5 * hh * 2.0, 0.5 * hh)
            else:
                k1 = slope(chi, tau)
                k2 = slope(chi + 0.5 * hh * k1, tau + 0.5 * hh)
                k3 = slope(chi + 0.5 * hh * k2, tau + 0.5 * hh)
                k4 = slope(chi + hh * k3, tau + hh)
                step = (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except SignatureError:
            break
        chi += step
        tau += hh
        path_t.append(tau)
        path_c.append(chi)
    path_t = np.asarray(path_t)
    path_c = np.asarray(path_c)
    used, out = [], []
    for tq in np.asarray(taus, dtype=float):
        if tq > path_t[-1]:
            break
        cq = float(np.interp(tq, path_t, path_c))
        try:
            st = flowline_state(interface, cq, tq, h_nom=h_nom)
        except SignatureError:
            break
        used.append(tq)
        out.append(st["rho"] - 1.0)
    return np.asarray(used), np.asarray(out)


def _entry(name, fitted, closed, tol, extra=None):
    dev = abs(fitted - closed) / abs(closed) if closed != 0.0 \
        else abs(fitted - closed)
    e = {"name": name, "fitted": float(fitted), "closed": float(closed),
         "deviation": float(dev), "tolerance": float(tol),
         "pass": bool(dev <= tol)}
    if extra:
        e.update(extra)
    return e


def validate_run(curve, scenario, tolerances=None, h_nom=2.0 ** -10):
    """Compare a marched front against the closed-form corner table.

    Returns a JSON-ready report: one entry per measurable coefficient
    with the fitted value, the closed form, the relative deviation, and
    a pass flag at the degree-based tolerance.  A scenario whose rate
    ratio is below the formation threshold gets a refusal report,
    because the local form only describes an expansion shock.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    table = closed_form_suite(scenario.invariants)
    if table.shock_parameter <= 1.0:
        return {"status": "not-a-shock",
                "shock_parameter": table.shock_parameter,
                "entries": [], "all_pass": False}

    tau = curve.tau
    skip = curve.seed_rows + 1
    entries = []

    def fit(xs, ys, degrees, levels=3):
        # widest shrink that still leaves three samples per coefficient
        # in the finest window
        need = 3 * len(degrees)
        order = np.sort(np.asarray(xs, dtype=float))
        w_need = order[need - 1] * 1.001
        shrink = max(1.05, min(2.0, (order[-1] / w_need)
                               ** (1.0 / (levels - 1))))
        return fit_series(xs, ys, degrees, shrink=shrink, levels=levels)

    f = fit(tau[1:], curve.chi[1:], (1, 2, 3))
    entries.append(_entry("chi_slope", f.estimate(1), table.chi_slope,
                          tol["slope"]))
    f = fit(tau, curve.rho - 1.0, (2, 3))
    entries.append(_entry("rho_quad", f.estimate(2), table.rho_quad,
                          tol["quad"]))
    f = fit(tau[skip:], curve.gamma[skip:] - 1.0, (2, 3))
    entries.append(_entry("gamma_quad", f.estimate(2), table.gamma_quad,
                          tol["quad"]))
    sub = tau[1::2]
    drops = null_ray_drop(scenario, sub, h_nom=h_nom)
    f = fit(sub, drops, (2, 3))
    entries.append(_entry("rho_minus_quad", f.estimate(2),
                          table.rho_minus_quad, tol["quad"]))
    f = fit(tau, curve.phi - tau, (5, 6))
    entries.append(_entry("phi_quintic", f.estimate(5), table.phi_quintic,
                          tol["quintic"]))
    f = fit(tau, -curve.ydrop, (1, 2, 3))
    entries.append(_entry("rbottom_slope", f.estimate(1),
                          table.rbottom_slope, tol["slope"]))
    f = fit(curve.tcoord, curve.excess + curve.drop, (2, 3))
    entries.append(_entry("energy_rate", f.estimate(2),
                          table.rate_product, tol["rate"]))
    f = fit(curve.tcoord[1:], curve.xcoord[1:], (1, 2, 3))
    entries.append(_entry("xstar_slope", f.estimate(1), table.xstar_slope,
                          tol["slope"]))

    # transported integrals: compare fitted leading coefficients against
    # the closed jets contracted with the front direction, and the raw
    # functions at mid-run
    s = table.chi_slope
    mid = len(tau) // 2
    tm, cm = tau[mid], curve.chi[mid]

    f = fit(tau, curve.mstar, (2, 3))
    closed = table.mstar_quadratic(1.0, s)
    mid_closed = table.mstar_quadratic(tm, cm)
    entries.append(_entry("mstar_quad", f.estimate(2), closed, tol["quad"],
                          extra={"mid_measured": float(curve.mstar[mid]),
                                 "mid_closed": float(mid_closed)}))
    f = fit(tau, curve.nstar, (1, 2))
    closed = table.nstar_leading(1.0, s)
    mid_closed = (table.nstar_leading(tm, cm)
                  + table.nstar_quadratic(tm, cm))
    entries.append(_entry("nstar_slope", f.estimate(1), closed,
                          tol["slope"],
                          extra={"mid_measured": float(curve.nstar[mid]),
                                 "mid_closed": float(mid_closed)}))
    closed2 = table.nstar_quadratic(1.0, s)
    entries.append(_entry("nstar_quad", f.estimate(2), closed2,
                          tol["quad"]))
    f = fit(tau, curve.dlag, (2, 3))
    closed = table.dlag_quadratic(1.0, s)
    mid_closed = table.dlag_quadratic(tm, cm)
    entries.append(_entry("dlag_quad", f.estimate(2), closed, tol["quad"],
                          extra={"mid_measured": float(curve.dlag[mid]),
                                 "mid_closed": float(mid_closed)}))

    return {"status": "ok", "shock_parameter": table.shock_parameter,
            "beta0_closed": table.beta0,
            "entries": entries,
            "all_pass": all(e["pass"] for e in entries)}
