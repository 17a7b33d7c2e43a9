"""Interface extraction, gauge normalization, and glue validation.

The hard-phase march fills a null quadrant; the phase interface is the
level set where the gradient-squared of the potential passes through one,
dropping below it on the far side.  This module locates that curve and
its null endpoint, reads off the induced data a soft-phase evolution
starts from, measures the endpoint scalars directly from the fields,
rescales an arbitrary patch into the canonical gauge, and quantifies how
well a hard/soft pair of solutions actually glues along the curve.

Convention for the continuity report: the jumps of the conformal factor
and of the two v-derivatives are stated in tangent-weighted form (both
sides multiplied by the curve slope h') because the bare quotients
degenerate with h' at the null endpoint; the weighted and bare statements
agree wherever the curve is spacelike.
"""

from math import sqrt

import numpy as np

from .errors import (ConditioningError, DegenerateEndpointError, DomainError,
                     InsufficientCollarError, NoInterfaceError,
                     SignatureError, StencilError, UndefinedNormalError)
from .geometry import InterfaceCurve, NullPointInvariants
from .grids import (QuadrantGrid, finite_difference, interpolate_field)
from .hardfield import VAR_NAMES, HardField
from .stencils import apply_line

_CORNER_TOL = 1e-9


def _bisect_level(sigma, u, v_lo, v_hi, f_lo, f_hi):
    for _ in range(90):
        mid = 0.5 * (v_lo + v_hi)
        if v_hi - v_lo <= 1e-15 * max(1.0, abs(v_hi)):
            return mid
        f_mid = interpolate_field(sigma, (u, mid)) - 1.0
        if f_mid == 0.0:
            return mid
        if (f_lo > 0.0) == (f_mid > 0.0):
            v_lo, f_lo = mid, f_mid
        else:
            v_hi, f_hi = mid, f_mid
    return 0.5 * (v_lo + v_hi)


def build_interface(hard, min_lines=4, fit_points=8):
    """Extract the interface curve v = h(u) from a hard-phase field.

    Walks every u-line for the downward unit crossing of sigma^2,
    sharpens each crossing by bisection on the interpolant, and demands
    that the curve flatten out at the sampled endpoint: a least-squares
    parabola through the last samples must place its tangency point
    within two grid spacings of the end, else the endpoint is not in the
    patch and DegenerateEndpointError is raised.  NoInterfaceError means
    sigma^2 never crosses one.
    """
    grid = hard.grid
    sigma = hard.derived("sigma_sq")
    spacing = grid.spacing
    us, hs = [], []
    for i in range(grid.n_u):
        line = sigma.values[i]
        u = grid.u(i)
        if abs(line[0] - 1.0) <= _CORNER_TOL:
            us.append(u)
            hs.append(grid.v_lo)
            continue
        if line[0] < 1.0:
            continue
        j = None
        for jj in range(grid.n_v - 1):
            if (line[jj] - 1.0) * (line[jj + 1] - 1.0) <= 0.0:
                j = jj
                break
        if j is None:
            continue
        v = _bisect_level(sigma, u, grid.v(j), grid.v(j + 1),
                          line[j] - 1.0, line[j + 1] - 1.0)
        us.append(u)
        hs.append(v)
    if len(us) < min_lines:
        raise NoInterfaceError(
            "only %d u-lines cross the unit level of sigma^2" % len(us))
    us = np.asarray(us)
    hs = np.asarray(hs)

    n_fit = min(fit_points, len(us))
    uf, hf = us[-n_fit:], hs[-n_fit:]
    coef = np.polynomial.polynomial.polyfit(uf - uf[-1], hf, 2)
    if coef[2] <= 0.0:
        raise DegenerateEndpointError(
            "interface does not flatten at the sampled end "
            "(quadratic coefficient %.3g)" % coef[2])
    u_tan = -0.5 * coef[1] / coef[2]
    if abs(u_tan) > 2.0 * spacing:
        raise DegenerateEndpointError(
            "fitted tangency point sits %.3g from the sampled end "
            "(more than two spacings)" % abs(u_tan))

    mu_f = hard.derived("mu")
    f_v, r_v, rd_v, m_v = [], [], [], []
    for u, v in zip(us, hs):
        p = (u, v)
        f_v.append(-interpolate_field(hard.phi, p))
        r_v.append(interpolate_field(hard.r, p))
        m_v.append(interpolate_field(hard.m, p))
        mu = interpolate_field(mu_f, p)
        zeta = interpolate_field(hard.zeta, p)
        eta = interpolate_field(hard.eta, p)
        rd_v.append(0.5 * ((1.0 - mu) * zeta - eta) / sqrt(zeta * eta))
    data = {
        "f": np.asarray(f_v)[::-1],
        "r_star": np.asarray(r_v)[::-1],
        "rdot_star": np.asarray(rd_v)[::-1],
        "m_star": np.asarray(m_v)[::-1],
    }
    curve = InterfaceCurve.from_samples(us - us[-1], hs - hs[-1], data)
    curve.samples["endpoint"] = (us[-1], hs[-1])
    curve.check_spacelike()
    return curve


def nullpoint_invariants(interface, hard, window_spacings=(2, 16)):
    """Measure the endpoint scalars of a hard-phase field.

    Radius and null slopes come from the corner node; the gradient decay
    rate is the one-sided v-derivative of sigma^2 there; the curvature is
    the pinned-parabola coefficient of the extracted h samples, fit by
    least squares over a shrinking window and sharpened by one step of
    window-halving extrapolation.  Non-generic measurements (curvature or
    decay rate not positive, or a rate product too small for a shock)
    raise through the invariants constructor.
    """
    grid = hard.grid
    corner = (grid.u_hi, grid.v_lo)
    r0 = interpolate_field(hard.r, corner)
    nu0 = interpolate_field(hard.nu, corner)
    kap0 = interpolate_field(hard.kappa, corner)
    mu0 = 2.0 * interpolate_field(hard.m, corner) / r0
    a_minus0 = 2.0 * nu0
    a_plus0 = 2.0 * (1.0 - mu0) * kap0

    sigma = hard.derived("sigma_sq")
    decay = -finite_difference(sigma, corner, (0, 1))

    samples = interface.samples
    if samples is None:
        raise ConditioningError("curvature fit needs a sampled interface")
    chi = samples["chi"]
    h = samples["h"][::-1]

    def fit(w_lo, w_hi):
        sel = (chi >= w_lo - 1e-12) & (chi <= w_hi + 1e-12)
        if np.count_nonzero(sel) < 3:
            raise ConditioningError(
                "only %d interface samples in the curvature window; "
                "refine the grid" % np.count_nonzero(sel))
        x, y = chi[sel], h[sel]
        basis = np.column_stack([x * x, x * x * x])
        c, *_ = np.linalg.lstsq(basis, y, rcond=None)
        return 2.0 * c[0]

    d = grid.spacing
    w_lo = window_spacings[0] * d
    w_hi = min(window_spacings[1] * d, chi[-1])
    k_full = fit(w_lo, w_hi)
    k_half = fit(w_lo, max(0.5 * w_hi, w_lo + 2.0 * d))
    curvature = 2.0 * k_half - k_full
    return NullPointInvariants(r0, a_minus0, a_plus0, curvature, decay)


def continuity_report(hard, soft, interface, probe_multiples=(2, 3, 4, 5)):
    """Cross-interface jumps of the seven glued quantities.

    Probes sit at chi equal to small multiples of the grid spacing; the
    hard side is interpolated on the curve, the soft side at the entry
    point of the matching flow line.  Jumps of the conformal factor
    squared and of the two v-derivatives are tangent-weighted (multiplied
    through by the curve slope); the report says which.  Probes that the
    grids cannot support raise InsufficientCollarError.
    """
    keys = ("omega", "phi_u", "phi_v", "r_u", "r_v", "m", "rho")
    d = hard.grid.spacing
    sig_f = hard.derived("sigma_sq")
    om_f = hard.derived("omega_sq")
    pu_f = hard.derived("phi_u")
    pv_f = hard.derived("phi_v")
    rv_f = hard.derived("r_v")
    chi_soft = soft.grid.chi_lo + np.arange(soft.grid.n_chi) * soft.grid.dchi

    chis = np.array([m * d for m in probe_multiples])
    out = {k: np.empty(len(chis)) for k in keys}
    rho_limit = np.empty(len(chis))
    for n, chi in enumerate(chis):
        u = -chi
        if chi > interface.chi_max or chi > soft.grid.chi_hi + 1e-12:
            raise InsufficientCollarError(
                "probe chi = %.6g outside the shared collar" % chi)
        hv = interface.h(u)
        hp = interface.hprime(u)
        p = (u, hv)
        try:
            om_h = interpolate_field(om_f, p)
            pu_h = interpolate_field(pu_f, p)
            pv_h = interpolate_field(pv_f, p)
            rv_h = interpolate_field(rv_f, p)
            nu_h = interpolate_field(hard.nu, p)
            m_h = interpolate_field(hard.m, p)
            sig_h = interpolate_field(sig_f, p)
            tau_e = -soft.interface.f(chi)
            eom_s = interpolate_field(soft.eomega, (tau_e, chi))
            rdot_s = interpolate_field(soft.rdot, (tau_e, chi))
            r_s = interpolate_field(soft.r, (tau_e, chi))
            rho_s = interpolate_field(soft.rho, (tau_e, chi))
        except (DomainError, StencilError) as err:
            raise InsufficientCollarError(
                "probe chi = %.6g not supported: %s" % (chi, err))
        m_s = apply_line(soft.m_star, chi_soft, chi, 0, min(4, len(chi_soft)))
        w = sqrt(1.0 - 2.0 * m_s / r_s + rdot_s * rdot_s)
        fp = soft.interface.fprime(chi)
        p_char = 0.5 * (fp + eom_s)
        q_num = fp - eom_s

        out["omega"][n] = abs(hp * om_h - (fp * fp - eom_s * eom_s))
        out["phi_u"][n] = abs(pu_h - p_char)
        out["phi_v"][n] = abs(2.0 * hp * pv_h - q_num)
        out["r_u"][n] = abs(p_char * (w - rdot_s) - nu_h)
        out["r_v"][n] = abs(2.0 * hp * rv_h - q_num * (w + rdot_s))
        out["m"][n] = abs(m_h - m_s)
        out["rho"][n] = abs(0.5 * (sig_h + 1.0) - rho_s)
        rho_limit[n] = rho_s
    out["chi"] = chis
    out["rho_soft_limit"] = rho_limit
    out["weighted"] = ("omega", "phi_v", "r_v")
    out["sup"] = {k: float(np.max(out[k])) for k in keys}
    return out


def curvature_jump(hard, interface, chi, min_multiple=2.0):
    """Jump of the geodesic curvature of the flow across the interface,
    evaluated from the hard side (the soft side's congruence is geodesic,
    so the whole jump lives in the hard-side acceleration).  Degenerates
    with the transverse direction at the endpoint: probes closer than a
    couple of spacings, or where the curve fails to be spacelike, raise
    UndefinedNormalError.
    """
    d = hard.grid.spacing
    if chi < min_multiple * d:
        raise UndefinedNormalError(
            "chi = %.6g is below %.3g spacings of the endpoint"
            % (chi, min_multiple))
    u = -chi
    hp = interface.hprime(u)
    if hp >= -1e-12:
        raise UndefinedNormalError("curve not spacelike at chi = %.6g" % chi)
    p = (u, interface.h(u))
    nu = interpolate_field(hard.nu, p)
    kap = interpolate_field(hard.kappa, p)
    zeta = interpolate_field(hard.zeta, p)
    eta = interpolate_field(hard.eta, p)
    sig2 = zeta * eta
    sig = sqrt(sig2)
    sigma = hard.derived("sigma_sq")
    dlog_u = finite_difference(sigma, p, (1, 0)) / (2.0 * sig2)
    dlog_v = finite_difference(sigma, p, (0, 1)) / (2.0 * sig2)
    uu, uv = eta / (2.0 * nu * sig), zeta / (2.0 * kap * sig)
    vu, vv = -uu, uv
    v_log = vu * dlog_u + vv * dlog_v
    g_lu = uv + hp * uu
    g_lv = vv + hp * vu
    return (g_lu / g_lv) * v_log


def canonicalize(interface, hard):
    """Rescale a hard-phase patch into the canonical gauge.

    Translates the interface endpoint to the origin, makes the conformal
    factor one on the two rays through it, and normalizes the fluid
    velocity components there, then resamples every field onto a fresh
    grid of the same spacing.  The transport logs and the mass-aspect
    integral are rebuilt from the rescaled fields.  Returns the new
    curve, the new field, and the coordinate maps used.  A conformal
    factor that loses positivity along either ray raises SignatureError.
    """
    grid = hard.grid
    om = hard.derived("omega_sq")
    endpoint = (interface.samples or {}).get("endpoint")
    if endpoint is None:
        endpoint = (grid.u_hi, grid.v_lo)
    u_base, v_base = endpoint
    base = (u_base, v_base)
    om_base = interpolate_field(om, base)
    if om_base <= 0.0:
        raise SignatureError("conformal factor not positive at the endpoint")

    nu_b = interpolate_field(hard.nu, base)
    kap_b = interpolate_field(hard.kappa, base)
    zeta_b = interpolate_field(hard.zeta, base)
    eta_b = interpolate_field(hard.eta, base)
    sig_b = sqrt(zeta_b * eta_b)
    a_star = 2.0 * nu_b * sig_b / eta_b
    b_star = 2.0 * kap_b * sig_b / zeta_b

    us = grid.u_lo + np.arange(grid.n_u) * grid.spacing
    vs = grid.v_lo + np.arange(grid.n_v) * grid.spacing
    a_samp = np.empty(grid.n_u)
    for i, u in enumerate(us):
        val = interpolate_field(om, (u, v_base))
        if val <= 0.0:
            raise SignatureError(
                "conformal factor loses sign on the base u-ray")
        a_samp[i] = val / b_star
    b_samp = np.empty(grid.n_v)
    for j, v in enumerate(vs):
        val = interpolate_field(om, (u_base, v))
        if val <= 0.0:
            raise SignatureError(
                "conformal factor loses sign on the base v-ray")
        b_samp[j] = val / a_star

    def cum(xs, ys, x0):
        out = np.concatenate([[0.0], np.cumsum(
            0.5 * (ys[1:] + ys[:-1]) * np.diff(xs))])
        return out - np.interp(x0, xs, out)

    ut = cum(us, a_samp, u_base)
    vt = cum(vs, b_samp, v_base)

    d = grid.spacing
    n_un = int(np.floor(-ut[0] / d + 1e-9))
    n_vn = int(np.floor(vt[-1] / d + 1e-9))
    if n_un < 2 or n_vn < 2:
        raise DomainError("canonical image of the patch is too small")
    new_grid = QuadrantGrid(d, -n_un * d, 0.0, 0.0, n_vn * d)

    def back(ts, t):
        # invert the monotone node map by local interpolation
        return apply_line(np.array(ts[0]), np.array(ts[1]), t, 0, 4)

    phi_base = interpolate_field(hard.phi, base)
    vals = np.empty((new_grid.n_u, new_grid.n_v, len(VAR_NAMES)))
    iv = {nm: k for k, nm in enumerate(VAR_NAMES)}
    u_of = [us, ut]
    v_of = [vs, vt]
    for i in range(new_grid.n_u):
        u = back(u_of, new_grid.u(i))
        au = np.interp(u, us, a_samp)
        for j in range(new_grid.n_v):
            v = back(v_of, new_grid.v(j))
            bv = np.interp(v, vs, b_samp)
            p = (u, v)
            vals[i, j, iv["r"]] = interpolate_field(hard.r, p)
            vals[i, j, iv["phi"]] = interpolate_field(hard.phi, p) - phi_base
            vals[i, j, iv["m"]] = interpolate_field(hard.m, p)
            vals[i, j, iv["nu"]] = interpolate_field(hard.nu, p) / au
            vals[i, j, iv["kappa"]] = interpolate_field(hard.kappa, p) / bv
            vals[i, j, iv["zeta"]] = interpolate_field(hard.zeta, p)
            vals[i, j, iv["eta"]] = interpolate_field(hard.eta, p)
            vals[i, j, iv["xi"]] = interpolate_field(hard.xi, p)
    vals[:, :, iv["N"]] = np.log(vals[:, :, iv["nu"]]
                                 / vals[:, :, iv["nu"]][:, :1])
    vals[:, :, iv["K"]] = np.log(vals[-1:, :, iv["kappa"]]
                                 / vals[:, :, iv["kappa"]])
    fourpi = hard.fourpi
    r_a = vals[:, :, iv["r"]]
    mu_a = 2.0 * vals[:, :, iv["m"]] / r_a
    g_a = fourpi * r_a * r_a
    rate = (vals[:, :, iv["phi"]] * (mu_a - g_a)
            * vals[:, :, iv["kappa"]] / r_a * np.exp(vals[:, :, iv["N"]]))
    mint = np.zeros_like(rate)
    mint[:, 1:] = np.cumsum(0.5 * (rate[:, 1:] + rate[:, :-1]) * d, axis=1)
    vals[:, :, iv["Mint"]] = mint

    new_hard = HardField(new_grid, vals, scenario=hard.scenario,
                         fourpi=fourpi)
    new_curve = build_interface(new_hard)
    maps = {"u": us, "utilde": ut, "v": vs, "vtilde": vt,
            "base": base, "a": a_samp, "b": b_samp,
            "boost": sqrt(b_star / a_star)}
    return new_curve, new_hard, maps
