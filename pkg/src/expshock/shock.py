"""March of the free phase boundary out of its formation point.

The front is a timelike curve chi*(tau) in the soft comoving chart.  On
each comoving time step the solver (1) predicts where the front moved,
(2) reads the soft state it is running into, (3) converts that state
through the jump relations into hard-side boundary slopes, (4) advances
the hard wedge behind the front by one diagonal row of its double-null
grid, and (5) updates the front speed from the slope mismatch the wedge
reports, iterating to a fixed point.  The wedge rides on the shared cell
kernel; only the two boundary rows (the data ray below, the front above)
need their own small implicit solves.

The corner itself is degenerate for the direct problem (the speed update
is 0/0 there), so direct runs seed the first few rows from the known
local behaviour and hand over to the fixed point afterwards.  The
regularized family moves the corner to an interior anchor where nothing
degenerates; build_regularized constructs its members.
"""

from math import exp, log, pi, sqrt

import numpy as np

from .barrier import (barrier_of_state, barrier_plus_of_state,
                      xi_plus_of_state)
from .errors import (AnchorError, CellDivergenceError, CollapseError,
                     CornerDegenerateError, DegenerateJumpError, DomainError,
                     HardPhaseDegeneracyError, InternalInconsistencyError,
                     InvariantViolationError, StepDivergenceError,
                     TrappedRegionError)
from .evolve import advance_cell
from .grids import NullGrid
from .hardfield import HardField
from .softphase import flowline_state
from .stencils import apply_line

FOURPI = 4.0 * pi
NVARS = 11
# state layout, shared with the cell kernel:
# 0 r, 1 phi, 2 m, 3 nu, 4 kappa, 5 zeta, 6 eta, 7 xi, 8 N, 9 K, 10 Mint


# -- jump relations ------------------------------------------------------

def jump_boundary_data(beta, rho, a_minus):
    """Hard-side boundary slopes created by a front moving at speed beta
    into soft matter with compression rho and ingoing slope a_minus.

    Returns (nu, kappa, zeta, eta, dphi); dphi is the growth rate of the
    potential along the front per unit comoving time.
    """
    if beta >= 1.0:
        raise DegenerateJumpError("front speed reached 1 (beta = %.6g)"
                                  % beta)
    if beta < 0.0 or a_minus <= 0.0 or rho < 0.0 or rho > 1.0 + 1e-12:
        raise DomainError("jump data outside range: beta=%.6g rho=%.6g "
                          "a_minus=%.6g" % (beta, rho, a_minus))
    nu = 0.5 * a_minus * (1.0 - beta)
    kappa = 0.5 * (1.0 + beta) / a_minus
    zeta = sqrt((1.0 + beta - 2.0 * rho * beta) / (1.0 - beta)) / a_minus
    eta = a_minus * sqrt((1.0 - beta + 2.0 * rho * beta) / (1.0 + beta))
    # the potential rate along the front splits exactly into nu*zeta
    # (ingoing part) plus kappa*eta (outgoing part)
    dphi = nu * zeta + kappa * eta
    return nu, kappa, zeta, eta, dphi


def beta_update(gamma, rho):
    """Front speed from the slope ratio gamma = 1/(zeta a_minus) the hard
    wedge reports and the compression rho it runs into."""
    if not 0.0 < gamma <= 1.0 + 1e-12:
        raise DomainError("slope ratio gamma = %.6g outside (0, 1]" % gamma)
    if rho > 1.0 + 1e-12:
        raise DomainError("compression rho = %.6g above 1" % rho)
    excess = 1.0 / gamma ** 2 - 1.0
    drop = 1.0 - rho
    if abs(excess) < 1e-30 and abs(drop) < 1e-30:
        raise CornerDegenerateError(
            "speed update is 0/0 at gamma = rho = 1; seed from the local "
            "form instead")
    return excess / (excess + 2.0 * drop)


def _half_slip(s):
    """(sqrt(1+s) - 1)/s with the removable point filled in."""
    if s <= -1.0:
        raise DomainError("slip argument %.6g at or below -1" % s)
    if abs(s) < 1e-5:
        return 0.5 - 0.125 * s + 0.0625 * s * s
    return (sqrt(1.0 + s) - 1.0) / s


def psi_derivative(drop, z):
    """Rate at which the front potential lags comoving time.

    drop is 1 - rho ahead of the front and z the half-jump ratio with
    z^2 = (1-beta)/(1+beta).  Written as a difference of slip factors so
    the near-corner value comes out without cancellation.
    """
    zsq = z * z
    if not 0.0 < zsq <= 1.0 + 1e-14:
        raise DomainError("z^2 = %.6g outside (0, 1]" % zsq)
    y = drop * (1.0 - zsq)
    return (y / (1.0 + zsq)) * (_half_slip(y / zsq) - _half_slip(-y))


# -- boundary-row solvers ------------------------------------------------

def _bottom_extend(prev, ray, nu_prev, nu_new, du, kappa_corner, fourpi,
                   tol, max_iter):
    """One step along the incoming data ray.

    Only the potential, the outgoing slope eta, and the kappa transport
    integral are unknowns; radius, mass, zeta and xi are algebra in the
    given profile.  nu on this ray is pure gauge and is supplied by the
    caller at both endpoints.
    """
    t0, eta0, kk0 = prev[1], prev[6], prev[9]

    def rates(t, eta, nu):
        r = ray.radius(t)
        z = ray.z(t)
        mu = 2.0 * ray.mass(t) / r
        g = fourpi * r * r
        return (nu * z,
                (nu / r) * ((1.0 + g * z * z) * eta - (1.0 - mu) * z),
                g * nu * z * z / r)

    f0 = rates(t0, eta0, nu_prev)
    t1 = t0 + du * f0[0]
    eta1 = eta0 + du * f0[1]
    kk1 = kk0 + du * f0[2]
    for _ in range(max_iter):
        f1 = rates(t1, eta1, nu_new)
        tn = t0 + 0.5 * du * (f0[0] + f1[0])
        en = eta0 + 0.5 * du * (f0[1] + f1[1])
        kn = kk0 + 0.5 * du * (f0[2] + f1[2])
        delta = max(abs(tn - t1) / (1.0 + abs(tn)),
                    abs(en - eta1) / (1.0 + abs(en)),
                    abs(kn - kk1) / (1.0 + abs(kn)))
        t1, eta1, kk1 = tn, en, kn
        if delta <= tol:
            break
    else:
        raise CellDivergenceError("bottom-ray step stalled at t = %.6g" % t1)
    out = np.empty(NVARS)
    out[0] = ray.radius(t1)
    out[1] = t1
    out[2] = ray.mass(t1)
    out[3] = nu_new
    out[9] = kk1
    out[4] = kappa_corner * exp(-kk1)
    out[5] = ray.z(t1)
    out[6] = eta1
    out[7] = ray.xi(t1)
    out[8] = 0.0
    out[10] = 0.0
    return out


def _vrates(r, phi, m, kappa, zeta, eta, xi, nint, fourpi):
    mu = 2.0 * m / r
    g = fourpi * r * r
    kor = kappa / r
    return np.array([
        (1.0 - mu) * kappa,
        kappa * eta,
        0.5 * g * kappa * ((1.0 - mu) + eta * eta),
        kor * (eta - (1.0 - g) * zeta),
        kappa * xi_plus_of_state(r, mu, zeta, eta, xi),
        (mu - g) * kor,
        phi * (mu - g) * kor * exp(nint),
    ])


def _front_node(S, kappa_f, eta_f, dv, fourpi, tol, max_iter):
    """Close a grid row at the front: advance from the inner neighbour S
    along v with the front's kappa and eta imposed, integrating the seven
    slots the v-equations govern and riding nu on the N integral."""
    rs = _vrates(S[0], S[1], S[2], S[4], S[5], S[6], S[7], S[8], fourpi)
    base = np.array([S[0], S[1], S[2], S[5], S[7], S[8], S[10]])
    cur = base + dv * rs
    for _ in range(max_iter):
        rp = _vrates(cur[0], cur[1], cur[2], kappa_f, cur[3], eta_f,
                     cur[4], cur[5], fourpi)
        nxt = base + 0.5 * dv * (rs + rp)
        if nxt[0] <= 0.0:
            raise CollapseError("front node radius collapsed")
        if 2.0 * nxt[2] / nxt[0] >= 1.0:
            raise TrappedRegionError("front node trapped (2m/r >= 1)")
        delta = np.max(np.abs(nxt - cur) / (1.0 + np.abs(nxt)))
        cur = nxt
        if delta <= tol:
            break
    else:
        raise CellDivergenceError("front node update stalled")
    out = np.empty(NVARS)
    out[0], out[1], out[2] = cur[0], cur[1], cur[2]
    out[5], out[7] = cur[3], cur[4]
    out[8], out[10] = cur[5], cur[6]
    out[3] = S[3] * exp(out[8] - S[8])
    out[4] = kappa_f
    out[6] = eta_f
    out[9] = 0.0
    return out


# -- marched front container ---------------------------------------------

_CURVE_ARRAYS = ("tau", "chi", "beta", "gamma", "rho", "nu", "kappa",
                 "zeta", "eta", "phi", "psi", "psi_rate", "ydrop", "dlag",
                 "a_minus", "eomega", "estar", "mstar", "nstar", "mdiag",
                 "msoft")


class ShockCurve(object):
    """Per-row samples of the marched front and the data it carries.

    All arrays run over the accepted rows, index 0 at the corner.  chi is
    the front position, beta its speed relative to the flow lines, gamma
    the slope ratio reported by the wedge, rho the compression just ahead.
    nu/kappa/zeta/eta are the hard-side boundary slopes, phi the front
    potential and psi its lag behind comoving time.  ydrop is the radius
    drop along the data ray, dlag the associated time lag, estar the
    barrier transported up to the front along each row, mstar/nstar the
    two transport integrals at the front, mdiag/msoft the mass on either
    side of it.
    """

    def __init__(self, n, r0, a_minus0):
        self.r0 = float(r0)
        self.a_minus0 = float(a_minus0)
        for nm in _CURVE_ARRAYS:
            setattr(self, nm, np.zeros(n))
        self.seed_rows = 0
        self.beta0_closed = None

    def __len__(self):
        return len(self.tau)

    # ratios of the jump algebra, all derived from the stored samples

    def drop(self):
        return 1.0 - self.rho

    def excess(self):
        return 1.0 / self.gamma ** 2 - 1.0

    def doppler_sq(self):
        return (1.0 - self.beta) / (1.0 + self.beta)

    def strength(self):
        return 2.0 * (1.0 - self.rho)

    def boost_ratio(self):
        """(eta / a_minus)^2 expressed through the strength variables."""
        x = self.strength()
        y = 1.0 - self.gamma ** 2
        den = x + 2.0 * y
        zt = np.divide(x * y, den, out=np.zeros_like(den),
                       where=np.abs(den) > 1e-300)
        return (1.0 - 2.0 * zt) / (1.0 - zt)

    def tcoord(self):
        return self.tau + 0.5 * self.chi

    def xcoord(self):
        return self.tau - 0.5 * self.chi

    def residual_speed_relation(self):
        """z^2 - X/(E+X) per sample, zero where the speed update and the
        jump algebra agree; the corner sample is skipped (0/0)."""
        out = np.zeros(len(self))
        ex = self.excess()
        dr = self.drop()
        zs = self.doppler_sq()
        for i in range(1, len(self)):
            den = ex[i] + dr[i]
            if den > 0:
                out[i] = zs[i] - dr[i] / den
        return out

    def check(self, tol=1e-10):
        """Enforce the range constraints every accepted run must satisfy."""
        n = len(self)
        for i in range(1, n):
            if not 0.0 < self.beta[i] < 1.0:
                raise InvariantViolationError(
                    "beta = %.6g outside (0,1) at tau = %.6g"
                    % (self.beta[i], self.tau[i]))
            if i > self.seed_rows and not \
                    0.0 < self.gamma[i] <= 1.0 + 1e-12:
                raise InvariantViolationError(
                    "gamma = %.6g outside (0,1] at tau = %.6g"
                    % (self.gamma[i], self.tau[i]))
            if self.rho[i] > 1.0 + 1e-12:
                raise InvariantViolationError(
                    "rho = %.6g above 1 at tau = %.6g"
                    % (self.rho[i], self.tau[i]))
        resid = self.residual_speed_relation()
        worst = float(np.max(np.abs(resid[self.seed_rows + 1:]))) \
            if n > self.seed_rows + 1 else 0.0
        if worst > tol:
            raise InvariantViolationError(
                "speed relation residual %.3e above %.1e" % (worst, tol))
        return worst


# -- the march ------------------------------------------------------------

class FrontMarch(object):
    """Driver state for one formation run.

    soft is a callable (chi, tau) -> soft-state dict; ray holds the data
    on the incoming characteristic; corner = (beta, rho, a_minus) fixes
    the jump at tau = 0.  seed, when given, freezes (chi*, rho, beta) on
    the first few rows to the local closed forms, which is how the direct
    problem gets past its 0/0 corner.
    """

    def __init__(self, grid, soft, ray, corner, seed=None, tol=1e-11,
                 max_iter=60, cell_tol=1e-12, fourpi=FOURPI,
                 barrier_floor_tau=None):
        self.grid = grid
        self.soft = soft
        self.ray = ray
        self.corner = corner
        self.seed = seed
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.cell_tol = float(cell_tol)
        self.fourpi = fourpi
        self.barrier_floor_tau = (grid.tau_hat if barrier_floor_tau is None
                                  else float(barrier_floor_tau))
        self.vals = np.zeros((grid.n_nodes, NVARS))
        self.nu_bottom = np.zeros(grid.n_rows)
        self.curve = ShockCurve(grid.n_rows, ray.r0, -ray.rdot0)
        self.rows_done = 0
        self.iters_max = 0
        self.resid_r_sup = 0.0
        self.resid_m_sup = 0.0
        self._corner_row()

    def _corner_row(self):
        beta0, rho0, am0 = self.corner
        nu0, ka0, ze0, et0, _ = jump_boundary_data(beta0, rho0, am0)
        if abs(ze0 - self.ray.z(0.0)) > 1e-9 * abs(ze0):
            raise InternalInconsistencyError(
                "corner jump slope %.12g disagrees with the data ray %.12g"
                % (ze0, self.ray.z(0.0)))
        c = self.curve
        c.beta[0], c.rho[0], c.a_minus[0] = beta0, rho0, am0
        c.gamma[0] = 1.0 / (ze0 * am0)
        c.nu[0], c.kappa[0], c.zeta[0], c.eta[0] = nu0, ka0, ze0, et0
        st = self.soft(0.0, 0.0)
        c.eomega[0] = st["eomega"]
        c.msoft[0] = st["m"]
        if rho0 < 1.0:
            c.psi_rate[0] = psi_derivative(1.0 - rho0, sqrt(
                (1.0 - beta0) / (1.0 + beta0)))
        node = self.vals[0]
        node[0], node[1], node[2] = self.ray.r0, 0.0, self.ray.m0
        node[3], node[4], node[5], node[6] = nu0, ka0, ze0, et0
        node[7] = self.ray.xi(0.0)
        mu0 = 2.0 * self.ray.m0 / self.ray.r0
        c.estar[0] = barrier_of_state(self.ray.r0, mu0, ze0, node[7])
        c.mdiag[0] = self.ray.m0
        self.nu_bottom[0] = nu0
        self.kappa_corner = ka0
        self.rows_done = 1

    def _seed_speed(self, tau, chi, rho):
        """Front speed from the corner energy balance: the slope excess
        plus the compression drop grows as the squared centered time,
        with the endpoint rate product as coefficient.  Replaces the 0/0
        speed update on the first rows of a direct run."""
        drop = 1.0 - rho
        if drop <= 0.0:
            raise InvariantViolationError(
                "seeded front ran into rho = %.8g >= 1 at tau = %.6g"
                % (rho, tau))
        t = self.seed.get("t0", 0.0) + tau + 0.5 * chi
        zsq = drop / (self.seed["rate"] * t * t)
        if zsq >= 1.0:
            raise InvariantViolationError(
                "seeded speed came out nonpositive at tau = %.6g" % tau)
        return (1.0 - zsq) / (1.0 + zsq)

    def advance_step(self):
        """Advance the front and its wedge by one row; returns the row
        index just completed."""
        g = self.grid
        i0 = self.rows_done - 1
        i1 = i0 + 1
        if i1 >= g.n_rows:
            raise DomainError("march already reached tau_hat")
        dd = g.spacing
        tau1 = g.u(i1)
        c = self.curve
        prev = self.vals[g.line_slice(i0)]
        row = np.empty((i1 + 1, NVARS))
        seeded = self.seed is not None and i1 <= self.seed["rows"]
        beta1 = c.beta[i0]
        chi1 = c.chi[i0] + dd * c.beta[i0] / c.eomega[i0]
        nstar1 = c.nstar[i0]
        if i0 >= 1:
            nstar1 += c.nstar[i0] - c.nstar[i0 - 1]
        accepted = False
        for _ in range(self.max_iter):
            st = self.soft(chi1, tau1)
            rho1 = st["rho"]
            am1, eom1 = st["a_minus"], st["eomega"]
            if rho1 > 1.0 + 1e-12:
                raise InvariantViolationError(
                    "front ran into rho = %.8g > 1 at tau = %.6g"
                    % (rho1, tau1))
            if seeded:
                beta1 = self._seed_speed(tau1, chi1, rho1)
            nu_s, ka_s, ze_s, et_s, _ = jump_boundary_data(beta1, rho1, am1)
            nu_b = nu_s * exp(-nstar1)
            try:
                row[0] = _bottom_extend(prev[0], self.ray,
                                        self.nu_bottom[i0], nu_b, dd,
                                        self.kappa_corner, self.fourpi,
                                        self.cell_tol, self.max_iter)
                for j in range(1, i1):
                    _, it, rr, rm = advance_cell(row[j - 1], prev[j], dd, dd,
                                                 fourpi=self.fourpi,
                                                 tol=self.cell_tol,
                                                 max_iter=self.max_iter,
                                                 out=row[j])
                    self.iters_max = max(self.iters_max, it)
                    self.resid_r_sup = max(self.resid_r_sup, rr)
                    self.resid_m_sup = max(self.resid_m_sup, rm)
                row[i1] = _front_node(row[i1 - 1], ka_s, et_s, dd,
                                      self.fourpi, self.cell_tol,
                                      self.max_iter)
            except CellDivergenceError as err:
                raise StepDivergenceError(
                    "row solve failed at tau = %.6g (%s); try a smaller "
                    "spacing" % (tau1, err))
            zeta_w = row[i1][5]
            gam1 = 1.0 / (zeta_w * am1)
            nstar_new = row[i1][8]
            if seeded:
                # the seed pins beta to the energy balance at the sampled
                # point; chi is iterated on the damped trapezoid corrector
                # (the undamped pair oscillates where beta reacts strongly
                # to position)
                beta_new = beta1
                chi_corr = c.chi[i0] + 0.5 * dd * (
                    c.beta[i0] / c.eomega[i0] + beta_new / eom1)
                chi_new = 0.5 * (chi1 + chi_corr)
            else:
                beta_new = beta_update(min(gam1, 1.0), rho1)
                if not 0.0 < beta_new < 1.0:
                    raise InvariantViolationError(
                        "front speed left (0,1): beta = %.8g at tau = %.6g"
                        % (beta_new, tau1))
                chi_new = c.chi[i0] + 0.5 * dd * (
                    c.beta[i0] / c.eomega[i0] + beta_new / eom1)
            delta = max(abs(beta_new - beta1), abs(nstar_new - nstar1),
                        abs(chi_new - chi1))
            beta1, nstar1, chi1 = beta_new, nstar_new, chi_new
            if delta <= self.tol:
                accepted = True
                break
        if not accepted:
            raise StepDivergenceError(
                "front fixed point did not converge at tau = %.6g "
                "(last update %.3e); try a smaller spacing" % (tau1, delta))
        self._accept_row(i1, row, tau1, chi1, beta1, rho1, st, gam1, nu_b)
        return i1

    def _accept_row(self, i1, row, tau1, chi1, beta1, rho1, st, gam1, nu_b):
        g, c = self.grid, self.curve
        r, m = row[:, 0], row[:, 2]
        mu = 2.0 * m / r
        e_row = barrier_of_state(r, mu, row[:, 5], row[:, 7])
        if tau1 <= self.barrier_floor_tau and np.min(e_row) <= 0.0:
            raise HardPhaseDegeneracyError(
                "barrier lost positivity on the row at tau = %.6g (min "
                "e = %.3e)" % (tau1, float(np.min(e_row))))
        eplus = barrier_plus_of_state(r, mu, row[:, 5], row[:, 6], row[:, 7])
        ig = eplus * row[:, 4]
        estar = e_row[0]
        if i1 >= 1:
            estar += g.spacing * (0.5 * ig[0] + ig[1:-1].sum() + 0.5 * ig[-1])
        self.vals[g.line_slice(i1)] = row
        self.nu_bottom[i1] = nu_b
        nu1, ka1, ze1, et1, _ = jump_boundary_data(beta1, rho1,
                                                   st["a_minus"])
        c.tau[i1], c.chi[i1], c.beta[i1] = tau1, chi1, beta1
        c.gamma[i1], c.rho[i1] = gam1, rho1
        c.nu[i1], c.kappa[i1] = nu1, ka1
        c.zeta[i1], c.eta[i1] = row[i1][5], et1
        c.a_minus[i1], c.eomega[i1] = st["a_minus"], st["eomega"]
        c.psi_rate[i1] = psi_derivative(
            1.0 - rho1, sqrt((1.0 - beta1) / (1.0 + beta1)))
        c.psi[i1] = c.psi[i1 - 1] + 0.5 * g.spacing * (
            c.psi_rate[i1 - 1] + c.psi_rate[i1])
        c.phi[i1] = tau1 + c.psi[i1]
        c.ydrop[i1] = self.ray.r0 - row[0][0]
        c.dlag[i1] = tau1 - 0.5 * chi1 + 2.0 * c.ydrop[i1] / self.ray.rdot0
        c.estar[i1] = estar
        c.mstar[i1], c.nstar[i1] = row[i1][10], row[i1][8]
        c.mdiag[i1], c.msoft[i1] = row[i1][2], st["m"]
        self.rows_done = i1 + 1

    def run(self):
        while self.rows_done < self.grid.n_rows:
            self.advance_step()
        c = self.curve
        c.seed_rows = 0 if self.seed is None else self.seed["rows"]
        if self.seed is not None:
            c.beta0_closed = self.seed["beta0"]
            if self.seed.get("extrapolate", True):
                c.beta[0] = _corner_speed_from_position(c)
        c.check()
        hard = HardField(self.grid, self.vals)
        hard.iters_max = self.iters_max
        hard.resid_r_sup = self.resid_r_sup
        hard.resid_m_sup = self.resid_m_sup
        return c, hard


def _corner_speed_from_position(curve):
    """Corner front speed recovered from the marched position: a cubic
    through the origin fitted to chi*(tau) gives the initial slope, and
    the speed is that slope times the metric factor at the corner.  The
    position integrates through the seed handoff smoothly, which makes
    this far steadier than extrapolating the speed samples themselves."""
    n = len(curve)
    hi = max(7, (n + 1) // 2)
    if hi > n:
        return curve.beta[0]
    tt = curve.tau[1:hi]
    basis = np.column_stack([tt, tt ** 2, tt ** 3])
    coef, _, _, _ = np.linalg.lstsq(basis, curve.chi[1:hi], rcond=None)
    return float(coef[0] * curve.eomega[0])


def run_formation(scenario, tau_hat=0.09375, spacing=2.0 ** -7, seed_rows=2,
                  tol=1e-11, max_iter=60, cell_tol=1e-12,
                  h_nom=2.0 ** -10, barrier_floor_tau=None):
    """March the free boundary of a scenario from its formation corner.

    Returns (ShockCurve, HardField on the triangular wedge grid).  The
    first seed_rows rows are pinned to the local closed forms because the
    corner speed update is 0/0; the corner speed stored on the curve is
    afterwards replaced by the extrapolated limit of the marched rows.
    """
    inv = scenario.invariants
    inv.validate()
    grid = NullGrid(spacing, tau_hat)

    def soft(chi, tau):
        return flowline_state(scenario.interface, chi, tau, h_nom=h_nom)

    beta0 = inv.initial_velocity
    rate = inv.rate_product
    intr = inv.intrinsic_rate
    seed = None
    if seed_rows > 0:
        seed = {"rows": int(seed_rows), "beta0": beta0, "rate": rate}
    march = FrontMarch(grid, soft, scenario.ray, (beta0, 1.0, inv.a_minus0),
                       seed=seed, tol=tol, max_iter=max_iter,
                       cell_tol=cell_tol,
                       barrier_floor_tau=barrier_floor_tau)
    curve, hard = march.run()
    hard.scenario = scenario
    return curve, hard


# -- regularized family ---------------------------------------------------

def _omega_derivs(soft, chi, tau, step=1e-4):
    """Log-derivatives of the comoving metric factor at one point."""
    s0 = soft(chi, tau)
    om_t = s0["deltadot"] / s0["delta"]
    if chi >= step:
        sp = soft(chi + step, tau)
        sm = soft(chi - step, tau)
        om_c = 0.5 * (log(sp["eomega"]) - log(sm["eomega"])) / step
    else:
        sp = soft(chi + step, tau)
        om_c = (log(sp["eomega"]) - log(s0["eomega"])) / step
    return s0, om_t, om_c


def _geodesic_shoot(soft, p0, tau_end, n_steps=64):
    """Timelike geodesic from the corner with launch slope dchi/dtau = p0;
    returns (chi, p, eomega) at tau_end."""
    h = tau_end / n_steps
    chi, p = 0.0, p0

    def rhs(chi_c, tau_c, p_c):
        st, om_t, om_c = _omega_derivs(soft, chi_c, tau_c)
        ew = st["eomega"]
        return p_c, (-2.0 * om_t * p_c - om_c * p_c ** 2
                     + om_t * ew ** 2 * p_c ** 3)

    tau = 0.0
    for k in range(n_steps):
        if k == 0:
            # midpoint start avoids sampling derivatives exactly at the
            # corner of the soft domain
            f = rhs(chi + 0.5 * h * p, tau + 0.5 * h, p)
            chi += h * f[0]
            p += h * f[1]
        else:
            k1 = rhs(chi, tau, p)
            k2 = rhs(chi + 0.5 * h * k1[0], tau + 0.5 * h, p + 0.5 * h * k1[1])
            k3 = rhs(chi + 0.5 * h * k2[0], tau + 0.5 * h, p + 0.5 * h * k2[1])
            k4 = rhs(chi + h * k3[0], tau + h, p + h * k3[1])
            chi += (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            p += (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        tau += h
    return chi, p, soft(chi, tau)["eomega"]


def _anchor_point(soft, beta0, tau0, tol=1e-10):
    """Anchor at comoving time tau0: bisect the launch slope until the
    geodesic arrives with relative velocity beta0.  Returns (chi0,
    arrival beta)."""
    p_nom = 2.0 * beta0

    def arrival(p0):
        chi_e, p_e, ew = _geodesic_shoot(soft, p0, tau0)
        return chi_e, ew * p_e - beta0

    lo, hi = 0.25 * p_nom, 2.5 * p_nom
    try:
        _, f_lo = arrival(lo)
        chi_hi, f_hi = arrival(hi)
    except (DomainError, CollapseError) as err:
        raise AnchorError("geodesic left the soft domain: %s" % err)
    if f_lo * f_hi > 0:
        raise AnchorError("launch-slope bracket does not straddle the "
                          "target velocity at tau0 = %.6g" % tau0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        chi_m, f_m = arrival(mid)
        if abs(f_m) <= tol:
            return chi_m, f_m + beta0
        if f_lo * f_m <= 0:
            hi, f_hi = mid, f_m
        else:
            lo, f_lo = mid, f_m
    raise AnchorError("launch-slope bisection stalled at tau0 = %.6g" % tau0)


class RegularizedProblem(object):
    """One interior-anchored member approximating the corner march.

    The anchor sits on the geodesic through the corner at comoving time
    tau0; the incoming data ray is the base profile shifted by (c_shift,
    k_shift, l_shift), and the soft side is the base solution read in
    coordinates translated to the anchor.
    """

    def __init__(self, scenario, n, tau0, chi0, beta0, c_shift, k_shift,
                 l_shift, ray, corner, h_nom=2.0 ** -10):
        self.scenario = scenario
        self.n = int(n)
        self.tau0 = float(tau0)
        self.chi0 = float(chi0)
        self.beta0 = float(beta0)
        self.c_shift = float(c_shift)
        self.k_shift = float(k_shift)
        self.l_shift = float(l_shift)
        self.ray = ray
        self.corner = corner
        self.h_nom = float(h_nom)

    def soft(self, chi, tau):
        return flowline_state(self.scenario.interface, self.chi0 + chi,
                              self.tau0 + tau, h_nom=self.h_nom)

    def verify(self):
        """The three admissibility conditions, checked exactly."""
        inv = self.scenario.invariants
        co = self.corner
        return {
            "radius_match": abs(self.ray.radius(0.0) - co["r0"]),
            "corner_speed": co["gamma0"],
            "corner_speed_ok": co["gamma0"] < 1.0,
            "corner_barrier": co["e0"],
            "corner_barrier_ok": co["e0"] > 0.0,
            "slope_margin": self.k_shift - max(
                inv.a_minus0 - co["a_minus"], 0.0),
            "curvature_margin": self.l_shift - co["f_bound"],
        }

    def perturbed(self, eps_k=0.0, eps_l=0.0):
        """A copy of this member with the incoming ray's slope and
        curvature shifts nudged by (eps_k, eps_l); the anchor and the
        soft side stay fixed.  Used for the linear-response check of
        uniqueness."""
        inv = self.scenario.invariants
        co = self.corner
        k_shift = self.k_shift + eps_k
        l_shift = self.l_shift + eps_l
        ray = self.scenario.ray.shifted(self.c_shift, k_shift, l_shift,
                                        m0=co["m0"])
        gamma0 = (inv.a_minus0 - k_shift) / co["a_minus"]
        if not 0.0 < gamma0 < 1.0:
            raise AnchorError("perturbed corner speed ratio %.6g not in "
                              "(0,1)" % gamma0)
        corner = dict(co)
        corner["gamma0"] = gamma0
        corner["beta"] = beta_update(gamma0, co["rho"])
        corner["e0"] = ray.barrier(0.0)
        return RegularizedProblem(self.scenario, self.n, self.tau0,
                                  self.chi0, self.beta0, self.c_shift,
                                  k_shift, l_shift, ray, corner,
                                  h_nom=self.h_nom)

    def march(self, tau_hat=0.09375, spacing=2.0 ** -7, seed_rows=2, **kw):
        """Run the formation march from the anchor.

        The anchored corner is non-degenerate, but its energy excess is
        still far below the wedge truncation floor on the first rows, so
        the same centered-time energy seeding as the direct march is
        used (offset to the anchor); the corner speed stays the exact
        anchored value rather than an extrapolated fit.
        """
        co = self.corner
        seed = None
        if seed_rows > 0:
            seed = {"rows": int(seed_rows), "beta0": co["beta"],
                    "rate": self.scenario.invariants.rate_product,
                    "t0": self.tau0 + 0.5 * self.chi0,
                    "extrapolate": False}
        fm = FrontMarch(NullGrid(spacing, tau_hat), self.soft, self.ray,
                        (co["beta"], co["rho"], co["a_minus"]), seed=seed,
                        **kw)
        curve, hard = fm.run()
        hard.scenario = self.scenario
        return curve, hard


def curvature_floor(scenario, r0n, mu0n, k_shift):
    """Smallest data-ray curvature shift keeping the anchored corner
    barrier positive, as an exact function of the anchor state."""
    inv = scenario.invariants
    ak = inv.a_minus0 - k_shift
    g = FOURPI * r0n * r0n
    return (-scenario.ray.rddot0
            - (ak * ak - (1.0 - mu0n - g)) / r0n)


def build_regularized(scenario, n, tau_seed=0.02, k_margin=1.0,
                      l_margin=1.0, h_nom=2.0 ** -10):
    """Construct member n of the regularized family.

    The anchor time halves with n; the slope and curvature shifts sit
    strictly above their exact admissibility floors by margins
    proportional to the anchor's compression deficit 1 - rho, so every
    member satisfies the corner conditions while the whole family
    collapses onto the degenerate corner.  Tying the margins to the
    deficit (which shrinks like the anchor time squared) keeps the
    anchored corner speed near the formation speed uniformly in n; a
    margin that shrinks more slowly drives the early members toward a
    null start and stalls the overlap convergence.
    """
    if n < 1:
        raise DomainError("member index must be >= 1")
    inv = scenario.invariants
    inv.validate()
    tau0 = tau_seed * 2.0 ** -n

    def soft(chi, tau):
        return flowline_state(scenario.interface, chi, tau, h_nom=h_nom)

    chi0, beta0 = _anchor_point(soft, inv.initial_velocity, tau0)
    st = soft(chi0, tau0)
    if st["rho"] >= 1.0:
        raise AnchorError("anchor is not interior: rho = %.8g" % st["rho"])
    r0n, m0n, am0n = st["r"], st["m"], st["a_minus"]
    mu0n = st["mu"]
    deficit = 1.0 - st["rho"]
    c_shift = r0n - scenario.ray.r0
    k_shift = max(inv.a_minus0 - am0n, 0.0) + k_margin * am0n * deficit
    f_bound = curvature_floor(scenario, r0n, mu0n, k_shift)
    l_shift = f_bound + l_margin * abs(scenario.ray.rddot0) * deficit
    ray = scenario.ray.shifted(c_shift, k_shift, l_shift, m0=m0n)
    gamma0 = (inv.a_minus0 - k_shift) / am0n
    if not 0.0 < gamma0 < 1.0:
        raise AnchorError("anchored corner speed ratio %.6g not in (0,1)"
                          % gamma0)
    beta_c = beta_update(gamma0, st["rho"])
    corner = {
        "r0": r0n, "m0": m0n, "mu0": mu0n, "a_minus": am0n,
        "rho": st["rho"], "gamma0": gamma0, "beta": beta_c,
        "e0": ray.barrier(0.0), "f_bound": f_bound,
    }
    return RegularizedProblem(scenario, n, tau0, chi0, beta0, c_shift,
                              k_shift, l_shift, ray, corner, h_nom=h_nom)


def overlap_gap(problem, reg_curve, direct_curve):
    """Sup distance between a regularized front and the direct one over
    the overlap of their samples, in the base coordinates."""
    tau_d, chi_d = direct_curve.tau, direct_curve.chi
    worst = 0.0
    for i in range(len(reg_curve)):
        tau = problem.tau0 + reg_curve.tau[i]
        if tau > tau_d[-1]:
            break
        chi = problem.chi0 + reg_curve.chi[i]
        chi_ref = apply_line(chi_d, tau_d, tau, 0, 4)
        worst = max(worst, abs(chi - chi_ref))
    return worst


# -- diagnostics -----------------------------------------------------------

def barrier_monitor(hard, curve):
    """Positivity and corner-rate report for a marched run.

    Keys: min_e (whole wedge), min_estar (transported values along the
    front), min_sigma_off (smallest sigma away from the corner),
    e_grad_u/e_grad_v (least-squares corner gradient of the barrier),
    e_plus_corner (outgoing barrier rate at the corner node),
    estar_consistency (transported against pointwise front barrier),
    sigma_rate_resid (residual of the barrier identity for the sigma
    gradient, leading form), mass_jump / potential_jump (front-side
    continuity of m and phi against the soft side and the lag integral).
    """
    g = hard.grid
    v = hard.values
    fourpi = hard.fourpi
    n = g.n_rows
    min_e = np.inf
    min_sig = np.inf
    us, vs, es = [], [], []
    estar_err = 0.0
    for i in range(n):
        row = v[g.line_slice(i)]
        r, m = row[:, 0], row[:, 2]
        mu = 2.0 * m / r
        e_row = barrier_of_state(r, mu, row[:, 5], row[:, 7])
        min_e = min(min_e, float(np.min(e_row)))
        sig = np.sqrt(row[:, 5] * row[:, 6])
        if i > 0:
            min_sig = min(min_sig, float(np.min(sig)))
        if i <= max(4, min(6, n - 1)):
            for j in range(i + 1):
                us.append(g.u(i))
                vs.append(g.v(j))
                es.append(e_row[j])
        estar_err = max(estar_err, abs(e_row[-1] - curve.estar[i]))
    a = np.column_stack([np.ones(len(us)), us, vs])
    coef, _, _, _ = np.linalg.lstsq(a, np.array(es), rcond=None)
    node0 = v[0]
    mu0 = 2.0 * node0[2] / node0[0]
    eplus0 = barrier_plus_of_state(node0[0], mu0, node0[5], node0[6],
                                   node0[7])
    report = {
        "min_e": min_e,
        "min_estar": float(np.min(curve.estar)),
        "min_sigma_off": min_sig,
        "e_corner": float(coef[0]),
        "e_grad_u": float(coef[1]),
        "e_grad_v": float(coef[2]),
        "e_plus_corner": float(eplus0),
        "estar_consistency": float(estar_err),
        "mass_jump": float(np.max(np.abs(curve.mdiag - curve.msoft))),
        "potential_jump": _front_potential_gap(hard, curve),
        "sigma_rate_resid": _sigma_rate_residual(hard),
    }
    return report


def _front_potential_gap(hard, curve):
    g = hard.grid
    worst = 0.0
    for i in range(g.n_rows):
        phi_d = hard.values[g.node_index(i, i)][1]
        worst = max(worst, abs(phi_d - curve.phi[i]))
    return float(worst)


def _sigma_rate_residual(hard):
    """Worst residual of the leading sigma-gradient identity, measured
    with centered u-differences at interior nodes."""
    g = hard.grid
    v = hard.values
    dd = g.spacing
    worst = 0.0
    for i in range(1, g.n_rows - 1):
        for j in range(max(1, i - 6), i):
            if j > i - 1 or j >= g.row_length(i - 1):
                continue
            lo = v[g.node_index(i - 1, j)]
            mid = v[g.node_index(i, j)]
            hi = v[g.node_index(i + 1, j)]
            sig_lo = sqrt(lo[5] * lo[6])
            sig_hi = sqrt(hi[5] * hi[6])
            mu = 2.0 * mid[2] / mid[0]
            e = barrier_of_state(mid[0], mu, mid[5], mid[7])
            gg = FOURPI * mid[0] ** 2
            sig = sqrt(mid[5] * mid[6])
            full = (2.0 * mid[3] * mid[5] * e
                    + mid[3] * (sig * sig - 1.0)
                    * (mid[7] / mid[5] + (1.0 + gg * mid[5] ** 2) / mid[0]))
            resid = abs((sig_hi - sig_lo) / (2.0 * dd) - full)
            worst = max(worst, resid)
    return float(worst)


def E_via_alpha(hard, curve, tau, disc_estimate=None):
    """The slope excess at a front sample by two routes.

    Route one transports the bottom-ray combination r*zeta - phi up to
    the front on the two integrals the march accumulates; route two is
    the direct jump algebra from the front slope.  Returns (transported,
    direct); they must agree within ten times the discretization scale.
    """
    g = hard.grid
    i = int(round(tau / g.spacing))
    if not 0 <= i < g.n_rows or abs(g.u(i) - tau) > 1e-9 * max(1.0, tau):
        raise DomainError("tau = %.6g is not a marched row" % tau)
    bottom = hard.values[g.node_index(i, 0)]
    diag = hard.values[g.node_index(i, i)]
    alpha0 = bottom[0] * bottom[5] - bottom[1]
    alpha_st = (alpha0 - diag[10]) * exp(-diag[8])
    am = curve.a_minus[i]
    e_alpha = am ** 2 * ((alpha_st + diag[1]) / diag[0]) ** 2 - 1.0
    e_direct = (curve.zeta[i] * am) ** 2 - 1.0
    if disc_estimate is None:
        disc_estimate = 5.0 * g.spacing ** 2
    if abs(e_alpha - e_direct) > 10.0 * disc_estimate:
        raise InternalInconsistencyError(
            "slope-excess routes disagree at tau = %.6g: %.6e vs %.6e"
            % (tau, e_alpha, e_direct))
    return e_alpha, e_direct
