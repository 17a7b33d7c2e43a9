"""Pure-python cell kernel for the hard-phase characteristic march.

One call advances a single grid cell: given the south neighbor S (same
u, smaller v) and the west neighbor W (same v, previous u line), solve
the corner state P implicitly by trapezoidal fixed point.  Quantities
advancing along v come from S, quantities advancing along u come from W,
and the two transports nu and kappa ride on the integrals N and K so
they stay exact exponentials.

State layout (shared with the compiled twin, index order matters):
    0 r, 1 phi, 2 m, 3 nu, 4 kappa, 5 zeta, 6 eta, 7 xi, 8 N, 9 K, 10 Mint

Returns (status, iterations, resid_r, resid_m); status 0 means the cell
converged, -1 no convergence, -2 radius collapse, -3 trapped (2m/r >= 1).
resid_r and resid_m are the cross-route checks on r and m, the pair of
dual-route diagnostics the drivers aggregate.
"""

from math import exp

NVARS = 11


def _rates(state, fourpi):
    r = state[0]
    phi = state[1]
    m = state[2]
    nu = state[3]
    kappa = state[4]
    zeta = state[5]
    eta = state[6]
    xi = state[7]
    nint = state[8]
    mu = 2.0 * m / r
    g = fourpi * r * r
    kor = kappa / r
    nor = nu / r
    xi_plus = (-(xi / r) * (1.0 + mu - 2.0 * g)
               + 2.0 * eta / (r * r)
               - (zeta / (r * r)) * ((1.0 - mu) + (1.0 + g)
                                     - g * zeta * zeta * (1.0 - g)))
    r_v = (1.0 - mu) * kappa
    phi_v = kappa * eta
    zeta_v = kor * (eta - (1.0 - g) * zeta)
    xi_v = kappa * xi_plus
    n_v = (mu - g) * kor
    mint_v = phi * (mu - g) * kor * exp(nint)
    m_v = 0.5 * g * kappa * ((1.0 - mu) + eta * eta)
    eta_u = nor * ((1.0 + g * zeta * zeta) * eta - (1.0 - mu) * zeta)
    k_u = g * nu * zeta * zeta / r
    m_u = -0.5 * g * nu * ((1.0 - mu) * zeta * zeta + 1.0)
    return (r_v, phi_v, zeta_v, xi_v, n_v, mint_v, m_v, eta_u, k_u, m_u)


def solve_cell(S, W, du, dv, fourpi, tol, max_iter, out):
    rs = _rates(S, fourpi)
    rw = _rates(W, fourpi)
    hv = 0.5 * dv
    hu = 0.5 * du
    cur = [S[k] for k in range(NVARS)]
    nxt = [0.0] * NVARS
    iters = 0
    status = -1
    while iters < max_iter:
        iters += 1
        rp = _rates(cur, fourpi)
        nxt[0] = S[0] + hv * (rs[0] + rp[0])
        nxt[1] = S[1] + hv * (rs[1] + rp[1])
        nxt[5] = S[5] + hv * (rs[2] + rp[2])
        nxt[7] = S[7] + hv * (rs[3] + rp[3])
        nxt[8] = S[8] + hv * (rs[4] + rp[4])
        nxt[10] = S[10] + hv * (rs[5] + rp[5])
        nxt[6] = W[6] + hu * (rw[7] + rp[7])
        nxt[9] = W[9] + hu * (rw[8] + rp[8])
        nxt[2] = W[2] + hu * (rw[9] + rp[9])
        if nxt[0] <= 0.0:
            return (-2, iters, 0.0, 0.0)
        if 2.0 * nxt[2] / nxt[0] >= 1.0:
            return (-3, iters, 0.0, 0.0)
        nxt[3] = S[3] * exp(nxt[8] - S[8])
        nxt[4] = W[4] * exp(-(nxt[9] - W[9]))
        delta = 0.0
        for k in range(NVARS):
            d = abs(nxt[k] - cur[k]) / (1.0 + abs(nxt[k]))
            if d > delta:
                delta = d
            cur[k] = nxt[k]
        if delta <= tol:
            status = 0
            break
    if status != 0:
        return (-1, iters, 0.0, 0.0)
    rp = _rates(cur, fourpi)
    for k in range(NVARS):
        out[k] = cur[k]
    resid_r = abs(cur[0] - (W[0] - hu * (W[3] + cur[3])))
    resid_m = abs(cur[2] - (S[2] + hv * (rs[6] + rp[6])))
    return (0, iters, resid_r, resid_m)
