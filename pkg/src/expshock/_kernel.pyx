# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cell kernel; mirrors kernel_py.solve_cell exactly.

See kernel_py for the state layout and the contract.  The arithmetic is
kept in the same order as the pure-python twin so the two backends agree
to rounding.
"""

from libc.math cimport exp, fabs

DEF NVARS = 11


cdef inline void _rates(double* s, double fourpi, double* out) noexcept nogil:
    cdef double r = s[0]
    cdef double phi = s[1]
    cdef double m = s[2]
    cdef double nu = s[3]
    cdef double kappa = s[4]
    cdef double zeta = s[5]
    cdef double eta = s[6]
    cdef double xi = s[7]
    cdef double nint = s[8]
    cdef double mu = 2.0 * m / r
    cdef double g = fourpi * r * r
    cdef double kor = kappa / r
    cdef double nor = nu / r
    cdef double xi_plus = (-(xi / r) * (1.0 + mu - 2.0 * g)
                           + 2.0 * eta / (r * r)
                           - (zeta / (r * r)) * ((1.0 - mu) + (1.0 + g)
                                                 - g * zeta * zeta * (1.0 - g)))
    out[0] = (1.0 - mu) * kappa
    out[1] = kappa * eta
    out[2] = kor * (eta - (1.0 - g) * zeta)
    out[3] = kappa * xi_plus
    out[4] = (mu - g) * kor
    out[5] = phi * (mu - g) * kor * exp(nint)
    out[6] = 0.5 * g * kappa * ((1.0 - mu) + eta * eta)
    out[7] = nor * ((1.0 + g * zeta * zeta) * eta - (1.0 - mu) * zeta)
    out[8] = g * nu * zeta * zeta / r
    out[9] = -0.5 * g * nu * ((1.0 - mu) * zeta * zeta + 1.0)


def solve_cell(double[::1] S, double[::1] W, double du, double dv,
               double fourpi, double tol, int max_iter, double[::1] out):
    cdef double rs[10]
    cdef double rw[10]
    cdef double rp[10]
    cdef double cur[NVARS]
    cdef double nxt[NVARS]
    cdef double hv = 0.5 * dv
    cdef double hu = 0.5 * du
    cdef int k, iters
    cdef double delta, d, resid_r, resid_m
    cdef int status = -1

    _rates(&S[0], fourpi, rs)
    _rates(&W[0], fourpi, rw)
    for k in range(NVARS):
        cur[k] = S[k]
    iters = 0
    while iters < max_iter:
        iters += 1
        _rates(cur, fourpi, rp)
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
            d = fabs(nxt[k] - cur[k]) / (1.0 + fabs(nxt[k]))
            if d > delta:
                delta = d
            cur[k] = nxt[k]
        if delta <= tol:
            status = 0
            break
    if status != 0:
        return (-1, iters, 0.0, 0.0)
    _rates(cur, fourpi, rp)
    for k in range(NVARS):
        out[k] = cur[k]
    resid_r = fabs(cur[0] - (W[0] - hu * (W[3] + cur[3])))
    resid_m = fabs(cur[2] - (S[2] + hv * (rs[6] + rp[6])))
    return (0, iters, resid_r, resid_m)
