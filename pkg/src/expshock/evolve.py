"""Characteristic march over a rectangular double-null patch.

Data lives on the two rays through the corner (the bottom ray v = v_lo
and the edge ray u = u_hi); the interior is filled one cell at a time,
each cell solved by the implicit-trapezoid kernel.  The march proceeds
column by column toward smaller u, which keeps the south and west
neighbors of every target node already solved.
"""

from math import pi

import numpy as np

from .errors import (CellDivergenceError, CollapseError,
                     TrappedRegionError)
from .grids import QuadrantGrid
from .hardfield import HardField
from .kernel import NVARS, solve_cell
from .scenarios import quadrant_rays

FOURPI = 4.0 * pi


def advance_cell(S, W, du, dv, fourpi=FOURPI, tol=1e-12, max_iter=60,
                 out=None):
    """Solve one cell and translate kernel statuses into exceptions.
    Returns (out, iters, resid_r, resid_m)."""
    if out is None:
        out = np.empty(NVARS)
    status, iters, rr, rm = solve_cell(
        np.ascontiguousarray(S, dtype=float),
        np.ascontiguousarray(W, dtype=float),
        float(du), float(dv), float(fourpi), float(tol), int(max_iter), out)
    if status == -1:
        raise CellDivergenceError(
            "cell iteration stalled after %d sweeps (resid %.3g)"
            % (iters, rr))
    if status == -2:
        raise CollapseError("area radius hit zero inside a cell")
    if status == -3:
        raise TrappedRegionError("2m/r reached 1 inside a cell")
    return out, iters, rr, rm


def evolve_quadrant(scenario, spacing=None, grid=None, tol=1e-12,
                    max_iter=60, mu_cap=0.9, substeps=8):
    """Fill the corner patch of a scenario from its two data rays.

    Either a spacing (the patch extents then come from the scenario) or a
    ready QuadrantGrid may be passed.  mu_cap aborts the march when 2m/r
    exceeds it anywhere, which keeps the patch clear of the trapped
    regime rather than failing inside the kernel.
    """
    if grid is None:
        if spacing is None:
            raise ValueError("pass either spacing or grid")
        grid = QuadrantGrid(spacing, -scenario.u_extent, 0.0,
                            0.0, scenario.v_extent)
    dd = grid.spacing
    vals = np.zeros((grid.n_u, grid.n_v, NVARS))
    bottom, edge = quadrant_rays(scenario, grid, substeps=substeps)
    for k, nm in enumerate(("r", "phi", "m", "nu", "kappa", "zeta", "eta",
                            "xi", "N", "K", "Mint")):
        vals[:, 0, k] = bottom[nm]
        vals[-1, :, k] = edge[nm]
    fld = HardField(grid, vals, scenario=scenario)
    out = np.empty(NVARS)
    iters_max = 0
    rr_sup = 0.0
    rm_sup = 0.0
    for i in range(grid.n_u - 2, -1, -1):
        for j in range(1, grid.n_v):
            _, iters, rr, rm = advance_cell(
                vals[i, j - 1], vals[i + 1, j], -dd, dd,
                tol=tol, max_iter=max_iter, out=out)
            mu = 2.0 * out[2] / out[0]
            if mu > mu_cap:
                raise TrappedRegionError(
                    "2m/r = %.4f exceeds cap %.2f at u=%g v=%g"
                    % (mu, mu_cap, grid.u(i), grid.v(j)))
            vals[i, j] = out
            if iters > iters_max:
                iters_max = iters
            if rr > rr_sup:
                rr_sup = rr
            if rm > rm_sup:
                rm_sup = rm
    fld.iters_max = iters_max
    fld.resid_r_sup = rr_sup
    fld.resid_m_sup = rm_sup
    return fld
