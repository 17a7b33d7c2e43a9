"""Grids and scalar fields for the three coordinate patches.

Three layouts cover everything the solvers produce:

* NullGrid -- the triangular wedge 0 <= v <= u <= tau_hat in double-null
  coordinates, stored row-compressed (row i holds i + 1 nodes).
* QuadrantGrid -- a rectangular double-null patch, used for the corner
  neighborhood where data is posed on the two rays through the origin.
* ComovingGrid -- a rectangular (tau, chi) patch whose past boundary may
  be a curve tau = past(chi); nodes under the curve are masked out.

interpolate_field and finite_difference work on any of them by composing
one-dimensional stencils line by line, which keeps the triangular and
masked layouts honest: every line only ever uses its own valid nodes.
"""

from math import floor

import numpy as np

from .errors import DomainError, StencilError
from .stencils import apply_line

_FUZZ = 1e-9


class NullGrid(object):
    """Triangular double-null grid {0 <= v_j <= u_i <= tau_hat}, u_i = i*spacing."""

    def __init__(self, spacing, tau_hat):
        if spacing <= 0 or tau_hat <= 0:
            raise ValueError("spacing and tau_hat must be positive")
        self.spacing = float(spacing)
        n_rows = int(round(tau_hat / spacing)) + 1
        if abs((n_rows - 1) * spacing - tau_hat) > _FUZZ * tau_hat:
            raise ValueError("tau_hat must be an integer multiple of spacing")
        self.tau_hat = float(tau_hat)
        self.n_rows = n_rows
        # Row i starts at offset i*(i+1)/2 in the flat value array.
        self.offsets = np.array([i * (i + 1) // 2 for i in range(n_rows + 1)])
        self.n_nodes = int(self.offsets[-1])

    def u(self, i):
        return i * self.spacing

    def v(self, j):
        return j * self.spacing

    def row_length(self, i):
        return i + 1

    def node_index(self, i, j):
        if not (0 <= j <= i < self.n_rows):
            raise DomainError("node (%d, %d) outside triangular grid" % (i, j))
        return int(self.offsets[i]) + j

    def contains(self, point):
        u, v = point
        fuzz = _FUZZ * max(1.0, self.tau_hat)
        return -fuzz <= v <= u + fuzz and u <= self.tau_hat + fuzz

    def bounds_text(self):
        return "0 <= v <= u <= %g" % self.tau_hat

    # Line decomposition: outer axis u (rows), inner axis v.
    def outer_coords(self):
        return np.arange(self.n_rows) * self.spacing

    def inner_coords(self, i):
        return np.arange(i + 1) * self.spacing

    def line_slice(self, i):
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    def split_point(self, point):
        # (outer, inner) ordering for the line machinery
        return point[0], point[1]

    def split_order(self, order):
        return order[0], order[1]

    def new_values(self):
        return np.zeros(self.n_nodes)


class QuadrantGrid(object):
    """Rectangular double-null patch [u_lo, u_hi] x [v_lo, v_hi]."""

    def __init__(self, spacing, u_lo, u_hi, v_lo, v_hi):
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        self.spacing = float(spacing)
        self.u_lo, self.u_hi = float(u_lo), float(u_hi)
        self.v_lo, self.v_hi = float(v_lo), float(v_hi)
        self.n_u = int(round((u_hi - u_lo) / spacing)) + 1
        self.n_v = int(round((v_hi - v_lo) / spacing)) + 1
        for count, lo, hi in ((self.n_u, u_lo, u_hi), (self.n_v, v_lo, v_hi)):
            if count < 2 or abs((count - 1) * spacing - (hi - lo)) > _FUZZ:
                raise ValueError("extent must be an integer multiple of spacing")

    def u(self, i):
        return self.u_lo + i * self.spacing

    def v(self, j):
        return self.v_lo + j * self.spacing

    def contains(self, point):
        u, v = point
        fuzz = _FUZZ * max(1.0, abs(self.u_hi - self.u_lo), abs(self.v_hi - self.v_lo))
        return (self.u_lo - fuzz <= u <= self.u_hi + fuzz
                and self.v_lo - fuzz <= v <= self.v_hi + fuzz)

    def bounds_text(self):
        return "u in [%g, %g], v in [%g, %g]" % (
            self.u_lo, self.u_hi, self.v_lo, self.v_hi)

    def outer_coords(self):
        return self.u_lo + np.arange(self.n_u) * self.spacing

    def inner_coords(self, i):
        return self.v_lo + np.arange(self.n_v) * self.spacing

    def split_point(self, point):
        return point[0], point[1]

    def split_order(self, order):
        return order[0], order[1]

    def new_values(self):
        return np.zeros((self.n_u, self.n_v))


class ComovingGrid(object):
    """Rectangular (tau, chi) grid with an optional past-boundary curve.

    past(chi) gives the earliest valid tau on the flow line chi; nodes
    strictly earlier are masked.  Points are passed as (tau, chi).
    """

    def __init__(self, dtau, dchi, tau_lo, tau_hi, chi_lo, chi_hi, past=None):
        if dtau <= 0 or dchi <= 0:
            raise ValueError("spacings must be positive")
        self.dtau, self.dchi = float(dtau), float(dchi)
        self.tau_lo, self.tau_hi = float(tau_lo), float(tau_hi)
        self.chi_lo, self.chi_hi = float(chi_lo), float(chi_hi)
        self.n_tau = int(round((tau_hi - tau_lo) / dtau)) + 1
        self.n_chi = int(round((chi_hi - chi_lo) / dchi)) + 1
        if self.n_tau < 2 or self.n_chi < 1:
            raise ValueError("grid too small")
        self.past = past
        # First valid tau index per chi column.
        starts = np.zeros(self.n_chi, dtype=int)
        if past is not None:
            for c in range(self.n_chi):
                floor_tau = past(self.chi(c))
                k = int(np.ceil((floor_tau - tau_lo) / dtau - _FUZZ))
                starts[c] = max(0, k)
                if starts[c] > self.n_tau - 2:
                    raise ValueError(
                        "past boundary leaves fewer than two nodes on a line")
        self.col_start = starts

    def tau(self, k):
        return self.tau_lo + k * self.dtau

    def chi(self, c):
        return self.chi_lo + c * self.dchi

    def contains(self, point):
        tau, chi = point
        fuzz = _FUZZ * max(1.0, self.tau_hi - self.tau_lo)
        if not (self.chi_lo - fuzz <= chi <= self.chi_hi + fuzz):
            return False
        floor_tau = self.tau_lo if self.past is None else self.past(chi)
        return floor_tau - fuzz <= tau <= self.tau_hi + fuzz

    def bounds_text(self):
        return "chi in [%g, %g], tau in [past(chi), %g]" % (
            self.chi_lo, self.chi_hi, self.tau_hi)

    # Outer axis chi (columns), inner axis tau, so every line is one flow line.
    def outer_coords(self):
        return self.chi_lo + np.arange(self.n_chi) * self.dchi

    def inner_coords(self, c):
        return self.tau_lo + np.arange(self.col_start[c], self.n_tau) * self.dtau

    def split_point(self, point):
        return point[1], point[0]

    def split_order(self, order):
        return order[1], order[0]

    def new_values(self):
        return np.full((self.n_chi, self.n_tau), np.nan)


class ScalarField(object):
    """Values attached to the nodes of one of the grids above."""

    def __init__(self, grid, values, name=""):
        values = np.asarray(values, dtype=float)
        if isinstance(grid, NullGrid):
            if values.shape != (grid.n_nodes,):
                raise ValueError("expected %d row-compressed values" % grid.n_nodes)
        elif isinstance(grid, QuadrantGrid):
            if values.shape != (grid.n_u, grid.n_v):
                raise ValueError("expected shape (%d, %d)" % (grid.n_u, grid.n_v))
        elif isinstance(grid, ComovingGrid):
            if values.shape != (grid.n_chi, grid.n_tau):
                raise ValueError("expected shape (%d, %d)" % (grid.n_chi, grid.n_tau))
        else:
            raise TypeError("unsupported grid type %r" % type(grid))
        self.grid = grid
        self.values = values
        self.name = name
        if isinstance(grid, ComovingGrid):
            for c in range(grid.n_chi):
                line = values[c, grid.col_start[c]:]
                if not np.all(np.isfinite(line)):
                    raise ValueError("non-finite values on line %d of %r" % (c, name))
        elif not np.all(np.isfinite(values)):
            raise ValueError("non-finite values in field %r" % name)

    def line_values(self, i):
        grid = self.grid
        if isinstance(grid, NullGrid):
            return self.values[grid.line_slice(i)]
        if isinstance(grid, QuadrantGrid):
            return self.values[i]
        return self.values[i, grid.col_start[i]:]

    def value(self, i, j):
        if isinstance(self.grid, NullGrid):
            return self.values[self.grid.node_index(i, j)]
        return self.values[i, j]


def _line_count(grid):
    if isinstance(grid, NullGrid):
        return grid.n_rows
    if isinstance(grid, QuadrantGrid):
        return grid.n_u
    return grid.n_chi


def _evaluate(field, point, order):
    """Shared engine for interpolation (order (0, 0)) and differentiation."""
    grid = field.grid
    if not grid.contains(point):
        raise DomainError(
            "point (%g, %g) outside grid: %s"
            % (point[0], point[1], grid.bounds_text()))
    xo, xi = grid.split_point(point)
    mo, mi = grid.split_order(order)
    if mo < 0 or mi < 0 or mo + mi > 3:
        raise ValueError("derivative order must be a pair with total <= 3")
    width_i = 4 if mi == 0 else mi + 2
    width_o = 4 if mo == 0 else mo + 2

    outer = grid.outer_coords()
    n_lines = _line_count(grid)
    if n_lines < width_o:
        if mo > 0:
            raise StencilError(
                "only %d lines available, need %d for derivative order %d"
                % (n_lines, width_o, mo))
        width_o = n_lines
    if n_lines == 1:
        lo = 0
    else:
        h = outer[1] - outer[0]
        lo = int(floor((xo - outer[0]) / h)) - (width_o - 1) // 2
        lo = max(0, min(lo, n_lines - width_o))
    vals = np.empty(width_o)
    for a in range(width_o):
        line = lo + a
        vals[a] = apply_line(field.line_values(line), grid.inner_coords(line),
                             xi, mi, width_i)
    if width_o == 1:
        return float(vals[0])
    return apply_line(vals, outer[lo:lo + width_o], xo, mo, width_o)


def interpolate_field(field, point):
    """Value of the field at an arbitrary point of its grid, locally
    polynomial (cubic inside, lower order against boundaries)."""
    return _evaluate(field, point, (0, 0))


def finite_difference(field, point, order):
    """Mixed partial derivative of the field at a point.  order is a pair
    of nonnegative ints in the same coordinate ordering as the point, with
    total degree at most 3; consistency order is at least 2."""
    return _evaluate(field, point, order)
