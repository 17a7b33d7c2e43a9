"""One-dimensional interpolation and differentiation stencils.

Weights are generated with Fornberg's recursion, so any derivative order
(including order zero, plain interpolation) can be evaluated at an
arbitrary point inside a window of grid nodes.  A window of n nodes gives
consistency order n - m for the m-th derivative, which is how the rest of
the package guarantees its advertised orders.
"""

import numpy as np

from .errors import StencilError


def fornberg_weights(x0, xs, m):
    """Weights w such that sum(w * f(xs)) approximates the m-th derivative
    of f at x0.  xs must hold distinct nodes; m = 0 gives interpolation
    weights.  Returns an array shaped like xs."""
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    if m < 0:
        raise ValueError("derivative order must be nonnegative")
    if n < m + 1:
        raise StencilError(
            "need at least %d nodes for derivative order %d, got %d"
            % (m + 1, m, n)
        )
    # B. Fornberg, "Generation of finite difference formulas on arbitrarily
    # spaced grids", Math. Comp. 51 (1988). c[j, k] is the weight of node j
    # for derivative order k.
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def pick_window(n_nodes, start, stop, center, width):
    """Index of the first node of a width-node window inside [start, stop)
    placed as symmetrically as possible around fractional index center.
    Raises StencilError when fewer than width nodes are available."""
    if stop - start < width:
        raise StencilError(
            "window of %d nodes does not fit in a line of %d"
            % (width, stop - start)
        )
    lo = int(np.floor(center)) - (width - 1) // 2
    lo = max(start, min(lo, stop - width))
    return lo


def apply_line(values, xs, x0, m, width):
    """Evaluate the m-th derivative (m = 0: value) of the data (xs, values)
    at x0 using a width-node window centered near x0."""
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    if n < width:
        width = n
    if width < m + 2 and not (m == 0 and width == 1):
        raise StencilError(
            "%d nodes cannot deliver order-2 consistency for derivative %d"
            % (width, m)
        )
    if n == width:
        lo = 0
    else:
        # Fractional index of x0 assuming nearly uniform spacing.
        h = (xs[-1] - xs[0]) / (n - 1)
        lo = pick_window(n, 0, n, (x0 - xs[0]) / h, width)
    w = fornberg_weights(x0, xs[lo:lo + width], m)
    return float(np.dot(w, values[lo:lo + width]))
