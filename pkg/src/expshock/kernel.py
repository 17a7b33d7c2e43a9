"""Kernel selection: compiled extension when available, pure python
otherwise.  Set EXPSHOCK_FORCE_PYTHON=1 to insist on the fallback (the
equivalence test and the benchmark both do)."""

import os

if os.environ.get("EXPSHOCK_FORCE_PYTHON"):
    from . import kernel_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import kernel_py as _impl
        BACKEND = "python"

solve_cell = _impl.solve_cell
NVARS = 11
