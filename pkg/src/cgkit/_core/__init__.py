"""Hot-kernel loading: compiled extension when available, pure Python otherwise.

Set ``CGKIT_DISABLE_COMPILED=1`` to force the pure-Python kernels (used by
the benchmark script to compare both backends).
"""

import os

from cgkit._core import hungarian_py

if os.environ.get("CGKIT_DISABLE_COMPILED", "") == "1":
    _assignment_fast = None
else:
    try:
        from cgkit._core._assignment import solve as _assignment_fast
    except ImportError:
        _assignment_fast = None

HAVE_COMPILED = _assignment_fast is not None


def backend():
    """Name of the active assignment kernel."""
    return "compiled" if HAVE_COMPILED else "python"


def assignment_kernel(prefer_compiled=True):
    """Return (callable, name) for the float64 assignment kernel."""
    if prefer_compiled and _assignment_fast is not None:
        return _assignment_fast, "compiled"
    return (lambda cost: hungarian_py.solve(cost.tolist())), "python"
