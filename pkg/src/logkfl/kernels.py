"""Selects the elimination kernel.

The compiled ``_elim`` extension is used when it imports; otherwise the
pure-Python ``_elim_py`` implementation is used.  Setting the environment
variable ``LOGKFL_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _elim_py

BACKEND = "python"
_compiled = None

if not os.environ.get("LOGKFL_PURE_PYTHON"):
    try:
        from . import _elim as _compiled
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _compiled = None


def unit_eliminate(indptr, indices, data, ncols, modulus=0, prime=0, backend=None):
    """Dispatch to the selected kernel; see ``_elim_py.unit_eliminate``.

    The compiled kernel works in 64-bit arithmetic.  Integer-mode overflow and
    moduli past its range are retried in the exact Python kernel.
    """
    use = backend or BACKEND
    if use == "compiled" and _compiled is not None and modulus < (1 << 31):
        try:
            return _compiled.unit_eliminate(indptr, indices, data, ncols, modulus, prime)
        except OverflowError:
            pass
    return _elim_py.unit_eliminate(indptr, indices, data, ncols, modulus, prime)
