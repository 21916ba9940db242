"""Selects the elimination backend at import time.

The compiled Cython kernel (sparserank._speedups) is preferred; the numpy
fallback (sparserank._elim_py) has identical semantics.  Set the environment
variable SPARSE_RANK_BACKEND to "py" or "c" to force one side (anything else,
or unset, means auto).
"""

from __future__ import annotations

import os

_choice = os.environ.get("SPARSE_RANK_BACKEND", "auto").lower()

if _choice == "py":
    from . import _elim_py as impl
elif _choice == "c":
    from . import _speedups as impl  # type: ignore[no-redef]
else:
    try:
        from . import _speedups as impl  # type: ignore[no-redef]
    except ImportError:  # extension not built; fall back silently
        from . import _elim_py as impl  # type: ignore[no-redef]


def backend_name() -> str:
    return impl.BACKEND


rref_gf2 = impl.rref_gf2
rref_modq = impl.rref_modq
