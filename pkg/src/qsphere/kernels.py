"""Backend selection for the integer polynomial kernels.

The compiled extension ``qsphere._kernels`` is used when it was built;
otherwise the pure-Python module with identical semantics is loaded.
Set ``QSPHERE_PURE_PYTHON=1`` to force the fallback.
"""

import os
from functools import lru_cache

if os.environ.get("QSPHERE_PURE_PYTHON"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl
        BACKEND = "python"

trim = _impl.trim
padd = _impl.padd
psub = _impl.psub
pneg = _impl.pneg
pscale = _impl.pscale
pshift = _impl.pshift
pmul = _impl.pmul
pcontent = _impl.pcontent
pdivexact = _impl.pdivexact
# the same denominators recur constantly, so gcds are memoised
pgcd = lru_cache(maxsize=1 << 17)(_impl.pgcd)
peval_one = _impl.peval_one

__all__ = ["BACKEND", "trim", "padd", "psub", "pneg", "pscale", "pshift",
           "pmul", "pcontent", "pdivexact", "pgcd", "peval_one"]
