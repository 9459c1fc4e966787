"""Backend selection for the hot loops.

The compiled ``_kernels`` extension is used when importable; otherwise the
numpy versions in ``_fallback`` are used. Set ``MONOFOURIER_BACKEND=python``
to force the fallback.
"""
import os

from . import _fallback

BACKENDS = {"python": _fallback}

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None
else:
    BACKENDS["cython"] = _kernels

if os.environ.get("MONOFOURIER_BACKEND", "").lower() == "python" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]

wht_inplace = _impl.wht_inplace
char_means = _impl.char_means
eval_spectrum = _impl.eval_spectrum
coord_bin_stats = _impl.coord_bin_stats
far_from_all = _impl.far_from_all
