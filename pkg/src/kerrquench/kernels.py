"""Backend selection for the hot kernels.

The compiled ``_speedups`` extension is used when it imports; otherwise the
numpy implementations in ``_fallback`` take over. Setting the environment
variable ``KERRQUENCH_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _fallback

if os.environ.get("KERRQUENCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "python"

convolve_direct = _impl.convolve_direct
kerr_series = _impl.kerr_series
composition_autocorr = _impl.composition_autocorr


def available_backends():
    """Return a dict name -> kernel module for every importable backend."""
    backends = {"python": _fallback}
    try:
        from . import _speedups
    except ImportError:
        pass
    else:
        backends["cython"] = _speedups
    return backends
