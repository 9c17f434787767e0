"""Hot loops with a compiled implementation and a pure-Python fallback.

The compiled extension is used when it was built and ``NCDYN_PURE`` is not
set to ``1``. ``BACKEND`` names the active choice.
"""
import os

from . import _heun_py

try:
    if os.environ.get("NCDYN_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _heun_ext
except ImportError:
    _heun_ext = None

BACKENDS = {"python": _heun_py.heun_memory}
if _heun_ext is not None:
    BACKENDS["cython"] = _heun_ext.heun_memory

BACKEND = "cython" if "cython" in BACKENDS else "python"
heun_memory = BACKENDS[BACKEND]
