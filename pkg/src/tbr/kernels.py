"""Kernel backend selection.

The compiled extension (tbr._ckernels) is preferred; the numpy lane
(tbr._pykernels) is the fallback.  Set TBR_KERNEL_BACKEND=py or =c to force
a lane at import time; forcing "c" when the extension is missing raises.
"""

import os

from . import _pykernels

_requested = os.environ.get("TBR_KERNEL_BACKEND", "").strip().lower()

if _requested == "py":
    _impl = _pykernels
elif _requested == "c":
    from . import _ckernels as _impl
elif _requested == "":
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
else:
    raise ValueError(f"TBR_KERNEL_BACKEND must be 'c' or 'py', got {_requested!r}")


def backend_name() -> str:
    """Name of the active lane: 'c' (compiled) or 'py' (numpy)."""
    return "c" if _impl.__name__.endswith("_ckernels") else "py"


def get_backend(name: str):
    """Fetch a specific lane module, e.g. for cross-checking or benchmarks."""
    if name == "py":
        return _pykernels
    if name == "c":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


flat_bin_index = _impl.flat_bin_index
accumulate = _impl.accumulate
subtract_lookup = _impl.subtract_lookup
