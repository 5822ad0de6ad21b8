"""Kernel backend selection.

The hot inner loops (slot embedding, partial traces, slot permutations) have
two interchangeable implementations: a compiled extension (``bbgky_lab._accel``)
and a pure-numpy fallback. The compiled one is used when importable; set
``BBGKY_LAB_KERNELS=pure`` (or ``accel``) to force a choice.
"""

import os

from . import _pure

_requested = os.environ.get("BBGKY_LAB_KERNELS", "auto").lower()

if _requested in ("pure", "py"):
    _impl = _pure
elif _requested in ("accel", "cy", "auto"):
    try:
        from .. import _accel as _impl
    except ImportError:
        if _requested != "auto":
            raise
        _impl = _pure
else:
    raise ValueError(f"unknown BBGKY_LAB_KERNELS value: {_requested!r}")

embed = _impl.embed
ptrace = _impl.ptrace
permute = _impl.permute


def backend_name():
    """Name of the active kernel backend ('accel' or 'pure')."""
    return _impl.name


def backends():
    """All importable backends, for cross-checks and benchmarks."""
    found = {"pure": _pure}
    try:
        from .. import _accel
        found["accel"] = _accel
    except ImportError:
        pass
    return found
