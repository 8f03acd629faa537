"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python twin is used.  Setting ``KEPLAMBERT_PURE_PYTHON=1`` forces the
fallback.  Both backends expose the same functions.
"""
import os

from . import _pykernels

if os.environ.get("KEPLAMBERT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
KernelConvergenceError = _pykernels.KernelConvergenceError

kepler_elliptic = _impl.kepler_elliptic
kepler_hyperbolic = _impl.kepler_hyperbolic
stumpff_c2c3 = _impl.stumpff_c2c3
universal_tof = _impl.universal_tof
universal_tof_split = _impl.universal_tof_split
u_minus_sin = _impl.u_minus_sin
sinh_minus = _impl.sinh_minus
conic_scale = _impl.conic_scale
conic_state = _impl.conic_state
conic_anomaly = _impl.conic_anomaly
conic_tof = _impl.conic_tof
arc_anomalies = _impl.arc_anomalies
arc_tof = _impl.arc_tof
propagate = _impl.propagate

STATUS_OK = _pykernels.STATUS_OK
STATUS_COLLISION = _pykernels.STATUS_COLLISION
STATUS_MAX_STEPS = _pykernels.STATUS_MAX_STEPS


def available_backends():
    """Map backend name -> module for every backend importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
