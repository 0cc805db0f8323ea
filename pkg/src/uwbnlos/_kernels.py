"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise
the pure-Python ``_pykernels`` module. Set ``UWBNLOS_PURE_PYTHON=1`` to
force the fallback.
"""

import os

if os.environ.get("UWBNLOS_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

BACKEND = "compiled" if _impl.__name__.endswith("_ckernels") else "python"

log_gamma = _impl.log_gamma
ggd_excess_kurtosis = _impl.ggd_excess_kurtosis
ggd_variance_factor = _impl.ggd_variance_factor
invert_kurtosis = _impl.invert_kurtosis
ggd_log_pdf = _impl.ggd_log_pdf
rolling_variance = _impl.rolling_variance
best_threshold = _impl.best_threshold

__all__ = [
    "BACKEND",
    "log_gamma",
    "ggd_excess_kurtosis",
    "ggd_variance_factor",
    "invert_kurtosis",
    "ggd_log_pdf",
    "rolling_variance",
    "best_threshold",
]
