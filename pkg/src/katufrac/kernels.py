"""Backend selection for the product-integration kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``KATUFRAC_PURE=1`` to force the fallback and
``KATUFRAC_THREADS`` to cap the OpenMP thread count of the compiled path.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("KATUFRAC_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def thread_count():
    raw = os.environ.get("KATUFRAC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return os.cpu_count() or 1
    return max(1, n)


def weight_row(u, j, alpha):
    return _impl.weight_row(u, j, alpha)


def weight_matrix(u, alpha):
    if _impl is _kernels_py:
        return _impl.weight_matrix(u, alpha)
    return _impl.weight_matrix(u, alpha, thread_count())


def integrate_all(u, values, alpha):
    if _impl is _kernels_py:
        return _impl.integrate_all(u, values, alpha)
    return _impl.integrate_all(u, values, alpha, thread_count())
