"""Selects the fitting kernel at import time.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_purefit`` module.  Setting ``LINDLEY_EST_PURE=1`` forces the
fallback.
"""
import os

from . import _purefit

kernels = _purefit
NAME = "python"

if os.environ.get("LINDLEY_EST_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as kernels  # noqa: F811
        NAME = "cython"
    except ImportError:  # extension not built
        pass
