"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``DELTATEST_PURE_PYTHON=1`` to force the numpy path.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("DELTATEST_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

subsample_sums = _impl.subsample_sums
ks_two_sample = _impl.ks_two_sample
