"""Numerical core with backend selection.

The compiled Cython extension is used when importable; otherwise the numpy
fallback takes over.  Set the environment variable ``LPSHIFT_BACKEND`` to
``python`` to force the fallback, or to ``compiled`` to insist on the
extension (raising if it is missing).  ``BACKEND`` records the choice.
"""

from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("LPSHIFT_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        f"LPSHIFT_BACKEND must be one of auto/compiled/python, got {_requested!r}"
    )

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _speedups as _impl
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError(
                "LPSHIFT_BACKEND=compiled but the lpshift._core._speedups "
                "extension is not built; run `pip install .` or "
                "`python setup.py build_ext --inplace`"
            ) from None

if _impl is None:
    _impl = _fallback
    BACKEND = "python"
else:
    BACKEND = "compiled"

moment_system = _impl.moment_system
knn_radii_pair = _impl.knn_radii_pair

__all__ = ["BACKEND", "moment_system", "knn_radii_pair"]
