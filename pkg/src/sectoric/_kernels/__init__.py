"""Integer hot loops with a compiled backend and a pure-Python fallback.

The compiled module is used when it was built and imports cleanly. Setting
``SECTORIC_PURE_PYTHON=1`` forces the fallback, which is handy for
debugging and for comparing the two in benchmarks.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SECTORIC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

box_points = _active.box_points
first_undecomposable = _active.first_undecomposable
min_inversions = _active.min_inversions

__all__ = [
    "BACKEND",
    "box_points",
    "compiled_backend",
    "first_undecomposable",
    "min_inversions",
    "python_backend",
]
