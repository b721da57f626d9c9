import pytest

from sectoric import _kernels

KERNEL_NAMES = ("box_points", "first_undecomposable", "min_inversions")

BACKENDS = ["python"]
if _kernels.compiled_backend is not None:
    BACKENDS.append("cython")


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the duration of a test."""
    module = _kernels.python_backend if request.param == "python" else _kernels.compiled_backend
    for name in KERNEL_NAMES:
        monkeypatch.setattr(_kernels, name, getattr(module, name))
    return request.param
