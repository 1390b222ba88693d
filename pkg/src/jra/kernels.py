"""Kernel dispatch: compiled ``_core`` when built, ``_core_py`` otherwise.

>>> from jra import kernels
>>> kernels.BACKEND in ("cython", "python")
True
"""

from . import _core_py

try:
    from . import _core as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_impl = _compiled if _compiled is not None else _core_py
BACKEND = "cython" if _compiled is not None else "python"


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


def use_backend(name):
    """Switch the active kernel implementation ("cython" or "python")."""
    global _impl, BACKEND
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _impl = _compiled
    elif name == "python":
        _impl = _core_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def lap(cost):
    return _impl.lap(cost)


def two_factor(cost, avail, b_item, b_place):
    return _impl.two_factor(cost, avail, b_item, b_place)
