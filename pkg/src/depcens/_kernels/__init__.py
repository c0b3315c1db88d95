"""Kernel backend selection.

The hot numerical kernels exist twice: a compiled extension
(``depcens._kernels._native``) and a pure-NumPy fallback
(``depcens._kernels._numpy``).  The compiled one is preferred when it
imported cleanly; ``DEPCENS_BACKEND`` forces the choice (``native`` /
``numpy`` / ``auto``).
"""

import importlib
import os

from . import _numpy

_REQUESTED = os.environ.get("DEPCENS_BACKEND", "auto").strip().lower()


def load_backend(name: str):
    """Load a backend module by name ('numpy' or 'native')."""
    if name == "numpy":
        return _numpy
    if name == "native":
        return importlib.import_module("depcens._kernels._native")
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        load_backend("native")
        names.insert(0, "native")
    except ImportError:
        pass
    return names


if _REQUESTED in ("auto", ""):
    try:
        impl = load_backend("native")
    except ImportError:
        impl = _numpy
elif _REQUESTED in ("native", "compiled"):
    impl = load_backend("native")
elif _REQUESTED in ("numpy", "python", "pure"):
    impl = _numpy
else:
    raise ValueError(f"DEPCENS_BACKEND={_REQUESTED!r} is not a known backend")

BACKEND = impl.NAME

FRANK = _numpy.FRANK
GAUSSIAN = _numpy.GAUSSIAN
GUMBEL = _numpy.GUMBEL
