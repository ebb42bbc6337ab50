"""Search kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it was built and importable; setting
``CONDREG_PURE_PYTHON=1`` forces the fallback. The compiled backend handles
at most 64 fluents, so ``for_fluents`` routes larger domains to Python.
"""

import os

from . import _pykernels as python

try:
    if os.environ.get("CONDREG_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

default = compiled if compiled is not None else python
BACKEND = default.NAME


def get_backend(name: str = "auto"):
    if name == "auto":
        return default
    if name == "python":
        return python
    if name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available in this install")
        return compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def for_fluents(n: int, name: str = "auto"):
    backend = get_backend(name)
    if backend.MAX_FLUENTS is not None and n > backend.MAX_FLUENTS:
        if name == "compiled":
            raise ValueError(f"compiled kernels support at most {backend.MAX_FLUENTS} fluents")
        return python
    return backend
