"""Backend selection for the PSD verdict kernels.

SEPVOL_BACKEND picks the implementation:

    auto   (default) use numba when importable, else numpy
    numba  require the compiled kernel, raise if numba is missing
    numpy  force the pure-numpy fallback

Both backends produce bitwise identical verdicts; the benchmark command
compares their throughput on the same draws.
"""

import os

from . import numpy_impl

__all__ = ["get_backend", "backend_name", "available_backends", "set_backend"]

_forced = None


def _load_numba():
    from . import numba_impl

    return numba_impl


def available_backends():
    names = ["numpy"]
    try:
        import numba  # noqa: F401

        names.insert(0, "numba")
    except ImportError:
        pass
    return names


def get_backend():
    """Resolve the active backend module (honors SEPVOL_BACKEND)."""
    choice = _forced or os.environ.get("SEPVOL_BACKEND", "auto").lower()
    if choice in ("", "auto"):
        try:
            return _load_numba()
        except ImportError:
            return numpy_impl
    if choice == "numba":
        return _load_numba()
    if choice == "numpy":
        return numpy_impl
    raise ValueError(
        "SEPVOL_BACKEND=%r not understood (auto, numba, or numpy)" % choice
    )


def set_backend(name):
    """Programmatic override (None restores the environment choice)."""
    global _forced
    if name is not None and name not in ("auto", "numba", "numpy"):
        raise ValueError("backend %r not understood" % (name,))
    _forced = name


def backend_name():
    return get_backend().NAME
