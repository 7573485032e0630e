"""Backend selection for the batched kernels.

The compiled Cython module is used when it was built; otherwise the numpy
implementation with identical arithmetic takes over.  Both expose
``bell_teleport``, ``singlet_pairs`` and ``photon_trips``.
"""
from qct import _kernels_py as python_impl

try:
    from qct import _kernels as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

impl = compiled_impl if compiled_impl is not None else python_impl
BACKEND = impl.BACKEND


def available():
    """Names of the importable backends, fastest first."""
    return [m.BACKEND for m in (compiled_impl, python_impl) if m is not None]


def get(name=None):
    if name is None:
        return impl
    for m in (compiled_impl, python_impl):
        if m is not None and m.BACKEND == name:
            return m
    raise ValueError(f"kernel backend {name!r} is not available (have {available()})")
