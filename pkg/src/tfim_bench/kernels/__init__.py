"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba kernels are used when numba imports cleanly and the environment
variable ``TFIM_BENCH_DISABLE_NUMBA`` is unset (or ``0``). Both paths share
signatures, so callers never branch on the backend.
"""

import os

from . import _numpy
from .codes import HAD, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, RX, RZZ

DISABLE_ENV = "TFIM_BENCH_DISABLE_NUMBA"

_KERNEL_NAMES = (
    "apply_ops",
    "noisy_trajectory",
    "sample_state",
    "noisy_sample",
    "tfim_energy",
    "jacobi_eigh",
)


def _numba_module():
    if os.environ.get(DISABLE_ENV, "").strip() not in ("", "0"):
        return None
    try:
        from . import _numba
    except ImportError:
        return None
    return _numba


def implementations():
    """Return ``{"numpy": module, "numba": module}`` for whatever is importable."""
    impls = {"numpy": _numpy}
    try:
        from . import _numba
    except ImportError:
        pass
    else:
        impls["numba"] = _numba
    return impls


_active = _numba_module()
BACKEND = "numba" if _active is not None else "numpy"
_impl = _active if _active is not None else _numpy

apply_ops = _impl.apply_ops
noisy_trajectory = _impl.noisy_trajectory
sample_state = _impl.sample_state
noisy_sample = _impl.noisy_sample
tfim_energy = _impl.tfim_energy
jacobi_eigh = _impl.jacobi_eigh

__all__ = [
    "BACKEND",
    "DISABLE_ENV",
    "HAD",
    "PAULI_I",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "RX",
    "RZZ",
    "implementations",
    *_KERNEL_NAMES,
]
