"""Transverse-field Ising chain benchmarks.

Exact diagonalization, a layered RZZ/RX variational ansatz optimized on a
noiseless statevector, and shot-sampled (optionally noise-emulated)
execution of the optimized circuits, with error metrics comparing them.
"""

__version__ = "0.1.0"

from .ansatz import AnsatzParameters, AnsatzSpec, OptimizerConfig, VqeResult  # noqa: E402
from .spin_model import PauliTerm, SpinChainModel, build_hamiltonian, expectation  # noqa: E402
from .statevector import GateOp, NoiseSpec, QuantumState  # noqa: E402

__all__ = [
    "AnsatzParameters",
    "AnsatzSpec",
    "GateOp",
    "NoiseSpec",
    "OptimizerConfig",
    "PauliTerm",
    "QuantumState",
    "SpinChainModel",
    "VqeResult",
    "build_hamiltonian",
    "expectation",
]
