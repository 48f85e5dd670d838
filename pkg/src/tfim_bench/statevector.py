"""Complex statevector simulation of RX / RZZ / HAD circuits with shot sampling.

Gate conventions::

    RX(t)  = exp(-i t X / 2) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
    RZZ(t) = exp(-i t Z(x)Z / 2)   phase e^{-it/2} if the two bits agree, e^{+it/2} otherwise
    HAD    = [[1, 1], [1, -1]] / sqrt(2)

Noise is emulated by stochastic Pauli trajectories: after every single-qubit
gate a uniformly random X, Y or Z hits the qubit with probability ``p1``;
after every two-qubit gate one of the 15 non-identity Pauli pairs hits the
pair with probability ``p2``. Readout flips each measured bit with
probability ``p_readout``.

All randomness is drawn from ``numpy.random.Generator`` in Python and handed
to the kernels as arrays, so numba and numpy paths consume identical streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ValidationError

NORM_TOL = 1e-10
_KIND_CODES = {"RX": kernels.RX, "RZZ": kernels.RZZ, "HAD": kernels.HAD}
# noisy shots are simulated in blocks to bound memory of the numpy batch path
SHOT_BLOCK = 1 << 15


@dataclass(frozen=True)
class GateOp:
    kind: str
    sites: tuple
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "angle", float(self.angle))
        if self.kind not in _KIND_CODES:
            raise ValidationError(f"unknown gate {self.kind!r}")
        want = 2 if self.kind == "RZZ" else 1
        if len(self.sites) != want:
            raise ValidationError(f"{self.kind} takes {want} site(s), got {self.sites}")
        if want == 2 and self.sites[0] == self.sites[1]:
            raise ValidationError(f"RZZ sites must differ, got {self.sites}")

    @classmethod
    def rx(cls, site, angle):
        return cls("RX", (site,), angle)

    @classmethod
    def rzz(cls, a, b, angle):
        return cls("RZZ", (a, b), angle)

    @classmethod
    def had(cls, site):
        return cls("HAD", (site,))

    @property
    def n_qubits(self):
        return len(self.sites)


@dataclass(frozen=True)
class NoiseSpec:
    p1: float = 0.002
    p2: float = 0.02
    p_readout: float = 0.03

    def __post_init__(self):
        for name in ("p1", "p2", "p_readout"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ValidationError(f"{name} must lie in [0, 1), got {p}")


@dataclass
class QuantumState:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValidationError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, "
                f"got shape {self.amplitudes.shape}")

    @classmethod
    def zeros(cls, n_qubits):
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_vector(cls, vector):
        vec = np.asarray(vector, dtype=np.complex128).ravel()
        n = vec.shape[0].bit_length() - 1
        return cls(n, vec.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag

    def copy(self) -> "QuantumState":
        return QuantumState(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class ShotRecord:
    """Measured bits, one row per shot; column ``i`` is the bit of site ``i``."""

    bits: np.ndarray
    basis: str
    n_shots: int

    def __post_init__(self):
        if self.basis not in ("Z", "X"):
            raise ValidationError(f"basis must be 'Z' or 'X', got {self.basis!r}")
        if self.bits.ndim != 2 or self.bits.shape[0] != self.n_shots:
            raise ValidationError("bit array does not match the shot count")

    @property
    def n_qubits(self) -> int:
        return self.bits.shape[1]

    def bitstrings(self):
        """Text form, site 0 first (leftmost)."""
        return ["".join("1" if b else "0" for b in row) for row in self.bits]

    def counts(self) -> dict:
        """``{bitstring: count}`` over observed outcomes, bitstrings site 0 first."""
        n = self.n_qubits
        idx = self.bits.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
        freq = np.bincount(idx, minlength=1 << n)
        return {"".join("1" if (k >> i) & 1 else "0" for i in range(n)): int(freq[k])
                for k in np.flatnonzero(freq)}


def _check_sites(gate: GateOp, n_qubits: int):
    if max(gate.sites) >= n_qubits or min(gate.sites) < 0:
        raise ValidationError(f"{gate.kind} on sites {gate.sites} outside a {n_qubits}-qubit register")


def compile_circuit(circuit, n_qubits):
    """Encode gates as the integer/float arrays the kernels consume."""
    g = len(circuit)
    kinds = np.empty(g, dtype=np.int64)
    site_a = np.empty(g, dtype=np.int64)
    site_b = np.empty(g, dtype=np.int64)
    angles = np.empty(g, dtype=np.float64)
    for i, gate in enumerate(circuit):
        _check_sites(gate, n_qubits)
        kinds[i] = _KIND_CODES[gate.kind]
        site_a[i] = gate.sites[0]
        site_b[i] = gate.sites[-1]
        angles[i] = gate.angle
    return kinds, site_a, site_b, angles


def apply_gate(state: QuantumState, gate: GateOp) -> QuantumState:
    out = state.copy()
    kernels.apply_ops(out.amplitudes, *compile_circuit([gate], state.n_qubits))
    return out


def run_circuit(circuit, n_qubits=None, initial=None) -> QuantumState:
    if initial is None:
        if n_qubits is None:
            raise ValidationError("need n_qubits or an initial state")
        state = QuantumState.zeros(n_qubits)
    else:
        state = initial.copy()
    if circuit:
        kernels.apply_ops(state.amplitudes, *compile_circuit(circuit, state.n_qubits))
    return state


def basis_rotation(basis: str, n_qubits: int):
    if basis == "Z":
        return []
    if basis == "X":
        return [GateOp.had(i) for i in range(n_qubits)]
    raise ValidationError(f"basis must be 'Z' or 'X', got {basis!r}")


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _index_bits(indices, n_qubits):
    return ((indices[:, np.newaxis] >> np.arange(n_qubits)) & 1).astype(np.uint8)


def _readout(bits, noise, rng):
    if noise is None or noise.p_readout == 0.0:
        return bits
    flips = rng.random(bits.shape) < noise.p_readout
    return bits ^ flips.astype(np.uint8)


def sample(state: QuantumState, basis: str, n_shots: int, seed=None, noise=None) -> ShotRecord:
    """Projective measurement of ``state`` in the Z or X basis.

    Only readout noise applies here; gate noise belongs to
    :func:`sample_trajectories`.
    """
    if n_shots < 1:
        raise ValidationError(f"n_shots must be >= 1, got {n_shots}")
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise ValidationError(f"state is not normalized (norm {state.norm()!r})")
    rng = _as_rng(seed)
    rotated = run_circuit(basis_rotation(basis, state.n_qubits), initial=state)
    u = rng.random(n_shots)
    idx = kernels.sample_state(rotated.amplitudes, u)
    bits = _readout(_index_bits(idx, state.n_qubits), noise, rng)
    return ShotRecord(bits, basis, n_shots)


def _draw_errors(rng, n_rows, kinds, noise):
    u = rng.random((n_rows, kinds.shape[0]))
    pick = rng.integers(0, 15, size=(n_rows, kinds.shape[0]))
    prob = np.where(kinds == kernels.RZZ, noise.p2, noise.p1)
    return u < prob, pick


def run_noisy_trajectory(circuit, noise: NoiseSpec, seed=None, n_qubits=None,
                         initial=None) -> QuantumState:
    """One stochastic trajectory of ``circuit`` under Pauli gate noise."""
    state = run_circuit([], n_qubits=n_qubits, initial=initial)
    if not circuit:
        return state
    rng = _as_rng(seed)
    ops = compile_circuit(circuit, state.n_qubits)
    fire, pick = _draw_errors(rng, 1, ops[0], noise)
    kernels.noisy_trajectory(state.amplitudes, *ops, fire[0], pick[0])
    return state


def sample_trajectories(circuit, basis: str, n_shots: int, noise: NoiseSpec, seed=None,
                        n_qubits=None, initial=None) -> ShotRecord:
    """Noisy execution: one independent trajectory per shot, then readout noise.

    The basis-change Hadamards are part of the executed circuit and so pick
    up single-qubit gate noise like any other gate.
    """
    if n_shots < 1:
        raise ValidationError(f"n_shots must be >= 1, got {n_shots}")
    start = run_circuit([], n_qubits=n_qubits, initial=initial)
    if abs(start.norm() - 1.0) > NORM_TOL:
        raise ValidationError("initial state is not normalized")
    n = start.n_qubits
    rng = _as_rng(seed)
    ops = compile_circuit(list(circuit) + basis_rotation(basis, n), n)
    blocks = []
    done = 0
    while done < n_shots:
        m = min(SHOT_BLOCK, n_shots - done)
        fire, pick = _draw_errors(rng, m, ops[0], noise)
        u = rng.random(m)
        blocks.append(kernels.noisy_sample(start.amplitudes, *ops, fire, pick, u))
        done += m
    idx = np.concatenate(blocks)
    bits = _readout(_index_bits(idx, n), noise, rng)
    return ShotRecord(bits, basis, n_shots)
