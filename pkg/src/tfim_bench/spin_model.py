"""Open transverse-field Ising chains and their Pauli terms as dense matrices.

Conventions used throughout the package:

* site ``i`` is bit ``i`` of a basis-state index (site 0 is the least
  significant bit);
* ``|0>`` is the ``Z = +1`` eigenstate, so ``Z_i`` acts on index ``k`` as
  ``(-1) ** ((k >> i) & 1)`` and ``X_i`` maps ``k`` to ``k ^ (1 << i)``.

Operators are plain ``float64`` ndarrays of shape ``(2**N, 2**N)``; all terms
of the model are real symmetric in this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

MAX_SPINS = 12
NORM_TOL = 1e-10
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class SpinChainModel:
    """H = -J sum_i Z_i Z_{i+1} - h sum_i X_i on an open chain of N spins."""

    n_spins: int
    coupling: float = 1.0
    field: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        if self.boundary != "open":
            raise ValidationError(
                f"only open boundary conditions are supported, got {self.boundary!r}")
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValidationError(f"n_spins must be an integer >= 2, got {self.n_spins}")
        if self.n_spins > MAX_SPINS:
            raise DimensionError(
                f"n_spins={self.n_spins} exceeds the dense limit of {MAX_SPINS}")
        if not math.isfinite(self.coupling) or self.coupling <= 0:
            raise ValidationError(f"coupling must be finite and > 0, got {self.coupling}")
        if not math.isfinite(self.field):
            raise ValidationError(f"field must be finite, got {self.field}")

    @property
    def dimension(self) -> int:
        return 1 << self.n_spins

    def with_field(self, field: float) -> "SpinChainModel":
        return SpinChainModel(self.n_spins, self.coupling, float(field), self.boundary)


@dataclass(frozen=True)
class PauliTerm:
    """One of ``Z_i``, ``X_i`` or ``Z_i Z_j``; ``kind`` is ``"Z"``, ``"X"`` or ``"ZZ"``."""

    kind: str
    sites: tuple

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if self.kind in ("Z", "X"):
            if len(sites) != 1:
                raise ValidationError(f"{self.kind} term takes one site, got {sites}")
        elif self.kind == "ZZ":
            if len(sites) != 2 or sites[0] == sites[1]:
                raise ValidationError(f"ZZ term needs two distinct sites, got {sites}")
        else:
            raise ValidationError(f"unknown Pauli term kind {self.kind!r}")
        if min(sites) < 0:
            raise ValidationError(f"negative site index in {sites}")

    @classmethod
    def z(cls, i):
        return cls("Z", (i,))

    @classmethod
    def x(cls, i):
        return cls("X", (i,))

    @classmethod
    def zz(cls, i, j):
        return cls("ZZ", (i, j))

    @property
    def is_diagonal(self) -> bool:
        return self.kind != "X"

    def label(self) -> str:
        if self.kind == "ZZ":
            return f"Z{self.sites[0]}Z{self.sites[1]}"
        return f"{self.kind}{self.sites[0]}"

    def check_sites(self, n_spins: int):
        if max(self.sites) >= n_spins:
            raise ValidationError(
                f"term {self.label()} has a site outside [0, {n_spins})")


def z_signs(n_spins: int, site: int) -> np.ndarray:
    """Diagonal of ``Z_site``: +1 where the bit is 0, -1 where it is 1."""
    k = np.arange(1 << n_spins)
    return 1.0 - 2.0 * ((k >> site) & 1)


def term_matrix(term: PauliTerm, n_spins: int) -> np.ndarray:
    if n_spins < 1:
        raise ValidationError(f"n_spins must be >= 1, got {n_spins}")
    if n_spins > MAX_SPINS:
        raise DimensionError(f"n_spins={n_spins} exceeds the dense limit of {MAX_SPINS}")
    term.check_sites(n_spins)
    dim = 1 << n_spins
    if term.kind == "Z":
        return np.diag(z_signs(n_spins, term.sites[0]))
    if term.kind == "ZZ":
        i, j = term.sites
        return np.diag(z_signs(n_spins, i) * z_signs(n_spins, j))
    k = np.arange(dim)
    out = np.zeros((dim, dim))
    out[k ^ (1 << term.sites[0]), k] = 1.0
    return out


def hamiltonian_terms(model: SpinChainModel):
    """Yield ``(coefficient, PauliTerm)`` pairs that sum to the Hamiltonian."""
    for i in range(model.n_spins - 1):
        yield -model.coupling, PauliTerm.zz(i, i + 1)
    for i in range(model.n_spins):
        yield -model.field, PauliTerm.x(i)


def build_hamiltonian(model: SpinChainModel) -> np.ndarray:
    n = model.n_spins
    dim = model.dimension
    k = np.arange(dim)
    diag = np.zeros(dim)
    for i in range(n - 1):
        diag -= model.coupling * z_signs(n, i) * z_signs(n, i + 1)
    h = np.diag(diag)
    for i in range(n):
        h[k ^ (1 << i), k] -= model.field
    h.setflags(write=False)
    return h


def _apply_term(term: PauliTerm, state: np.ndarray, n_spins: int) -> np.ndarray:
    if term.kind == "Z":
        return z_signs(n_spins, term.sites[0]) * state
    if term.kind == "ZZ":
        i, j = term.sites
        return z_signs(n_spins, i) * z_signs(n_spins, j) * state
    k = np.arange(state.shape[0])
    return state[k ^ (1 << term.sites[0])]


def expectation(op, state) -> float:
    """<psi|O|psi> for a dense operator or a :class:`PauliTerm`.

    The state must be normalized within 1e-10. An imaginary residue above
    1e-10 raises, since every operator handled here is Hermitian.
    """
    psi = np.asarray(state, dtype=np.complex128).ravel()
    dim = psi.shape[0]
    if dim == 0 or dim & (dim - 1):
        raise ValidationError(f"state length {dim} is not a power of two")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"state is not normalized (norm^2 = {norm!r})")
    if isinstance(op, PauliTerm):
        n_spins = dim.bit_length() - 1
        op.check_sites(n_spins)
        value = np.vdot(psi, _apply_term(op, psi, n_spins))
    else:
        mat = np.asarray(op)
        if mat.shape != (dim, dim):
            raise ValidationError(
                f"operator shape {mat.shape} does not match state length {dim}")
        value = np.vdot(psi, mat @ psi)
    if abs(value.imag) > IMAG_TOL:
        raise ValidationError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)
