"""Turning shots into Pauli expectation values, energies and magnetizations.

Every single-term estimate carries the binomial standard error
``sqrt((1 - mean**2) / shots)``. Energy and magnetization errors combine
those in quadrature, treating the terms as independent even when they come
from the same circuit; correlations between terms are deliberately ignored.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MissingInputError, ValidationError
from .spin_model import PauliTerm, SpinChainModel
from .statevector import (NoiseSpec, QuantumState, ShotRecord, run_circuit, sample,
                          sample_trajectories)

log = logging.getLogger(__name__)

BACKENDS = ("ideal_sampled", "noisy")
BASES = ("Z", "X")
DEFAULT_SHOTS = 4096


@dataclass(frozen=True)
class ExpectationEstimate:
    observable: PauliTerm
    mean: float
    std_error: float
    n_shots: int

    @classmethod
    def from_mean(cls, observable, mean, n_shots):
        mean = float(mean)
        return cls(observable, mean, binomial_std_error(mean, n_shots), int(n_shots))


def binomial_std_error(mean: float, n_shots: int) -> float:
    return math.sqrt(max(0.0, 1.0 - mean * mean) / n_shots)


@dataclass(frozen=True)
class PlanEntry:
    h: float
    basis: str
    circuit: tuple
    n_shots: int
    initial_state: object = None


@dataclass(frozen=True)
class MeasurementPlan:
    n_spins: int
    coupling: float
    entries: tuple

    def __post_init__(self):
        by_h = {}
        for e in self.entries:
            by_h.setdefault(e.h, []).append(e)
        for h, pair in by_h.items():
            if sorted(e.basis for e in pair) != ["X", "Z"]:
                raise ValidationError(f"h={h}: need exactly one Z and one X entry")
            if pair[0].circuit != pair[1].circuit:
                raise ValidationError(f"h={h}: Z and X entries must share the circuit")

    @property
    def fields(self):
        return sorted({e.h for e in self.entries})


@dataclass(frozen=True)
class BackendResult:
    h: float
    energy: float
    energy_err: float
    abs_mz: float
    mz_err: float
    x_mean: float
    zz_mean: float
    estimates: tuple


def build_plan(n_spins, coupling, circuits_by_h, n_shots=DEFAULT_SHOTS, states_by_h=None):
    """One Z and one X entry per field value, ordered by (h, basis Z then X).

    ``circuits_by_h`` maps h to the ansatz gate list; ``states_by_h``
    optionally maps h to a prepared initial state the circuit acts on.
    """
    if n_shots < 1:
        raise ValidationError(f"shots must be >= 1, got {n_shots}")
    states_by_h = states_by_h or {}
    entries = []
    for h in sorted(set(circuits_by_h) | set(states_by_h)):
        circuit = tuple(circuits_by_h.get(h, ()))
        init = states_by_h.get(h)
        for basis in BASES:
            entries.append(PlanEntry(float(h), basis, circuit, int(n_shots), init))
    return MeasurementPlan(n_spins, float(coupling), tuple(entries))


def _check_term(term: PauliTerm, basis: str, n: int):
    term.check_sites(n)
    if basis == "Z" and term.kind == "X":
        raise ValidationError(f"{term.label()} is not diagonal in the Z basis")
    if basis == "X" and term.kind != "X":
        raise ValidationError(f"{term.label()} cannot be read from an X-basis record")


def expectations_from_shots(record: ShotRecord, terms) -> list:
    """Estimate Pauli terms diagonal in the record's basis.

    X-basis records come from a Hadamard-rotated register, so ``X_i`` is read
    off bit ``i`` exactly as ``Z_i`` would be.
    """
    spins = 1.0 - 2.0 * record.bits.astype(np.float64)
    out = []
    for term in terms:
        _check_term(term, record.basis, record.n_qubits)
        if term.kind == "ZZ":
            i, j = term.sites
            values = spins[:, i] * spins[:, j]
        else:
            values = spins[:, term.sites[0]]
        # (count(+1) - count(-1)) / shots, from integer counts
        plus = int(np.count_nonzero(values > 0))
        mean = (2 * plus - record.n_shots) / record.n_shots
        out.append(ExpectationEstimate.from_mean(term, mean, record.n_shots))
    return out


def reconstruct_energy(model: SpinChainModel, zz_estimates, x_estimates):
    """E = -J sum <Z_i Z_{i+1}> - h sum <X_i>, errors added in quadrature."""
    if len(zz_estimates) != model.n_spins - 1 or len(x_estimates) != model.n_spins:
        raise ValidationError(
            f"need {model.n_spins - 1} bond and {model.n_spins} site estimates, "
            f"got {len(zz_estimates)} and {len(x_estimates)}")
    j, h = model.coupling, model.field
    energy = -j * sum(e.mean for e in zz_estimates) - h * sum(e.mean for e in x_estimates)
    var = (j * j * sum(e.std_error ** 2 for e in zz_estimates)
           + h * h * sum(e.std_error ** 2 for e in x_estimates))
    return energy, math.sqrt(var)


def absolute_magnetization(z_estimates):
    """|mean of <Z_i>| and the standard error of the signed mean."""
    n = len(z_estimates)
    if n == 0:
        raise ValidationError("no site estimates given")
    mean = sum(e.mean for e in z_estimates) / n
    err = math.sqrt(sum(e.std_error ** 2 for e in z_estimates)) / n
    return abs(mean), err


def z_terms(n):
    return [PauliTerm.z(i) for i in range(n)] + [PauliTerm.zz(i, i + 1) for i in range(n - 1)]


def x_terms(n):
    return [PauliTerm.x(i) for i in range(n)]


def _execute(entry: PlanEntry, n_spins, backend, noise, seed_seq) -> ShotRecord:
    rng = np.random.default_rng(seed_seq)
    init = None
    if entry.initial_state is not None:
        init = QuantumState.from_vector(entry.initial_state)
    if backend == "ideal_sampled":
        state = run_circuit(list(entry.circuit), n_qubits=n_spins, initial=init)
        return sample(state, entry.basis, entry.n_shots, seed=rng)
    return sample_trajectories(list(entry.circuit), entry.basis, entry.n_shots, noise,
                               seed=rng, n_qubits=n_spins, initial=init)


def assemble_result(model: SpinChainModel, z_record: ShotRecord, x_record: ShotRecord):
    n = model.n_spins
    z_est = expectations_from_shots(z_record, z_terms(n))
    x_est = expectations_from_shots(x_record, x_terms(n))
    site_z, bonds = z_est[:n], z_est[n:]
    energy, energy_err = reconstruct_energy(model, bonds, x_est)
    abs_mz, mz_err = absolute_magnetization(site_z)
    return BackendResult(
        h=model.field,
        energy=energy,
        energy_err=energy_err,
        abs_mz=abs_mz,
        mz_err=mz_err,
        x_mean=float(np.mean([e.mean for e in x_est])),
        zz_mean=float(np.mean([e.mean for e in bonds])),
        estimates=tuple(z_est + x_est),
    )


@dataclass(frozen=True)
class ShotArchiveRecord:
    h: float
    basis: str
    seed: object
    entry: int
    n_shots: int
    counts: dict


def run_batched_job(plan: MeasurementPlan, backend="ideal_sampled", noise=None, seed=0,
                    workers=1, archive=None):
    """Execute every plan entry as one unit and return a result per field value.

    Entry ``k`` draws from the ``k``-th child of ``SeedSequence(seed)``, so
    results do not depend on execution order or on ``workers``. If
    ``archive`` is a list, one :class:`ShotArchiveRecord` per entry is
    appended to it.
    """
    if backend not in BACKENDS:
        raise ValidationError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "noisy" and noise is None:
        noise = NoiseSpec()
    entries = plan.entries
    children = np.random.SeedSequence(seed).spawn(len(entries))

    def run(k):
        return _execute(entries[k], plan.n_spins, backend, noise, children[k])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run, range(len(entries))))
    else:
        records = [run(k) for k in range(len(entries))]

    if archive is not None:
        for k, (e, rec) in enumerate(zip(entries, records)):
            archive.append(ShotArchiveRecord(e.h, e.basis, seed, k, e.n_shots, rec.counts()))

    by_h = {}
    for e, rec in zip(entries, records):
        by_h.setdefault(e.h, {})[e.basis] = rec
    results = []
    for h in sorted(by_h):
        model = SpinChainModel(plan.n_spins, plan.coupling, h)
        results.append(assemble_result(model, by_h[h]["Z"], by_h[h]["X"]))
    log.info("batched job: backend=%s circuits=%d fields=%d", backend, len(entries), len(results))
    return results


def run_stored_parameters(records, spec, coupling, backend="ideal_sampled", noise=None,
                          n_shots=DEFAULT_SHOTS, seed=0, workers=1, archive=None, fields=None):
    """Build the plan from stored VQE parameter records and run it.

    ``fields`` restricts the run to the listed h values; any value without a
    stored record raises :class:`MissingInputError`.
    """
    from .ansatz import build_circuit

    by_h = {r.h: r for r in records}
    wanted = sorted(by_h) if fields is None else [float(h) for h in fields]
    missing = [h for h in wanted if h not in by_h]
    if missing:
        raise MissingInputError(f"no stored parameters for h = {missing}")
    circuits = {h: build_circuit(spec, by_h[h].parameters(spec.n_spins)) for h in wanted}
    plan = build_plan(spec.n_spins, coupling, circuits, n_shots)
    return run_batched_job(plan, backend, noise, seed, workers, archive)


# shot archive ----------------------------------------------------------------

ARCHIVE_FIELDS = ("h", "basis", "seed", "entry", "shots", "counts")


def write_shot_archive(path, records):
    """Tab-separated; ``counts`` is ``bits:count`` pairs joined by commas, bits site 0 first."""
    lines = ["\t".join(ARCHIVE_FIELDS)]
    for r in records:
        counts = ",".join(f"{k}:{v}" for k, v in sorted(r.counts.items()))
        lines.append(f"{r.h!r}\t{r.basis}\t{r.seed}\t{r.entry}\t{r.n_shots}\t{counts}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_shot_archive(path):
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"shot archive not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or tuple(lines[0].split("\t")) != ARCHIVE_FIELDS:
        raise ValidationError(f"{path}: unexpected header")
    out = []
    for line in lines[1:]:
        h, basis, seed, entry, shots, counts = line.split("\t")
        parsed = {}
        for item in filter(None, counts.split(",")):
            bits, c = item.split(":")
            parsed[bits] = int(c)
        out.append(ShotArchiveRecord(float(h), basis, seed, int(entry), int(shots), parsed))
    return out


def record_from_counts(counts: dict, basis: str) -> ShotRecord:
    """Rebuild a :class:`ShotRecord` (rows grouped by outcome) from archived counts."""
    rows = []
    for bits, c in sorted(counts.items()):
        rows.extend([[int(b) for b in bits]] * c)
    arr = np.array(rows, dtype=np.uint8)
    return ShotRecord(arr, basis, arr.shape[0])
