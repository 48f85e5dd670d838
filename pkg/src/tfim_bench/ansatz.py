"""Layered RZZ/RX ansatz and its variational optimization.

Each layer applies RZZ on bonds (0,1), (1,2), ... in ascending order and
then RX on every site. Circuits start from ``|0...0>``, the classical
ground state at zero field, so the all-zero parameter vector reproduces
energy ``-J (N - 1)`` exactly.

``per_gate`` gives every gate its own angle, laid out layer by layer as
``[zz_0 .. zz_{N-2}, x_0 .. x_{N-1}]``; ``per_layer`` shares one ZZ angle
and one RX angle per layer, laid out ``[zz, x]`` per layer.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from dataclasses import field as dc_field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import MissingInputError, ValidationError
from .optimize import SimplexCoefficients, nelder_mead
from .spin_model import SpinChainModel
from .statevector import GateOp, QuantumState, compile_circuit

log = logging.getLogger(__name__)

PER_GATE = "per_gate"
PER_LAYER = "per_layer"
PARAMETER_MODES = (PER_GATE, PER_LAYER)


@dataclass(frozen=True)
class AnsatzSpec:
    n_spins: int
    depth: int = 2
    parameter_mode: str = PER_GATE

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValidationError(f"n_spins must be >= 2, got {self.n_spins}")
        if self.depth < 1:
            raise ValidationError(f"depth must be >= 1, got {self.depth}")
        if self.parameter_mode not in PARAMETER_MODES:
            raise ValidationError(f"parameter_mode must be one of {PARAMETER_MODES}")

    @property
    def gates_per_layer(self) -> int:
        return 2 * self.n_spins - 1

    @property
    def n_parameters(self) -> int:
        if self.parameter_mode == PER_GATE:
            return self.depth * self.gates_per_layer
        return 2 * self.depth

    def gate_angles(self, values) -> np.ndarray:
        """Expand a parameter vector to one angle per gate, in circuit order."""
        theta = np.asarray(values, dtype=np.float64)
        if theta.shape != (self.n_parameters,):
            raise ValidationError(
                f"expected {self.n_parameters} parameters, got shape {theta.shape}")
        if self.parameter_mode == PER_GATE:
            return theta.copy()
        zz = self.n_spins - 1
        per_layer = [np.concatenate([np.full(zz, theta[2 * l]),
                                     np.full(self.n_spins, theta[2 * l + 1])])
                     for l in range(self.depth)]
        return np.concatenate(per_layer)


@dataclass(frozen=True)
class AnsatzParameters:
    values: np.ndarray
    spec: AnsatzSpec

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.spec.n_parameters,):
            raise ValidationError(
                f"{self.spec} takes {self.spec.n_parameters} parameters, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, spec):
        return cls(np.zeros(spec.n_parameters), spec)


@dataclass(frozen=True)
class OptimizerConfig:
    max_evaluations: int = 2000
    spread_tol: float = 1e-8
    restarts: int = 4
    init_scale: float = 0.1
    simplex_step: float = 0.25
    coefficients: SimplexCoefficients = SimplexCoefficients()
    # fresh simplices started at a claimed minimum; 0 disables
    polish_rounds: int = 10


@dataclass
class VqeResult:
    energy: float
    parameters: AnsatzParameters
    iterations: int
    converged: bool
    restarts_used: int
    evaluations: int = 0
    field: float = 0.0
    seed: object = None
    best_histories: list = dc_field(default_factory=list, repr=False)


def build_circuit(spec: AnsatzSpec, params) -> list:
    values = params.values if isinstance(params, AnsatzParameters) else params
    angles = spec.gate_angles(values)
    n = spec.n_spins
    circuit = []
    k = 0
    for _ in range(spec.depth):
        for i in range(n - 1):
            circuit.append(GateOp.rzz(i, i + 1, angles[k]))
            k += 1
        for i in range(n):
            circuit.append(GateOp.rx(i, angles[k]))
            k += 1
    return circuit


def prepare_state(spec: AnsatzSpec, params) -> QuantumState:
    """Noiseless ansatz state."""
    state = QuantumState.zeros(spec.n_spins)
    kernels.apply_ops(state.amplitudes, *compile_circuit(build_circuit(spec, params), spec.n_spins))
    return state


class EnergyFunction:
    """Callable ``theta -> <psi(theta)|H|psi(theta)>`` with the circuit structure precompiled."""

    def __init__(self, spec: AnsatzSpec, model: SpinChainModel):
        if spec.n_spins != model.n_spins:
            raise ValidationError(
                f"ansatz has {spec.n_spins} spins but the model has {model.n_spins}")
        self.spec = spec
        self.model = model
        zero = build_circuit(spec, np.zeros(spec.n_parameters))
        self._kinds, self._a, self._b, _ = compile_circuit(zero, spec.n_spins)
        self._psi = np.zeros(model.dimension, dtype=np.complex128)
        self.calls = 0

    def __call__(self, theta) -> float:
        self.calls += 1
        angles = self.spec.gate_angles(theta)
        psi = self._psi
        psi[:] = 0.0
        psi[0] = 1.0
        kernels.apply_ops(psi, self._kinds, self._a, self._b, angles)
        return float(kernels.tfim_energy(psi, self.model.n_spins,
                                         self.model.coupling, self.model.field))


def energy_of(params, spec: AnsatzSpec, model: SpinChainModel) -> float:
    values = params.values if isinstance(params, AnsatzParameters) else params
    return EnergyFunction(spec, model)(values)


def _starting_points(spec, config, warm_start, rng):
    """Restart 0 begins exactly at theta = 0; the rest are small random perturbations."""
    starts = []
    if warm_start is not None:
        starts.append(np.array(warm_start.values, dtype=np.float64))
    starts.append(np.zeros(spec.n_parameters))
    for _ in range(config.restarts - 1):
        starts.append(rng.uniform(-config.init_scale, config.init_scale, spec.n_parameters))
    return starts


def _descend(objective, x0, config):
    """One restart: a simplex run, then re-started simplices while they keep improving.

    A collapsed simplex can report convergence on a flat valley floor; a new
    simplex built around that point either confirms it or moves on. Runs
    that exhaust their evaluation budget are not polished.
    """
    kwargs = dict(step=config.simplex_step, max_evaluations=config.max_evaluations,
                  spread_tol=config.spread_tol, coefficients=config.coefficients)
    res = nelder_mead(objective, x0, **kwargs)
    history, nit = list(res.best_history), res.nit
    for _ in range(config.polish_rounds):
        if not res.converged:
            break
        again = nelder_mead(objective, res.x, **kwargs)
        history.extend(again.best_history)
        nit += again.nit
        improved = again.fun < res.fun - config.spread_tol
        if again.fun < res.fun:
            res = again
        if not improved:
            break
    return res, history, nit


def optimize(spec: AnsatzSpec, model: SpinChainModel, config: OptimizerConfig = OptimizerConfig(),
             warm_start: AnsatzParameters | None = None, seed=None) -> VqeResult:
    """Multi-start Nelder-Mead minimization of the ansatz energy; keeps the best restart."""
    if config.restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got {config.restarts}")
    if warm_start is not None and warm_start.spec != spec:
        raise ValidationError("warm start was produced for a different ansatz")
    objective = EnergyFunction(spec, model)
    rng = np.random.default_rng(seed)
    best = None
    histories = []
    total_iterations = 0
    for x0 in _starting_points(spec, config, warm_start, rng):
        res, history, nit = _descend(objective, x0, config)
        histories.append(history)
        total_iterations += nit
        if best is None or res.fun < best.fun:
            best = res
    log.debug("vqe h=%.4f E=%.10f evals=%d", model.field, best.fun, objective.calls)
    return VqeResult(
        energy=best.fun,
        parameters=AnsatzParameters(best.x, spec),
        iterations=total_iterations,
        converged=best.converged,
        restarts_used=len(histories),
        evaluations=objective.calls,
        field=model.field,
        seed=seed,
        best_histories=histories,
    )


def vqe_sweep(spec: AnsatzSpec, model: SpinChainModel, field_grid,
              config: OptimizerConfig = OptimizerConfig(), seed=0) -> list:
    """Optimize along ``field_grid`` in the given order, warm-starting each point from the last.

    Each grid point gets its own RNG stream derived from ``seed`` and its
    position, so the result at a point does not depend on how long earlier
    points took.
    """
    grid = [float(h) for h in field_grid]
    if not grid:
        raise ValidationError("field grid is empty")
    streams = np.random.SeedSequence(seed).spawn(len(grid))
    results = []
    previous = None
    for h, stream in zip(grid, streams):
        res = optimize(spec, model.with_field(h), config, warm_start=previous,
                       seed=np.random.default_rng(stream))
        res.seed = seed
        results.append(res)
        previous = res.parameters
    return results


# parameter store -------------------------------------------------------------

STORE_FIELDS = ("h", "depth", "mode", "seed", "energy", "theta")


@dataclass(frozen=True)
class ParameterRecord:
    h: float
    depth: int
    mode: str
    seed: object
    energy: float
    theta: tuple

    def parameters(self, n_spins: int) -> AnsatzParameters:
        return AnsatzParameters(np.array(self.theta), AnsatzSpec(n_spins, self.depth, self.mode))


def records_from_results(spec: AnsatzSpec, results) -> list:
    return [ParameterRecord(r.field, spec.depth, spec.parameter_mode, r.seed, r.energy,
                            tuple(float(v) for v in r.parameters.values))
            for r in results]


def write_parameter_store(path, records):
    """Tab-separated, one record per grid point; ``theta`` is space-separated, full precision."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(STORE_FIELDS)
        for r in records:
            w.writerow([repr(float(r.h)), r.depth, r.mode, r.seed, repr(float(r.energy)),
                        " ".join(repr(v) for v in r.theta)])


def read_parameter_store(path) -> list:
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"parameter store not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        if tuple(reader.fieldnames or ()) != STORE_FIELDS:
            raise ValidationError(f"{path}: unexpected header {reader.fieldnames}")
        return [ParameterRecord(float(row["h"]), int(row["depth"]), row["mode"],
                                row["seed"], float(row["energy"]),
                                tuple(float(v) for v in row["theta"].split()))
                for row in reader]
