import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfim_bench import reference
from tfim_bench.ansatz import (AnsatzSpec, build_circuit, prepare_state, records_from_results,
                               vqe_sweep)
from tfim_bench.errors import MissingInputError, ValidationError
from tfim_bench.estimator import (ExpectationEstimate, MeasurementPlan, PlanEntry,
                                  absolute_magnetization, binomial_std_error, build_plan,
                                  expectations_from_shots, read_shot_archive,
                                  reconstruct_energy, record_from_counts, run_batched_job,
                                  run_stored_parameters, write_shot_archive, x_terms, z_terms)
from tfim_bench.exact import diagonalize
from tfim_bench.spin_model import (PauliTerm, SpinChainModel, build_hamiltonian, expectation,
                                   hamiltonian_terms)
from tfim_bench.statevector import NoiseSpec, ShotRecord

from conftest import random_state

MODEL = SpinChainModel(4, 1.0, 0.0)


def exact_estimate(term, value):
    return ExpectationEstimate(term, value, 0.0, 1)


def record(rows, basis="Z"):
    arr = np.array(rows, dtype=np.uint8)
    return ShotRecord(arr, basis, arr.shape[0])


@pytest.fixture(scope="module")
def stored():
    spec = AnsatzSpec(4, 2)
    results = vqe_sweep(spec, MODEL, reference.FIELDS, seed=0)
    return spec, results, records_from_results(spec, results)


def test_all_up_record():
    (est,) = expectations_from_shots(record([[0, 0, 0, 0]] * 1000), [PauliTerm.z(0)])
    assert est.mean == 1.0 and est.std_error == 0.0


def test_ghz_like_counts():
    rec = record([[0, 0]] * 500 + [[1, 1]] * 500)
    zz, z0 = expectations_from_shots(rec, [PauliTerm.zz(0, 1), PauliTerm.z(0)])
    assert (zz.mean, zz.std_error) == (1.0, 0.0)
    assert z0.mean == 0.0
    assert z0.std_error == pytest.approx(math.sqrt(1 / 1000), abs=1e-15)


def test_std_error_arithmetic():
    assert binomial_std_error(0.5, 4096) == pytest.approx(0.013532, abs=1e-6)
    assert binomial_std_error(-1.0, 7) == 0.0
    assert binomial_std_error(0.0, 1) == 1.0


@settings(max_examples=200, deadline=None)
@given(plus=st.integers(0, 10_000), extra=st.integers(1, 10_000))
def test_std_error_closed_form(plus, extra):
    n = plus + extra
    bits = np.zeros((n, 1), np.uint8)
    bits[plus:] = 1
    (est,) = expectations_from_shots(ShotRecord(bits, "Z", n), [PauliTerm.z(0)])
    assert est.mean == (plus - extra) / n
    assert abs(est.std_error - math.sqrt((1 - est.mean**2) / n)) <= 1e-12


def test_term_basis_mismatch():
    with pytest.raises(ValidationError):
        expectations_from_shots(record([[0, 0]]), [PauliTerm.x(0)])
    with pytest.raises(ValidationError):
        expectations_from_shots(record([[0, 0]], "X"), [PauliTerm.zz(0, 1)])
    with pytest.raises(ValidationError):
        expectations_from_shots(record([[0, 0]]), [PauliTerm.z(2)])


def test_x_record_reads_x_terms():
    rec = record([[0, 1]] * 3 + [[0, 0]], "X")
    x0, x1 = expectations_from_shots(rec, [PauliTerm.x(0), PauliTerm.x(1)])
    assert x0.mean == 1.0 and x1.mean == -0.5


@pytest.mark.parametrize("h, x_mean, zz_mean, energy",
                         [(h, x, zz, e) for h, _, x, zz, e in reference.HARDWARE_OBSERVABLES])
def test_energy_from_averaged_observables(h, x_mean, zz_mean, energy):
    model = MODEL.with_field(h)
    zz = [exact_estimate(PauliTerm.zz(i, i + 1), zz_mean) for i in range(3)]
    x = [exact_estimate(PauliTerm.x(i), x_mean) for i in range(4)]
    e, err = reconstruct_energy(model, zz, x)
    assert e == pytest.approx(energy, abs=1e-3)
    assert err == 0.0


def test_reconstruct_energy_errors_in_quadrature():
    model = SpinChainModel(3, 2.0, 0.5)
    zz = [ExpectationEstimate(PauliTerm.zz(i, i + 1), 0.1, 0.03, 100) for i in range(2)]
    x = [ExpectationEstimate(PauliTerm.x(i), 0.2, 0.04, 100) for i in range(3)]
    e, err = reconstruct_energy(model, zz, x)
    assert e == pytest.approx(-2.0 * 0.2 - 0.5 * 0.6)
    assert err == pytest.approx(math.sqrt(4 * 2 * 0.03**2 + 0.25 * 3 * 0.04**2))
    with pytest.raises(ValidationError):
        reconstruct_energy(model, zz[:1], x)


def test_energy_identity_on_exact_expectations(rng):
    for n, h in [(3, 0.4), (4, 1.0), (5, 1.7)]:
        model = SpinChainModel(n, 1.3, h)
        psi = random_state(rng, 2**n)
        terms = [t for _, t in hamiltonian_terms(model)]
        zz = [exact_estimate(t, expectation(t, psi)) for t in terms if t.kind == "ZZ"]
        x = [exact_estimate(t, expectation(t, psi)) for t in terms if t.kind == "X"]
        e, _ = reconstruct_energy(model, zz, x)
        assert e == pytest.approx(expectation(build_hamiltonian(model), psi), abs=1e-12)


def test_absolute_magnetization():
    down = [exact_estimate(PauliTerm.z(i), -1.0) for i in range(4)]
    assert absolute_magnetization(down) == (1.0, 0.0)
    mixed = [exact_estimate(PauliTerm.z(i), s) for i, s in enumerate([1, 1, -1, -1])]
    assert absolute_magnetization(mixed)[0] == 0.0
    noisy = [ExpectationEstimate(PauliTerm.z(i), 0.5, 0.02, 10) for i in range(4)]
    assert absolute_magnetization(noisy)[1] == pytest.approx(0.01)
    with pytest.raises(ValidationError):
        absolute_magnetization([])


def test_plan_has_two_entries_per_field(stored):
    spec, results, _ = stored
    circuits = {r.field: build_circuit(spec, r.parameters) for r in results}
    plan = build_plan(4, 1.0, circuits, 128)
    assert len(plan.entries) == 10
    assert [(e.h, e.basis) for e in plan.entries[:2]] == [(0.2, "Z"), (0.2, "X")]
    archive = []
    out = run_batched_job(plan, seed=1, archive=archive)
    assert len(archive) == 10 and len(out) == 5


def test_plan_validation():
    with pytest.raises(ValidationError):
        MeasurementPlan(4, 1.0, (PlanEntry(0.2, "Z", (), 10), PlanEntry(0.2, "Z", (), 10)))
    with pytest.raises(ValidationError):
        build_plan(4, 1.0, {0.2: []}, 0)


def test_batched_job_determinism(stored):
    spec, _, records = stored
    a = run_stored_parameters(records, spec, 1.0, "noisy", n_shots=2000, seed=9)
    b = run_stored_parameters(records, spec, 1.0, "noisy", n_shots=2000, seed=9, workers=4)
    assert a == b
    c = run_stored_parameters(records, spec, 1.0, "noisy", n_shots=2000, seed=10)
    assert a != c


def test_missing_parameter_record(stored):
    spec, _, records = stored
    with pytest.raises(MissingInputError):
        run_stored_parameters(records, spec, 1.0, fields=[0.2, 0.5])


def test_unknown_backend(stored):
    spec, _, records = stored
    with pytest.raises(ValidationError):
        run_stored_parameters(records, spec, 1.0, backend="hardware")


def test_sampled_magnetization_matches_statevector(stored):
    spec, results, records = stored
    r = results[2]
    assert r.field == 1.0
    psi = prepare_state(spec, r.parameters).amplitudes
    exact_mz = abs(np.mean([expectation(PauliTerm.z(i), psi) for i in range(4)]))
    (out,) = run_stored_parameters(records, spec, 1.0, n_shots=100_000, seed=4, fields=[1.0])
    assert abs(out.abs_mz - exact_mz) < 3 * out.mz_err


def test_ground_state_injection_energy():
    model = MODEL.with_field(1.0)
    ground = diagonalize(build_hamiltonian(model)).ground_vector
    plan = build_plan(4, 1.0, {}, 100_000, states_by_h={1.0: ground})
    (out,) = run_batched_job(plan, seed=2)
    assert abs(out.energy - -4.7588) < 3 * out.energy_err


def test_noise_suppresses_correlations(stored):
    spec, _, records = stored
    kw = dict(n_shots=20_000, seed=3, fields=[1.8])
    (ideal,) = run_stored_parameters(records, spec, 1.0, "ideal_sampled", **kw)
    (noisy,) = run_stored_parameters(records, spec, 1.0, "noisy", noise=NoiseSpec(), **kw)
    assert noisy.zz_mean < ideal.zz_mean


def test_result_energy_matches_its_estimates(stored):
    spec, _, records = stored
    for res in run_stored_parameters(records, spec, 1.0, n_shots=500, seed=0):
        est = {e.observable: e for e in res.estimates}
        zz = [est[PauliTerm.zz(i, i + 1)] for i in range(3)]
        x = [est[PauliTerm.x(i)] for i in range(4)]
        assert reconstruct_energy(MODEL.with_field(res.h), zz, x) == (res.energy, res.energy_err)
        assert 0.0 <= res.abs_mz <= 1.0
        for e in res.estimates:
            assert e.std_error == math.sqrt((1 - e.mean**2) / e.n_shots)


def test_single_shot():
    plan = build_plan(2, 1.0, {0.5: []}, 1)
    (out,) = run_batched_job(plan, seed=0)
    for e in out.estimates:
        assert e.n_shots == 1 and abs(e.mean) == 1.0 and e.std_error == 0.0


def test_shot_archive_roundtrip(stored, tmp_path):
    spec, _, records = stored
    archive = []
    results = run_stored_parameters(records, spec, 1.0, n_shots=300, seed=5, archive=archive)
    path = tmp_path / "shots.tsv"
    write_shot_archive(path, archive)
    back = read_shot_archive(path)
    assert [r.counts for r in back] == [r.counts for r in archive]
    assert [(r.h, r.basis, r.entry) for r in back] == [(r.h, r.basis, r.entry) for r in archive]
    # replaying the archived counts reproduces the estimates
    z = record_from_counts(back[0].counts, "Z")
    est = expectations_from_shots(z, z_terms(4))
    assert [e.mean for e in est] == [e.mean for e in results[0].estimates[:7]]
    x = record_from_counts(back[1].counts, "X")
    assert [e.mean for e in expectations_from_shots(x, x_terms(4))] == \
        [e.mean for e in results[0].estimates[7:]]


def test_shot_archive_errors(tmp_path):
    with pytest.raises(MissingInputError):
        read_shot_archive(tmp_path / "none.tsv")
    (tmp_path / "bad.tsv").write_text("h\tbasis\n")
    with pytest.raises(ValidationError):
        read_shot_archive(tmp_path / "bad.tsv")
