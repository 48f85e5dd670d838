"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--csv out.csv]

Each kernel is called once untimed (numba compiles or loads its cache),
then timed ``--repeat`` times; the best time is reported.
"""

import argparse
import csv
import sys
import time

import numpy as np

from tfim_bench.ansatz import AnsatzSpec, build_circuit
from tfim_bench.kernels import implementations
from tfim_bench.spin_model import SpinChainModel, build_hamiltonian
from tfim_bench.kernels import RZZ
from tfim_bench.statevector import NoiseSpec, compile_circuit


def cases(rng, n_spins, shots, jacobi_spins):
    spec = AnsatzSpec(n_spins, 2)
    ops = compile_circuit(build_circuit(spec, rng.uniform(-1, 1, spec.n_parameters)), n_spins)
    dim = 1 << n_spins
    psi0 = np.zeros(dim, complex)
    psi0[0] = 1.0
    noise = NoiseSpec()
    fire = rng.random((shots, ops[0].size)) < np.where(ops[0] == RZZ, noise.p2, noise.p1)
    pick = rng.integers(0, 15, fire.shape)
    u = rng.random(shots)
    ham = np.array(build_hamiltonian(SpinChainModel(jacobi_spins, 1.0, 1.0)))

    def energy(impl):
        psi = psi0.copy()
        impl.apply_ops(psi, *ops)
        return impl.tfim_energy(psi, n_spins, 1.0, 1.0)

    return {
        "energy_eval": energy,
        "noisy_sample": lambda impl: impl.noisy_sample(psi0, *ops, fire, pick, u),
        "jacobi_eigh": lambda impl: impl.jacobi_eigh(ham.copy(), 1e-12, 100),
    }


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-spins", type=int, default=8)
    ap.add_argument("--jacobi-spins", type=int, default=6, help="chain length for the eigensolver case")
    ap.add_argument("--shots", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write results here")
    args = ap.parse_args(argv)

    impls = implementations()
    if "numba" not in impls:
        print("numba not importable; timing the numpy fallback only", file=sys.stderr)
    rows = []
    for name, fn in cases(np.random.default_rng(args.seed), args.n_spins, args.shots,
                          args.jacobi_spins).items():
        timing = {b: best_of(lambda: fn(m), args.repeat) for b, m in impls.items()}
        speedup = timing["numpy"] / timing["numba"] if "numba" in timing else float("nan")
        rows.append((name, timing["numpy"], timing.get("numba", float("nan")), speedup))

    print(f"{'kernel':<14}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, t_np, t_nb, sp in rows:
        print(f"{name:<14}{t_np:>12.5f}{t_nb:>12.5f}{sp:>10.1f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "numpy_s", "numba_s", "speedup"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
