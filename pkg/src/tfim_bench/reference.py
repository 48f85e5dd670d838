"""Published four-spin benchmark values (N = 4, J = 1, depth-2 ansatz).

Columns are rounded to four decimals as published. ``SWEEP`` holds, per
h/J, the exact, ideal-variational and hardware order parameters and
energies; ``HARDWARE_OBSERVABLES`` the hardware site-averaged ``<X>``,
bond-averaged ``<Z_i Z_{i+1}>`` and energy; ``METRICS`` the error metrics
derived from ``SWEEP`` for the two candidate backends.
"""

N_SPINS = 4
COUPLING = 1.0
FIELDS = (0.2, 0.6, 1.0, 1.4, 1.8)

# h, mz_exact, mz_vqe, mz_hw, e_exact, e_vqe, e_hw
SWEEP = (
    (0.2, 0.8541, 0.9926, 0.8106, -3.0617, -3.0311, -2.0963),
    (0.6, 0.7259, 0.9272, 0.7413, -3.6314, -3.4444, -2.4436),
    (1.0, 0.5510, 0.8676, 0.6980, -4.7588, -4.0544, -2.9503),
    (1.4, 0.4410, 0.8037, 0.6593, -6.1403, -4.5779, -3.6870),
    (1.8, 0.3741, 0.7986, 0.6098, -7.6191, -5.4759, -4.0428),
)

# h, abs_mz, x_mean, zz_mean, energy
HARDWARE_OBSERVABLES = (
    (0.2, 0.8106, 0.0472, 0.6862, -2.0963),
    (0.6, 0.7413, 0.2756, 0.5941, -2.4436),
    (1.0, 0.6980, 0.3378, 0.5330, -2.9503),
    (1.4, 0.6593, 0.3684, 0.5413, -3.6870),
    (1.8, 0.6098, 0.3806, 0.4341, -4.0428),
)

CRITICAL_WINDOW = (0.8, 1.2)

METRICS = {
    "vqe": {"mae_mz": 0.2887, "rmse_mz": 0.3071, "mae_energy": 0.9255,
            "rmse_energy": 1.2301, "mae_mz_crit": 0.3166, "mae_energy_crit": 0.7043},
    "hardware": {"mae_mz": 0.1320, "rmse_mz": 0.1593, "mae_energy": 1.9983,
                 "rmse_energy": 2.2101, "mae_mz_crit": 0.1470, "mae_energy_crit": 1.8085},
}


def column(name):
    names = ("h", "mz_exact", "mz_vqe", "mz_hw", "e_exact", "e_vqe", "e_hw")
    k = names.index(name)
    return tuple(row[k] for row in SWEEP)
