"""Loop kernels compiled with numba.

Same signatures and random-number consumption as ``_numpy``. Importing this
module requires numba; the package falls back to ``_numpy`` when it is
missing or disabled.
"""

import math

import numpy as np
from numba import njit

from .codes import HAD, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, RX, RZZ

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@njit(cache=True)
def _gate(psi, kind, a, b, angle):
    dim = psi.shape[0]
    if kind == RX:
        c = math.cos(0.5 * angle)
        s = math.sin(0.5 * angle)
        m = 1 << a
        for k in range(dim):
            if k & m:
                continue
            x0 = psi[k]
            x1 = psi[k | m]
            psi[k] = c * x0 - 1j * s * x1
            psi[k | m] = -1j * s * x0 + c * x1
    elif kind == RZZ:
        same = complex(math.cos(0.5 * angle), -math.sin(0.5 * angle))
        diff = complex(math.cos(0.5 * angle), math.sin(0.5 * angle))
        for k in range(dim):
            if ((k >> a) & 1) == ((k >> b) & 1):
                psi[k] *= same
            else:
                psi[k] *= diff
    elif kind == HAD:
        m = 1 << a
        for k in range(dim):
            if k & m:
                continue
            x0 = psi[k]
            x1 = psi[k | m]
            psi[k] = (x0 + x1) * _INV_SQRT2
            psi[k | m] = (x0 - x1) * _INV_SQRT2


@njit(cache=True)
def _pauli(psi, pauli, site):
    dim = psi.shape[0]
    m = 1 << site
    if pauli == PAULI_X:
        for k in range(dim):
            if not k & m:
                tmp = psi[k]
                psi[k] = psi[k | m]
                psi[k | m] = tmp
    elif pauli == PAULI_Y:
        for k in range(dim):
            if not k & m:
                x0 = psi[k]
                x1 = psi[k | m]
                psi[k] = -1j * x1
                psi[k | m] = 1j * x0
    elif pauli == PAULI_Z:
        for k in range(dim):
            if k & m:
                psi[k] = -psi[k]


@njit(cache=True)
def _errors(psi, kind, a, b, pick):
    if kind == RZZ:
        code = pick + 1
        pa = code // 4
        pb = code % 4
        if pa != PAULI_I:
            _pauli(psi, pa, a)
        if pb != PAULI_I:
            _pauli(psi, pb, b)
    else:
        _pauli(psi, pick % 3 + 1, a)


@njit(cache=True)
def apply_ops(psi, kinds, site_a, site_b, angles):
    for g in range(kinds.shape[0]):
        _gate(psi, kinds[g], site_a[g], site_b[g], angles[g])
    return psi


@njit(cache=True)
def noisy_trajectory(psi, kinds, site_a, site_b, angles, fire, pick):
    for g in range(kinds.shape[0]):
        _gate(psi, kinds[g], site_a[g], site_b[g], angles[g])
        if fire[g]:
            _errors(psi, kinds[g], site_a[g], site_b[g], pick[g])
    return psi


@njit(cache=True)
def _draw_one(psi, cdf, u):
    total = 0.0
    for k in range(psi.shape[0]):
        total += psi[k].real * psi[k].real + psi[k].imag * psi[k].imag
        cdf[k] = total
    target = u * total
    count = 0
    for k in range(psi.shape[0]):
        if cdf[k] <= target:
            count += 1
    return min(count, psi.shape[0] - 1)


@njit(cache=True)
def sample_state(psi, u):
    dim = psi.shape[0]
    cdf = np.empty(dim)
    total = 0.0
    for k in range(dim):
        total += psi[k].real * psi[k].real + psi[k].imag * psi[k].imag
        cdf[k] = total
    out = np.empty(u.shape[0], dtype=np.int64)
    for s in range(u.shape[0]):
        target = u[s] * total
        count = 0
        for k in range(dim):
            if cdf[k] <= target:
                count += 1
        out[s] = min(count, dim - 1)
    return out


@njit(cache=True)
def noisy_sample(psi0, kinds, site_a, site_b, angles, fire, pick, u):
    n_shots = u.shape[0]
    out = np.empty(n_shots, dtype=np.int64)
    psi = np.empty_like(psi0)
    cdf = np.empty(psi0.shape[0])
    for s in range(n_shots):
        psi[:] = psi0
        noisy_trajectory(psi, kinds, site_a, site_b, angles, fire[s], pick[s])
        out[s] = _draw_one(psi, cdf, u[s])
    return out


@njit(cache=True)
def tfim_energy(psi, n, coupling, field):
    energy = 0.0
    for k in range(psi.shape[0]):
        p = psi[k].real * psi[k].real + psi[k].imag * psi[k].imag
        zz = 0.0
        for i in range(n - 1):
            zz += 1.0 if ((k >> i) & 1) == ((k >> (i + 1)) & 1) else -1.0
        energy -= coupling * p * zz
        for i in range(n):
            f = psi[k ^ (1 << i)]
            energy -= field * (psi[k].real * f.real + psi[k].imag * f.imag)
    return energy


@njit(cache=True)
def _offdiag_norm(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return math.sqrt(acc)


@njit(cache=True)
def jacobi_eigh(matrix, tol, max_sweeps):
    a = matrix.astype(np.float64).copy()
    n = a.shape[0]
    v = np.eye(n)
    sweeps = 0
    off = _offdiag_norm(a)
    while off >= tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps += 1
        off = _offdiag_norm(a)
    diag = np.empty(n)
    for i in range(n):
        diag[i] = a[i, i]
    return diag, v, sweeps, off
