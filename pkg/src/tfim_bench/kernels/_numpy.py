"""Vectorized numpy implementations of the hot kernels.

Every function here has a loop-based twin in ``_numba.py`` with the same
signature and the same consumption of pre-drawn random numbers, so the two
paths produce the same samples for the same inputs.
"""

import numpy as np

from .codes import HAD, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, RX, RZZ

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _bits(dim, site):
    return (np.arange(dim) >> site) & 1


def _apply_gate(psi, kind, a, b, angle):
    """Apply one gate to the last axis of ``psi`` (1-D state or (shots, dim) batch)."""
    dim = psi.shape[-1]
    idx = np.arange(dim)
    if kind == RX:
        c = np.cos(0.5 * angle)
        s = np.sin(0.5 * angle)
        return c * psi - 1j * s * psi[..., idx ^ (1 << a)]
    if kind == RZZ:
        same = _bits(dim, a) == _bits(dim, b)
        phase = np.where(same, np.exp(-0.5j * angle), np.exp(0.5j * angle))
        return psi * phase
    if kind == HAD:
        sign = 1.0 - 2.0 * _bits(dim, a)
        return (sign * psi + psi[..., idx ^ (1 << a)]) * _INV_SQRT2
    raise ValueError(f"unknown gate code {kind}")


def _apply_pauli(psi, pauli, site):
    if pauli == PAULI_I:
        return psi
    dim = psi.shape[-1]
    idx = np.arange(dim)
    if pauli == PAULI_X:
        return psi[..., idx ^ (1 << site)]
    if pauli == PAULI_Z:
        return psi * (1.0 - 2.0 * _bits(dim, site))
    if pauli == PAULI_Y:
        # Y|0> = i|1>, Y|1> = -i|0>
        phase = np.where(_bits(dim, site) == 1, 1j, -1j)
        return psi[..., idx ^ (1 << site)] * phase
    raise ValueError(f"unknown pauli code {pauli}")


def apply_ops(psi, kinds, site_a, site_b, angles):
    out = psi
    for g in range(len(kinds)):
        out = _apply_gate(out, kinds[g], site_a[g], site_b[g], angles[g])
    psi[...] = out
    return psi


def _inject_errors(batch, kind, a, b, fire, pick):
    """Apply the selected Pauli error to the rows of ``batch`` where ``fire`` is set."""
    if kind == RZZ:
        for choice in range(15):
            rows = fire & (pick == choice)
            if not rows.any():
                continue
            pa, pb = divmod(choice + 1, 4)
            sub = _apply_pauli(batch[rows], pa, a)
            batch[rows] = _apply_pauli(sub, pb, b)
    else:
        for choice in range(3):
            rows = fire & (pick % 3 == choice)
            if rows.any():
                batch[rows] = _apply_pauli(batch[rows], choice + 1, a)
    return batch


def noisy_trajectory(psi, kinds, site_a, site_b, angles, fire, pick):
    batch = psi[np.newaxis, :].copy()
    for g in range(len(kinds)):
        batch = _apply_gate(batch, kinds[g], site_a[g], site_b[g], angles[g])
        batch = _inject_errors(batch, kinds[g], site_a[g], site_b[g],
                               fire[g:g + 1], pick[g:g + 1])
    psi[:] = batch[0]
    return psi


def _draw(probs, u):
    cdf = np.cumsum(probs, axis=-1)
    target = u * cdf[..., -1]
    idx = np.sum(cdf <= target[..., np.newaxis], axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def sample_state(psi, u):
    probs = psi.real * psi.real + psi.imag * psi.imag
    return _draw(probs[np.newaxis, :], u).astype(np.int64)


def noisy_sample(psi0, kinds, site_a, site_b, angles, fire, pick, u):
    n_shots = u.shape[0]
    batch = np.repeat(psi0[np.newaxis, :], n_shots, axis=0)
    for g in range(len(kinds)):
        batch = _apply_gate(batch, kinds[g], site_a[g], site_b[g], angles[g])
        batch = _inject_errors(batch, kinds[g], site_a[g], site_b[g],
                               fire[:, g], pick[:, g])
    probs = batch.real * batch.real + batch.imag * batch.imag
    return _draw(probs, u).astype(np.int64)


def tfim_energy(psi, n, coupling, field):
    dim = psi.shape[0]
    probs = psi.real * psi.real + psi.imag * psi.imag
    idx = np.arange(dim)
    zz = np.zeros(dim)
    for i in range(n - 1):
        zz += 1.0 - 2.0 * (_bits(dim, i) ^ _bits(dim, i + 1))
    energy = -coupling * np.dot(probs, zz)
    for i in range(n):
        flipped = psi[idx ^ (1 << i)]
        energy -= field * np.real(np.vdot(psi, flipped))
    return energy


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def jacobi_eigh(matrix, tol, max_sweeps):
    a = np.array(matrix, dtype=np.float64, copy=True)
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
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                a[:, [p, q]] = a[:, [p, q]] @ rot
                a[[p, q], :] = rot.T @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ rot
        sweeps += 1
        off = _offdiag_norm(a)
    return np.diag(a).copy(), v, sweeps, off
