"""Downhill-simplex (Nelder-Mead) minimization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SimplexCoefficients:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool
    best_history: list = field(default_factory=list, repr=False)


def nelder_mead(fun, x0, step=0.25, max_evaluations=2000, spread_tol=1e-8,
                coefficients=SimplexCoefficients()):
    """Minimize ``fun`` starting from the axis-aligned simplex around ``x0``.

    Stops when the spread of function values across the simplex falls below
    ``spread_tol`` (``converged=True``) or after ``max_evaluations`` calls.
    ``best_history`` holds the best value seen after each iteration.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    n = x0.shape[0]
    alpha, gamma = coefficients.reflection, coefficients.expansion
    rho, sigma = coefficients.contraction, coefficients.shrink

    nfev = 0

    def f(x):
        nonlocal nfev
        nfev += 1
        return float(fun(x))

    simplex = np.empty((n + 1, n))
    simplex[0] = x0
    for i in range(n):
        simplex[i + 1] = x0
        simplex[i + 1, i] += step
    values = np.array([f(x) for x in simplex])

    history = []
    nit = 0
    converged = False
    while True:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        history.append(values[0])
        if values[-1] - values[0] < spread_tol:
            converged = True
            break
        if nfev >= max_evaluations:
            break
        nit += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = f(xr)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (worst - centroid)
            fc = f(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + sigma * (simplex[i] - best)
            values[i] = f(simplex[i])

    return SimplexResult(simplex[0].copy(), float(values[0]), nfev, nit, converged, history)
