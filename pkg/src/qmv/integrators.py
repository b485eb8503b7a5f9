"""Runge-Kutta integrators for the Schrodinger flow dY/dt = -i H(t) Y.

Two steppers are provided: classical fixed-step RK4 and the adaptive
Dormand-Prince 5(4) embedded pair with per-step error control.  Both work on
arbitrary complex ndarrays (state vectors or full propagator matrices), with
the right-hand side supplied as a callable ``f(t, y) -> dy/dt``.
"""

from __future__ import annotations

import numpy as np

# Dormand-Prince 5(4) Butcher tableau.  Seven stages, fifth order propagating
# solution with an embedded fourth-order error estimate.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])

_MIN_STEP_FRACTION = 1e-14
_SAFETY = 0.9
_MAX_GROWTH = 5.0
_MAX_SHRINK = 0.2


class StepSizeUnderflow(RuntimeError):
    """Adaptive step control collapsed below the resolvable step size."""


def rk4_fixed(f, y0: np.ndarray, t0: float, t1: float, steps: int) -> np.ndarray:
    """Classical fourth-order Runge-Kutta with a fixed number of steps."""
    if steps < 1:
        raise ValueError("rk4 needs at least one step")
    y = np.array(y0, dtype=complex, copy=True)
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + (h / 2) * k1)
        k3 = f(t + h / 2, y + (h / 2) * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def dp54_adaptive(f, y0: np.ndarray, t0: float, t1: float, tol: float):
    """Dormand-Prince 5(4) with the per-step max-norm error held below tol.

    Returns (y, stats) where stats records accepted/rejected step counts and
    the number of right-hand-side evaluations.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    span = t1 - t0
    if span == 0:
        return np.array(y0, dtype=complex, copy=True), {
            "steps_accepted": 0, "steps_rejected": 0, "rhs_evaluations": 0}

    y = np.array(y0, dtype=complex, copy=True)
    t = t0
    h = span / 16.0
    accepted = rejected = evals = 0

    while (t1 - t) * np.sign(span) > 0:
        h = min(abs(h), abs(t1 - t)) * np.sign(span)
        if abs(h) < abs(span) * _MIN_STEP_FRACTION:
            raise StepSizeUnderflow(
                "stiffness failure: tighten cap or use Trotter")

        ks = []
        for i in range(7):
            yi = y
            if ks:
                acc = np.zeros_like(y)
                for a, k in zip(_DP_A[i], ks):
                    if a != 0.0:
                        acc += a * k
                yi = y + h * acc
            ks.append(f(t + _DP_C[i] * h, yi))
        evals += 7

        y5 = y + h * sum(b * k for b, k in zip(_DP_B5, ks) if b != 0.0)
        y4 = y + h * sum(b * k for b, k in zip(_DP_B4, ks) if b != 0.0)
        err = float(np.max(np.abs(y5 - y4)))

        if err <= tol:
            t += h
            y = y5
            accepted += 1
            factor = _MAX_GROWTH if err == 0.0 else _SAFETY * (tol / err) ** 0.2
        else:
            rejected += 1
            factor = max(_MAX_SHRINK, _SAFETY * (tol / err) ** 0.2)
        h *= min(_MAX_GROWTH, max(_MAX_SHRINK, factor))

    return y, {"steps_accepted": accepted, "steps_rejected": rejected,
               "rhs_evaluations": evals}


def dp54_piecewise(f, y0: np.ndarray, t0: float, t1: float, tol: float,
                   breakpoints=()):
    """Adaptive integration split at known non-smooth times.

    Restarting at each breakpoint keeps the step controller from fighting
    slope discontinuities, which otherwise costs many rejected steps.
    """
    times = [t0] + [t for t in breakpoints if t0 < t < t1] + [t1]
    y = y0
    total = {"steps_accepted": 0, "steps_rejected": 0, "rhs_evaluations": 0}
    for a, b in zip(times[:-1], times[1:]):
        y, stats = dp54_adaptive(f, y, a, b, tol)
        for key in total:
            total[key] += stats[key]
    return y, total
