"""Embedded Runge-Kutta 5(4) integrator with dense output.

Dormand-Prince pair with the first-same-as-last property, proportional-
integral step control, and a quartic interpolant for sampling solution
values between accepted steps. Works on real float state vectors in either
time direction; all control decisions are deterministic functions of the
right-hand side, so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["StepControl", "IntegrationError", "IntegrationResult", "integrate_sampled"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    ]
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# quartic dense-output matrix; row sums of the first six rows reproduce _B
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


@dataclass(frozen=True)
class StepControl:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 10.0
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")


class IntegrationError(RuntimeError):
    """Integration abandoned; ``time`` holds where it stopped."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t = {time:.9g})")
        self.time = time


@dataclass(frozen=True)
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray
    n_steps: int
    n_rejected: int
    n_evals: int


def _error_norm(delta, y0, y1, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((delta / scale) ** 2)))


def _initial_step(f, t0, y0, f0, direction, span, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = f(t0 + h0 * direction, y1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate_sampled(
    f,
    y0: np.ndarray,
    sample_times: np.ndarray,
    control: StepControl | None = None,
    post_step=None,
) -> IntegrationResult:
    """Integrate y' = f(t, y) and evaluate the solution at ``sample_times``.

    The first sample time is the initial time and gets ``y0`` verbatim;
    the remaining times must be strictly monotone in a single direction.
    ``post_step``, when given, is called after every accepted step as
    ``post_step(t, y)`` and may return a replacement state (or None to keep
    it); interior samples of that step use the uncorrected interpolant.
    """
    control = control or StepControl()
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two sample times")
    steps = np.diff(times)
    direction = 1.0 if steps[0] > 0 else -1.0
    if np.any(direction * steps <= 0):
        raise ValueError("sample times must be strictly monotone")

    y = np.array(y0, dtype=float)
    if y.ndim != 1:
        raise ValueError("state must be a flat real vector")

    n_evals = 0

    def rhs(t, state):
        nonlocal n_evals
        n_evals += 1
        return np.asarray(f(t, state), dtype=float)

    t = float(times[0])
    t_end = float(times[-1])
    out = np.empty((times.size, y.size))
    out[0] = y
    next_sample = 1

    f_now = rhs(t, y)
    span = abs(t_end - t)
    h = min(
        _initial_step(rhs, t, y, f_now, direction, span, control.rel_tol, control.abs_tol),
        control.max_step,
    )
    err_old = 1e-4
    growth_cap = control.max_factor
    n_steps = 0
    n_rejected = 0
    k = np.empty((7, y.size))

    while next_sample < times.size:
        if n_steps + n_rejected >= control.max_steps:
            raise IntegrationError("step budget exhausted", t)
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise IntegrationError("step size underflow", t)
        h = min(h, control.max_step)
        if h >= abs(t_end - t):
            # land on the endpoint exactly
            h_signed = t_end - t
            t_new = t_end
            h_used = abs(h_signed)
        else:
            h_signed = direction * h
            t_new = t + h_signed
            h_used = h

        k[0] = f_now
        for i in range(1, 6):
            k[i] = rhs(t + _C[i] * h_signed, y + h_signed * (_A[i, :i] @ k[:i]))
        y_new = y + h_signed * (_B @ k[:6])
        k[6] = rhs(t_new, y_new)
        err = _error_norm(
            h_signed * (_E @ k), y, y_new, control.rel_tol, control.abs_tol
        )

        if not math.isfinite(err):
            n_rejected += 1
            h = h_used * control.min_factor
            growth_cap = 1.0
            continue
        if err > 1.0:
            n_rejected += 1
            fac = control.safety * err**-_ALPHA * err_old**_BETA
            h = h_used * min(1.0, max(control.min_factor, fac))
            growth_cap = 1.0
            continue

        # accepted: emit every sample inside (t, t_new]
        while next_sample < times.size and direction * (
            times[next_sample] - t_new
        ) <= 0:
            if times[next_sample] == t_new:
                out[next_sample] = y_new
            else:
                theta = (times[next_sample] - t) / h_signed
                powers = theta * np.array([1.0, theta, theta**2, theta**3])
                out[next_sample] = y + h_signed * (k.T @ (_P @ powers))
            next_sample += 1

        n_steps += 1
        fac = control.safety * max(err, 1e-10) ** -_ALPHA * err_old**_BETA
        h = h_used * min(growth_cap, max(control.min_factor, fac))
        growth_cap = control.max_factor
        err_old = max(err, 1e-4)

        t, y, f_now = t_new, y_new, k[6].copy()
        if post_step is not None:
            replaced = post_step(t, y)
            if replaced is not None:
                y = np.asarray(replaced, dtype=float)
                f_now = rhs(t, y)

    return IntegrationResult(
        times=times,
        states=out,
        n_steps=n_steps,
        n_rejected=n_rejected,
        n_evals=n_evals,
    )
