"""Time integrators used for microscale bursts and whole-trajectory runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class IntegrationError(RuntimeError):
    """Integration could not continue; carries the last valid time."""

    def __init__(self, message: str, t_last: float):
        self.t_last = t_last
        super().__init__(f"{message} (last valid time t={t_last:.6g})")


@dataclass
class Trajectory:
    """Sampled solution: strictly monotone times, finite states (m, dim)."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("times and states lengths differ")
        dt = np.diff(self.times)
        if len(dt) and not (np.all(dt > 0) or np.all(dt < 0)):
            raise ValueError("times must be strictly monotone")

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]

    def interp(self, t: float) -> np.ndarray:
        """Dense output by linear interpolation between accepted steps."""
        ts = self.times if self.times[0] < self.times[-1] else self.times[::-1]
        xs = self.states if self.times[0] < self.times[-1] else self.states[::-1]
        i = np.clip(np.searchsorted(ts, t) - 1, 0, len(ts) - 2)
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return (1 - w) * xs[i] + w * xs[i + 1]


@dataclass
class SolverOptions:
    rtol: float = 1e-6
    atol: float = 1e-9
    max_step: float = np.inf
    initial_step: float | None = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


def rk4_fixed(f, t0: float, t1: float, u0, h: float) -> Trajectory:
    """Classical fourth-order steps of size h from t0 to t1."""
    if h <= 0:
        raise ValueError("step size must be positive")
    u = np.atleast_1d(np.asarray(u0, dtype=float))
    span = t1 - t0
    n = max(1, int(round(abs(span) / h)))
    hs = span / n
    times = t0 + hs * np.arange(n + 1)
    states = np.empty((n + 1, u.size))
    states[0] = u
    for i in range(n):
        t = times[i]
        k1 = np.asarray(f(t, u))
        k2 = np.asarray(f(t + hs / 2, u + hs / 2 * k1))
        k3 = np.asarray(f(t + hs / 2, u + hs / 2 * k2))
        k4 = np.asarray(f(t + hs, u + hs * k3))
        u = u + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise IntegrationError("non-finite state in rk4_fixed", times[i])
        states[i + 1] = u
    return Trajectory(times, states)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


def _initial_step(f, t0, u0, f0, rtol, atol, direction):
    scale = atol + rtol * np.abs(u0)
    d0 = np.linalg.norm(u0 / scale) / np.sqrt(u0.size)
    d1 = np.linalg.norm(f0 / scale) / np.sqrt(u0.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    u1 = u0 + direction * h0 * f0
    f1 = np.asarray(f(t0 + direction * h0, u1))
    d2 = np.linalg.norm((f1 - f0) / scale) / (np.sqrt(u0.size) * h0)
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def rk45_adaptive(f, t0: float, t1: float, u0, opts: SolverOptions | None = None) -> Trajectory:
    """Embedded Dormand-Prince 4(5) pair with PI step-size control.

    Backward spans (t1 < t0) integrate by internal time reversal. Local error
    per step is kept below rtol*|u| + atol componentwise; step underflow
    below 1e-12 of the span reports a stiffness failure.
    """
    if opts is None:
        opts = SolverOptions()
    if t1 == t0:
        raise ValueError("empty time span")
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    u = np.atleast_1d(np.asarray(u0, dtype=float))
    t = t0
    fu = np.asarray(f(t, u))
    h = opts.initial_step or _initial_step(f, t0, u, fu, opts.rtol, opts.atol, direction)
    h = min(h, opts.max_step, span)
    times = [t0]
    states = [u.copy()]
    err_prev = 1.0
    nsteps = 0
    K = np.empty((7, u.size))
    while direction * (t1 - t) > 0:
        if nsteps >= opts.max_steps:
            raise IntegrationError("step budget exhausted", t)
        if h < 1e-12 * span:
            raise IntegrationError("step size underflow: problem looks too stiff", t)
        h = min(h, abs(t1 - t))
        K[0] = fu
        for s in range(1, 7):
            du = (K[:s].T @ _A[s]) * h * direction
            K[s] = np.asarray(f(t + direction * _C[s] * h, u + du))
        u_new = u + direction * h * (_B5 @ K)
        err_vec = h * (_E @ K)
        scale = opts.atol + opts.rtol * np.maximum(np.abs(u), np.abs(u_new))
        err = np.linalg.norm(err_vec / scale) / np.sqrt(u.size)
        nsteps += 1
        if err <= 1.0 or h <= 1e-11 * span:
            t = t + direction * h
            u = u_new
            fu = K[6].copy()            # FSAL
            if not np.all(np.isfinite(u)):
                raise IntegrationError("non-finite state in rk45_adaptive", times[-1])
            times.append(t)
            states.append(u.copy())
            # PI controller (order 5/4)
            fac = 0.9 * (err + 1e-16) ** -0.14 * err_prev ** 0.08
            err_prev = max(err, 1e-16)
            h = min(h * min(5.0, max(0.2, fac)), opts.max_step)
        else:
            h = h * min(1.0, max(0.2, 0.9 * err ** -0.2))
    return Trajectory(np.array(times), np.array(states))
