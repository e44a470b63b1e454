"""Projective integration over macroscale time from microscale bursts.

A burst function has the contract (t0, x0, bT) -> Trajectory covering
[t0, t0 + bT] with at least three sample points. Macro steps combine burst
end states with slow-derivative estimates to leap across unsimulated time,
forward or backward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .microsolve import Trajectory


class BurstError(RuntimeError):
    """A burst violated its contract or failed; carries the macro-step index."""


class LiftRestrictError(ValueError):
    pass


@dataclass
class LiftRestrict:
    """Maps between macro states and full micro states.

    lift(X, cache) must be a right-inverse of restrict: restrict(lift(X, c))
    equals X exactly for any cached full state c. The cache holds the most
    recent full micro state seen.
    """

    restrict: Callable[[np.ndarray], np.ndarray]
    lift: Callable[[np.ndarray, np.ndarray], np.ndarray]
    cache: np.ndarray | None = None

    def validate(self, X: np.ndarray):
        if self.cache is None:
            raise LiftRestrictError("lift/restrict cache is empty; provide an initial full state")
        back = np.atleast_1d(np.asarray(self.restrict(self.lift(np.asarray(X), self.cache))))
        if not np.array_equal(back, np.atleast_1d(np.asarray(X, dtype=float))):
            raise LiftRestrictError("restrict(lift(X)) != X: lift is not a right-inverse")


@dataclass
class PIRun:
    """Macro trajectory plus the recorded microscale bursts."""

    times: np.ndarray
    states: np.ndarray
    bursts: list[Trajectory] = field(default_factory=list)
    burst_flags: list[str] = field(default_factory=list)   # 'accurate' | 'auxiliary'

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]


def growth_factor(lambda_dt: float, r: float) -> float:
    """Amplification of one projective-Euler macro step on u' = lambda u:
    burst fraction r of the step, extrapolation across the rest."""
    return math.exp(lambda_dt * r) * (1.0 + lambda_dt * (1.0 - r))


def min_burst_length(beta: float, delta: float) -> float:
    """Shortest stable burst for fast decay rate beta and macro step delta."""
    if beta <= 0:
        raise ValueError("fast rate beta must be positive")
    if beta * delta <= 1.0:
        raise ValueError("beta*delta <= 1: no projection is needed and the "
                         "burst-length bound does not apply")
    return math.log(abs(beta * delta)) / beta


def _sup_growth(r: float) -> float:
    """sup over lambda*Delta in (-inf, 0) of |G(lambda*Delta, r)|."""
    # map (-inf, 0) to (0, 1) and maximise by dense sampling plus refinement
    def neg_absg(s):
        x = -s / (1.0 - s)
        return -abs(growth_factor(x, r))
    ss = np.linspace(1e-9, 1.0 - 1e-9, 2001)
    vals = [neg_absg(s) for s in ss]
    i = int(np.argmin(vals))
    lo, hi = ss[max(0, i - 1)], ss[min(len(ss) - 1, i + 1)]
    res = minimize_scalar(neg_absg, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14})
    return max(-res.fun, -vals[i])


def stability_threshold() -> float:
    """Smallest burst fraction r with sup |G| <= 1 over all decaying modes,
    by bisection on r with an inner 1D maximisation."""
    lo, hi = 0.05, 0.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _sup_growth(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def slow_derivative_estimate(traj: Trajectory, q: int = 2) -> np.ndarray:
    """Least-squares linear slope through the last q accepted points; q=2 is
    the plain two-point difference at the burst end."""
    if q < 2:
        raise ValueError("need a window of at least 2 points")
    if traj.times.shape[0] < 2:
        raise ValueError("trajectory too short for a derivative estimate")
    q = min(q, traj.times.shape[0])
    t = traj.times[-q:]
    x = traj.states[-q:]
    if q == 2:
        return (x[-1] - x[-2]) / (t[-1] - t[-2])
    A = np.vstack([t - t[-1], np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, x, rcond=None)
    return coef[0]


def _run_burst(burst, t0, x0, bT, step_index):
    traj = burst(t0, np.asarray(x0, dtype=float), bT)
    if not isinstance(traj, Trajectory):
        traj = Trajectory(traj[0], traj[1])
    if traj.times.shape[0] < 3:
        raise BurstError(f"macro step {step_index}: burst returned fewer than 3 samples")
    if abs(traj.times[0] - t0) > 1e-9 * max(bT, 1.0) or \
       abs(traj.t_end - (t0 + bT)) > 1e-9 * max(bT, 1.0):
        raise BurstError(f"macro step {step_index}: burst times do not cover "
                         f"[{t0}, {t0 + bT}]")
    if not np.all(np.isfinite(traj.states)):
        raise BurstError(f"macro step {step_index}: burst produced non-finite states")
    return traj


def projective_euler_step(burst, t0: float, x0: np.ndarray, dt: float, bT: float,
                          q: int = 2) -> np.ndarray:
    """One burst then linear extrapolation across the remaining dt - bT."""
    traj = _run_burst(burst, t0, x0, bT, 0)
    g = slow_derivative_estimate(traj, q)
    return traj.end + (dt - bT) * g


def _check_schedule(ts):
    ts = np.asarray(ts, dtype=float)
    d = np.diff(ts)
    if len(d) == 0 or not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("macro schedule must be strictly monotone")
    return ts


def pirk2(burst, ts: Sequence[float], x0, bT: float, *, q: int = 2,
          double_first: bool = True, record_bursts: str = "accurate") -> PIRun:
    """Second-order projective integration (improved-Euler pattern).

    Per macro interval: burst from the current state (twice as long for the
    first interval unless disabled), estimate the slow derivative g1, project
    to the interval end, burst again from there for g2, then combine
    x_{n+1} = x_burst_end + (span)*(g1+g2)/2 anchored at the first burst end.
    """
    ts = _check_schedule(ts)
    if bT <= 0:
        raise ValueError("burst length must be positive")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    states = [x.copy()]
    bursts, flags = [], []

    def keep(traj, kind):
        if record_bursts == "all" or (record_bursts == "accurate" and kind == "accurate"):
            bursts.append(traj)
            flags.append(kind)

    for n in range(len(ts) - 1):
        t0, t1 = ts[n], ts[n + 1]
        b1 = 2.0 * bT if (n == 0 and double_first) else bT
        traj1 = _run_burst(burst, t0, x, b1, n)
        keep(traj1, "accurate")
        xb, tb = traj1.end, traj1.t_end
        g1 = slow_derivative_estimate(traj1, q)
        x_pred = xb + (t1 - tb) * g1
        traj2 = _run_burst(burst, t1, x_pred, bT, n)
        keep(traj2, "auxiliary")
        g2 = slow_derivative_estimate(traj2, q)
        x = xb + (t1 - tb) * 0.5 * (g1 + g2)
        states.append(x.copy())
    return PIRun(times=ts.copy(), states=np.array(states), bursts=bursts, burst_flags=flags)


def pirk4(burst, ts: Sequence[float], x0, bT: float, *, q: int = 2,
          double_first: bool = True, record_bursts: str = "accurate") -> PIRun:
    """Fourth-order projective integration: an initial burst, then a
    classical four-stage pattern over the remaining gap with every stage
    burst re-anchored to end at its stage time. The trailing -bT*(k3-k2)
    term cancels the leading burst-advance contamination of the stages.
    """
    ts = _check_schedule(ts)
    if bT <= 0:
        raise ValueError("burst length must be positive")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    states = [x.copy()]
    bursts, flags = [], []

    def keep(traj, kind):
        if record_bursts == "all" or (record_bursts == "accurate" and kind == "accurate"):
            bursts.append(traj)
            flags.append(kind)

    for n in range(len(ts) - 1):
        t0, t1 = ts[n], ts[n + 1]
        b1 = 2.0 * bT if (n == 0 and double_first) else bT
        traj1 = _run_burst(burst, t0, x, b1, n)
        keep(traj1, "accurate")
        xb, tb = traj1.end, traj1.t_end
        k1 = slow_derivative_estimate(traj1, q)
        G = t1 - tb
        tm = tb + 0.5 * G
        traj2 = _run_burst(burst, tm - bT, xb + (0.5 * G - bT) * k1, bT, n)
        keep(traj2, "auxiliary")
        k2 = slow_derivative_estimate(traj2, q)
        traj3 = _run_burst(burst, tm - bT, xb + (0.5 * G - bT) * k2, bT, n)
        keep(traj3, "auxiliary")
        k3 = slow_derivative_estimate(traj3, q)
        traj4 = _run_burst(burst, t1 - bT, xb + (G - bT) * k3, bT, n)
        keep(traj4, "auxiliary")
        k4 = slow_derivative_estimate(traj4, q)
        x = xb + G * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 - bT * (k3 - k2)
        states.append(x.copy())
    return PIRun(times=ts.copy(), states=np.array(states), bursts=bursts, burst_flags=flags)


def pig(macro_integrator, burst, tspan: tuple[float, float], x0,
        lr: LiftRestrict, bT: float, *, q: int = 2, nburst: int = 2,
        record_bursts: str = "accurate") -> PIRun:
    """Wrap an adaptive macroscale integrator around microscale bursts.

    The derivative function handed to the integrator lifts the macro state
    with the cached micro state, runs a burst to land on the slow manifold,
    projects the restricted state back two burst lengths, lifts, and runs a
    second burst that ends at the requested time; its end slope is the
    macro derivative. nburst=1 skips the re-anchoring and accepts the slope
    at a slightly wrong time.
    """
    x_full0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if lr.cache is None:
        lr.cache = x_full0.copy()
    X0 = np.atleast_1d(np.asarray(lr.restrict(x_full0), dtype=float))
    lr.validate(X0)
    if nburst not in (1, 2):
        raise ValueError("nburst must be 1 or 2")
    bursts, flags = [], []

    def keep(traj, kind):
        if record_bursts == "all" or (record_bursts == "accurate" and kind == "accurate"):
            bursts.append(traj)
            flags.append(kind)

    def macro_derivative(t, X):
        full = np.atleast_1d(np.asarray(lr.lift(np.asarray(X), lr.cache), dtype=float))
        traj1 = _run_burst(burst, t, full, bT, -1)
        keep(traj1, "accurate" if nburst == 1 else "auxiliary")
        if nburst == 1:
            lr.cache = traj1.end.copy()
            return _restrict_slope(lr, traj1, q)
        g1 = _restrict_slope(lr, traj1, q)
        X_back = np.atleast_1d(np.asarray(lr.restrict(traj1.end), dtype=float)) - 2.0 * bT * g1
        full2 = np.atleast_1d(np.asarray(lr.lift(X_back, traj1.end), dtype=float))
        traj2 = _run_burst(burst, t - bT, full2, bT, -1)
        keep(traj2, "accurate")
        lr.cache = traj2.end.copy()
        return _restrict_slope(lr, traj2, q)

    traj = macro_integrator(macro_derivative, (tspan[0], tspan[1]), X0)
    if not isinstance(traj, Trajectory):
        traj = Trajectory(traj[0], traj[1])
    return PIRun(times=traj.times, states=traj.states, bursts=bursts, burst_flags=flags)


def _restrict_slope(lr: LiftRestrict, traj: Trajectory, q: int) -> np.ndarray:
    """Slow derivative of the restricted trajectory at the burst end."""
    restricted = np.array([np.atleast_1d(np.asarray(lr.restrict(s), dtype=float))
                           for s in traj.states])
    return slow_derivative_estimate(Trajectory(traj.times, restricted), q)
