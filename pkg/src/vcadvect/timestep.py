"""Ten-stage, fourth-order SSP Runge-Kutta stepping and a step schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .semidisc import BLOWUP_THRESHOLD, BlowUpError

DEFAULT_CFL = 0.5


def ssprk_10_4_step(rhs: Callable, u, t: float, dt: float):
    """One step of the low-storage SSPRK(10,4) scheme of Ketcheson (2008).

    Five forward-Euler stages of size ``dt/6``, the register combination
    ``q2 = q2/25 + 9 q1/25``, ``q1 = 15 q2 - 5 q1``, four more stages and
    ``u = q2 + 3/5 q1 + dt/10 F(q1)``.  The registers are stored as offsets from
    ``u`` (the combination coefficients of ``u`` sum to one exactly), so a
    vanishing right-hand side leaves ``u`` unchanged bit for bit.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    h = dt / 6
    d1 = h * rhs(u, t)
    for i in range(1, 5):
        d1 = d1 + h * rhs(u + d1, t + i * h)
    d2 = 9 * d1 / 25  # q2 = 2/5 u + d2
    d1 = 15 * d2 - 5 * d1  # q1 = u + d1
    t1 = t + dt / 3
    for i in range(4):
        d1 = d1 + h * rhs(u + d1, t1 + i * h)
    return u + (d2 + 3 * d1 / 5 + dt / 10 * rhs(u + d1, t + dt))


def stability_polynomial(z):
    """Amplification factor ``R(z)`` of one step applied to ``u' = lambda u``."""
    z = np.asarray(z, dtype=complex)
    one = lambda q: q * (1 + z / 6)
    q1 = np.ones_like(z)
    for _ in range(5):
        q1 = one(q1)
    q2 = 1 / 25 + 9 * q1 / 25
    q1 = 15 * q2 - 5 * q1
    for _ in range(4):
        q1 = one(q1)
    return q2 + 3 * q1 / 5 + z / 10 * q1


def max_stable_dt(eigenvalues, safety: float = 0.95) -> float:
    """Largest ``dt`` (times ``safety``) with ``|R(dt * lambda)| <= 1`` for all eigenvalues.

    Growing modes (``Re lambda > 0``) grow for every ``dt``; they enter the bound
    through their imaginary part only.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    lam = np.minimum(lam.real, 0.0) + 1j * lam.imag
    lam = lam[np.abs(lam) > 0]
    if lam.size == 0:
        return math.inf

    def stable(dt):
        return np.all(np.abs(stability_polynomial(dt * lam)) <= 1 + 1e-12)

    lo, hi = 0.0, 1.0 / np.max(np.abs(lam))
    while stable(hi):
        lo, hi = hi, 2 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if stable(mid) else (lo, mid)
    return safety * lo


def default_dt(dx_min: float, max_speed: float, N: int, cfl: float = DEFAULT_CFL) -> float:
    return cfl * dx_min / (max_speed * (2 * N + 1))


@dataclass(frozen=True)
class TimeIntegration:
    """Uniform grid of ``n_steps`` steps up to ``t_final`` plus observation times."""

    t_final: float
    n_steps: int
    sample_times: tuple = field(default=())

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        s = tuple(sorted(float(x) for x in self.sample_times))
        if s and (s[0] < 0 or s[-1] > self.t_final):
            raise ValueError("sample times must lie in [0, t_final]")
        object.__setattr__(self, "sample_times", s)

    @classmethod
    def from_dt(cls, t_final: float, dt: float, sample_times: Sequence[float] = ()):
        n = max(1, math.ceil(t_final / dt - 1e-9))
        return cls(t_final, n, tuple(sample_times))

    @classmethod
    def with_samples(cls, t_final: float, n_steps: int, n_samples: int):
        """Schedule observing ``n_samples`` equispaced times including 0 and ``t_final``."""
        n_samples = max(2, n_samples)
        idx = np.unique(np.round(np.linspace(0, n_steps, n_samples)).astype(int))
        times = tuple(t_final if i == n_steps else min(t_final * i / n_steps, t_final) for i in idx)
        return cls(t_final, n_steps, times)

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    def breakpoints(self) -> np.ndarray:
        grid = self.t_final * np.arange(self.n_steps + 1) / self.n_steps
        grid[-1] = self.t_final
        return np.unique(np.concatenate((grid, np.asarray(self.sample_times, dtype=float))))


def integrate(
    rhs: Callable,
    state0,
    schedule: TimeIntegration,
    observer: Callable | None = None,
    step: Callable = ssprk_10_4_step,
):
    """Advance ``state0`` to ``schedule.t_final``.

    Steps run between consecutive breakpoints (the uniform grid merged with the
    sample times), so every sample time and ``t_final`` is hit exactly.  The
    observer is called as ``observer(t, state)`` at each sample time.  Raises
    :class:`BlowUpError` carrying the last finite time when the state stops
    being finite or exceeds the blow-up threshold.
    """
    u = np.array(state0, dtype=float)
    samples = set(schedule.sample_times)
    times = schedule.breakpoints()
    if observer is not None and 0.0 in samples:
        observer(0.0, u)
    for t0, t1 in zip(times[:-1], times[1:]):
        try:
            u = step(rhs, u, float(t0), float(t1 - t0))
        except BlowUpError as exc:
            raise BlowUpError(f"blow-up in step starting at t={t0}", float(t0)) from exc
        if not np.abs(u).max() <= BLOWUP_THRESHOLD:
            raise BlowUpError(f"blow-up in step starting at t={t0}", float(t0))
        if observer is not None and t1 in samples:
            observer(float(t1), u)
    return u
