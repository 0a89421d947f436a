"""Closed-form solutions of the four variable-speed test problems.

Each case exposes the speed ``a`` and its derivative, the domain, initial data
and the exact solution ``exact(t, x)`` of the Cauchy problem.  The inflow datum
is the exact solution at ``x_L``.  :func:`characteristics_oracle` recomputes
solutions numerically from the characteristic ODEs for cross-checking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp


class CaseId(enum.Enum):
    A_X = "a_x"
    A_X2 = "a_x2"
    A_1MX2 = "a_1mx2"
    A_COS = "a_cos"


# a(x) = x^2 variants: (domain, initial data)
X2_VARIANTS = ("default", "negative", "negative_exp")


@dataclass(frozen=True)
class TestCase:
    id: CaseId
    a: Callable
    a_prime: Callable
    x_L: float
    x_R: float
    u0: Callable
    exact: Callable
    life_span: float | None = None
    variant: str = "default"

    __test__ = False  # not a pytest class

    @property
    def domain(self) -> tuple[float, float]:
        return (self.x_L, self.x_R)

    @property
    def name(self) -> str:
        return self.id.value if self.variant == "default" else f"{self.id.value}:{self.variant}"


def inflow(case: TestCase, t: float) -> float:
    """Compatible left boundary datum ``u(t, x_L)``."""
    return float(case.exact(t, case.x_L))


def _a_x() -> TestCase:
    def u0(x):
        return np.sin(12 * (x - 0.1))

    def exact(t, x):
        s = np.exp(-t)
        return s * u0(x * s)

    return TestCase(
        CaseId.A_X, lambda x: x, lambda x: np.ones_like(np.asarray(x, dtype=float)),
        0.0, 2 * np.pi, u0, exact,
    )


def _a_x2(variant: str) -> TestCase:
    if variant not in X2_VARIANTS:
        raise ValueError(f"unknown a_x2 variant {variant!r}; choose from {X2_VARIANTS}")
    if variant == "negative_exp":
        def u0(x):
            return np.exp(-np.asarray(x, dtype=float) ** 4)
    else:
        def u0(x):
            return np.cos(np.pi * np.asarray(x, dtype=float) / 2)
    x_L = 0.1 if variant == "default" else -0.1
    life_span = 10.0 if variant == "negative" else None

    def exact(t, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s = 1 + t * x
            val = u0(x / s) / s**2
        if variant == "negative_exp":
            # exp(-y^4) beats the double pole; the limit at s = 0 is zero
            val = np.where(s == 0, 0.0, val)
        return val[()] if np.ndim(val) == 0 else val

    return TestCase(
        CaseId.A_X2, lambda x: np.asarray(x, dtype=float) ** 2, lambda x: 2 * np.asarray(x, dtype=float),
        x_L, 1.0, u0, exact, life_span, variant,
    )


def _a_1mx2() -> TestCase:
    def u0(x):
        return np.sin(np.pi * x)

    def exact(t, x):
        x = np.asarray(x, dtype=float)
        c, s = np.cosh(t), np.sinh(t)
        return u0((-x * c + s) / (x * s - c)) / (c - x * s) ** 2

    return TestCase(
        CaseId.A_1MX2, lambda x: 1 - np.asarray(x, dtype=float) ** 2,
        lambda x: -2 * np.asarray(x, dtype=float), -1.0, 0.9, u0, exact,
    )


def _a_cos() -> TestCase:
    def u0(x):
        return np.sin(5 * x)

    def foot(t, x):
        y = np.tan(np.asarray(x, dtype=float) / 2)
        if np.any(np.abs(y) >= 1):
            raise ValueError("tan(x/2) must lie in (-1, 1) for the closed form")
        return -2 * np.arctan(np.tanh(t / 2 - np.arctanh(y)))

    def exact(t, x):
        x0 = foot(t, x)
        return u0(x0) * np.cos(x0) / np.cos(x)

    return TestCase(CaseId.A_COS, np.cos, lambda x: -np.sin(x), 0.1, np.pi / 3, u0, exact)


def make_case(id: CaseId | str, variant: str = "default") -> TestCase:
    id = CaseId(id)
    if id is CaseId.A_X2:
        return _a_x2(variant)
    if variant != "default":
        raise ValueError(f"case {id.value} has no variant {variant!r}")
    return {CaseId.A_X: _a_x, CaseId.A_1MX2: _a_1mx2, CaseId.A_COS: _a_cos}[id]()


class CharacteristicsError(RuntimeError):
    """The backward characteristic escaped the admissible region or stalled."""


def characteristics_oracle(
    a: Callable,
    a_prime: Callable,
    u0: Callable,
    t: float,
    x: float,
    bounds: tuple[float, float] | None = None,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    max_steps: int = 100_000,
) -> float:
    """Solution value at ``(t, x)`` from the characteristic ODEs.

    Integrates ``x' = a(x)`` backward from ``(t, x)`` to the foot point ``x0``,
    then ``x' = a(x), z' = -a'(x) z`` forward from ``(x0, u0(x0))``.  With
    ``bounds = (x_L, x_R)`` the backward solve must stay in
    ``[x_L - 1, x_R + 1]``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return float(u0(x))
    lo, hi = (-np.inf, np.inf) if bounds is None else (bounds[0] - 1, bounds[1] + 1)

    def escape(s, y):
        return min(y[0] - lo, hi - y[0])

    escape.terminal = True
    opts = dict(method="DOP853", rtol=rtol, atol=atol)
    back = solve_ivp(lambda s, y: [a(y[0])], (t, 0.0), [x], events=escape, **opts)
    if back.status != 0 or back.t.size > max_steps:
        raise CharacteristicsError(
            f"backward characteristic from ({t}, {x}) failed: {back.message}"
        )
    x0 = float(back.y[0, -1])

    def forward(s, y):
        return [a(y[0]), -a_prime(y[0]) * y[1]]

    fwd = solve_ivp(forward, (0.0, t), [x0, float(u0(x0))], **opts)
    if fwd.status != 0:
        raise CharacteristicsError(f"forward solve from x0={x0} failed: {fwd.message}")
    return float(fwd.y[1, -1])
