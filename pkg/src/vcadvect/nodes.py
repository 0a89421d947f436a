"""Legendre-family quadrature rules and Lagrange interpolation on [-1, 1].

Nodes are computed by Newton iteration from cosine-spaced initial guesses, so a
rule for a given ``(kind, N)`` is reproducible bit-for-bit.  Interpolation and
differentiation use the barycentric (second) form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DEGREE = 32
NEWTON_TOL = 1e-14
NEWTON_MAXITER = 100
HIT_TOL = 1e-250


class RuleKind(enum.Enum):
    GAUSS_LEGENDRE = "gl"
    GAUSS_LOBATTO_LEGENDRE = "gll"


def legendre_eval(n: int, x):
    """Return ``(P_n(x), P_n'(x))`` from the three-term recurrence.

    ``x`` may be a scalar or an array.  The derivative uses
    ``P'_{k+1} = P'_{k-1} + (2k + 1) P_k``, which is regular at ``x = +-1``.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev, p = np.ones_like(x), x.copy()
    dp_prev, dp = np.zeros_like(x), np.ones_like(x)
    if n == 0:
        return p_prev[()], dp_prev[()]
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp_prev, dp = dp, dp_prev + (2 * k + 1) * p_prev
    return p[()], dp[()]


def _newton(f, x0: np.ndarray) -> np.ndarray:
    x = x0.copy()
    for _ in range(NEWTON_MAXITER):
        val, der = f(x)
        dx = val / der
        x = x - dx
        if np.all(np.abs(val) <= NEWTON_TOL) or np.all(np.abs(dx) <= 1e-16):
            break
    return x


def _symmetrize(x: np.ndarray) -> np.ndarray:
    # mirror the right half so that x[i] == -x[N - i] holds exactly
    x = np.sort(x)
    n = len(x)
    half = x[n // 2 :][::-1] if n % 2 == 0 else x[n // 2 + 1 :][::-1]
    out = x.copy()
    out[: len(half)] = -half
    out[n - len(half) :] = half[::-1]
    if n % 2 == 1:
        out[n // 2] = 0.0
    return out


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


@dataclass(frozen=True)
class QuadratureRule:
    kind: RuleKind
    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    barycentric_weights: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.degree + 1

    @property
    def exactness(self) -> int:
        """Highest monomial degree integrated exactly."""
        if self.kind is RuleKind.GAUSS_LEGENDRE:
            return 2 * self.degree + 1
        return 2 * self.degree - 1

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def build_rule(kind: RuleKind | str, N: int) -> QuadratureRule:
    """Gauss-Legendre or Gauss-Lobatto-Legendre rule with ``N + 1`` nodes."""
    kind = RuleKind(kind)
    if not 0 <= N <= MAX_DEGREE:
        raise ValueError(f"degree N={N} outside [0, {MAX_DEGREE}]")

    if kind is RuleKind.GAUSS_LEGENDRE:
        i = np.arange(N + 1)
        x0 = -np.cos(np.pi * (4 * i + 3) / (4 * N + 6))
        x = _symmetrize(_newton(lambda x: legendre_eval(N + 1, x), x0))
        _, dp = legendre_eval(N + 1, x)
        w = 2.0 / ((1.0 - x**2) * dp**2)
    else:
        if N < 1:
            raise ValueError("Gauss-Lobatto-Legendre rules need N >= 1")
        x = np.empty(N + 1)
        x[0], x[-1] = -1.0, 1.0
        if N > 1:
            i = np.arange(1, N)
            x0 = -np.cos(np.pi * i / N)

            def f(x):
                # roots of P_N'; second derivative from the Legendre ODE
                p, dp = legendre_eval(N, x)
                ddp = (2 * x * dp - N * (N + 1) * p) / (1 - x**2)
                return dp, ddp

            x[1:-1] = _newton(f, x0)
            x = _symmetrize(x)
        p, _ = legendre_eval(N, x)
        w = 2.0 / (N * (N + 1) * p**2)

    w = 0.5 * (w + w[::-1])
    for arr in (x, w):
        arr.setflags(write=False)
    bw = barycentric_weights(x)
    bw.setflags(write=False)
    return QuadratureRule(kind, N, x, w, bw)


def differentiation_matrix(rule_or_nodes) -> np.ndarray:
    """``D[k, j] = l_j'(x_k)`` for the Lagrange basis on the given nodes.

    Accepts a :class:`QuadratureRule` or a plain node array.  Diagonal entries
    use the negative-sum trick so every row sums to zero up to rounding.
    """
    if isinstance(rule_or_nodes, QuadratureRule):
        x, w = rule_or_nodes.nodes, rule_or_nodes.barycentric_weights
    else:
        x = np.asarray(rule_or_nodes, dtype=float)
        w = barycentric_weights(x)
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    D[np.diag_indices(n)] = -D.sum(axis=1)
    return D


def interpolation_matrix(nodes, x_eval, bary=None) -> np.ndarray:
    """Matrix ``L`` with ``L @ values`` the interpolant evaluated at ``x_eval``."""
    nodes = np.asarray(nodes, dtype=float)
    x_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))
    w = barycentric_weights(nodes) if bary is None else bary
    diff = x_eval[:, None] - nodes[None, :]
    # closer than this w / diff could overflow; the point is a node to all digits
    hit = np.abs(diff) < HIT_TOL
    diff[hit] = 1.0
    terms = w[None, :] / diff
    L = terms / terms.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    L[rows] = hit[rows].astype(float)
    return L


def interpolate(nodes, nodal_values, x_eval) -> np.ndarray:
    """Evaluate the degree-``len(nodes) - 1`` interpolant at ``x_eval``."""
    nodal_values = np.asarray(nodal_values, dtype=float)
    if nodal_values.shape[-1] != len(nodes):
        raise ValueError("nodal_values and nodes differ in length")
    return interpolation_matrix(nodes, x_eval) @ nodal_values
