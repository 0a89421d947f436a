"""Summation-by-parts operator sets ``(D, M, R, B)`` and artificial dissipation.

Every set satisfies ``M D + D^T M = R^T B R`` with a diagonal, positive ``M``.
Spectral sets come from a quadrature rule on [-1, 1]; finite-difference sets
are the classical diagonal-norm central operators of interior order 2 and 4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .nodes import QuadratureRule, RuleKind, differentiation_matrix, interpolation_matrix

BOUNDARY = np.diag([-1.0, 1.0])
BOUNDARY.setflags(write=False)


class OperatorKind(enum.Enum):
    SPECTRAL_GL = "gl"
    SPECTRAL_GLL = "gll"
    FINITE_DIFFERENCE = "fd"


@dataclass(frozen=True)
class SbpOperatorSet:
    D: np.ndarray = field(repr=False)
    M: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    kind: OperatorKind
    includes_boundary: bool
    order: int | None = None  # interior order, finite differences only

    @property
    def B(self) -> np.ndarray:
        return BOUNDARY

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.diag(self.M)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def build_spectral_sbp(rule: QuadratureRule) -> SbpOperatorSet:
    D = differentiation_matrix(rule)
    M = np.diag(rule.weights)
    R = interpolation_matrix(rule.nodes, [-1.0, 1.0], rule.barycentric_weights)
    gll = rule.kind is RuleKind.GAUSS_LOBATTO_LEGENDRE
    kind = OperatorKind.SPECTRAL_GLL if gll else OperatorKind.SPECTRAL_GL
    nodes = np.array(rule.nodes)
    _freeze(D, M, R, nodes)
    return SbpOperatorSet(D, M, R, nodes, kind, includes_boundary=gll)


# Diagonal-norm boundary closures (norm weights and derivative rows, h = 1).
_FD_CLOSURES = {
    2: dict(
        norm=[1 / 2],
        rows=[[-1.0, 1.0]],
        interior=[-1 / 2, 0.0, 1 / 2],
        min_nodes=3,
    ),
    4: dict(
        norm=[17 / 48, 59 / 48, 43 / 48, 49 / 48],
        rows=[
            [-24 / 17, 59 / 34, -4 / 17, -3 / 34, 0.0, 0.0],
            [-1 / 2, 0.0, 1 / 2, 0.0, 0.0, 0.0],
            [4 / 43, -59 / 86, 0.0, 59 / 86, -4 / 43, 0.0],
            [3 / 98, 0.0, -59 / 98, 0.0, 32 / 49, -4 / 49],
        ],
        interior=[1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12],
        min_nodes=8,
    ),
}

FD_ORDERS = tuple(_FD_CLOSURES)


def fd_min_nodes(order: int) -> int:
    return _FD_CLOSURES[order]["min_nodes"]


def build_fd_sbp(order: int, n_nodes: int, element_length: float = 2.0) -> SbpOperatorSet:
    """Central diagonal-norm FD-SBP block on ``n_nodes`` equispaced nodes.

    Nodes span ``[-element_length / 2, element_length / 2]``; the semidiscretisation
    expects the default length 2 (the reference element).
    """
    if order not in _FD_CLOSURES:
        raise ValueError(f"FD order must be one of {FD_ORDERS}, got {order}")
    spec = _FD_CLOSURES[order]
    if n_nodes < spec["min_nodes"]:
        raise ValueError(
            f"order-{order} closure needs at least {spec['min_nodes']} nodes, got {n_nodes}"
        )
    if element_length <= 0:
        raise ValueError("element_length must be positive")

    n = n_nodes
    h = element_length / (n - 1)
    stencil = np.asarray(spec["interior"])
    half = len(stencil) // 2
    closure = np.asarray(spec["rows"])
    nb = closure.shape[0]

    D = np.zeros((n, n))
    for i in range(nb, n - nb):
        D[i, i - half : i + half + 1] = stencil
    D[:nb, : closure.shape[1]] = closure
    # right closure by antisymmetric reflection
    D[n - nb :, n - closure.shape[1] :] = -closure[::-1, ::-1]
    D /= h

    w = np.ones(n)
    w[:nb] = spec["norm"]
    w[n - nb :] = spec["norm"][::-1]
    M = np.diag(h * w)

    R = np.zeros((2, n))
    R[0, 0] = R[1, -1] = 1.0
    nodes = np.linspace(-element_length / 2, element_length / 2, n)
    _freeze(D, M, R, nodes)
    return SbpOperatorSet(
        D, M, R, nodes, OperatorKind.FINITE_DIFFERENCE, includes_boundary=True, order=order
    )


def verify_sbp(ops: SbpOperatorSet) -> float:
    """Max-norm residual of ``M D + D^T M - R^T B R``."""
    res = ops.M @ ops.D + ops.D.T @ ops.M - ops.R.T @ ops.B @ ops.R
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class DissipationOperator:
    matrix: np.ndarray = field(repr=False)
    order: int
    strength: float


def difference_matrix(p: int, n: int, h: float) -> np.ndarray:
    """Narrow ``p``-th difference divided by ``h**p``, one-sided near the ends."""
    coeffs = np.array([(-1) ** (p - j) * comb(p, j) for j in range(p + 1)], dtype=float)
    Dp = np.zeros((n, n))
    for i in range(n):
        start = min(max(i - p // 2, 0), n - p - 1)
        Dp[i, start : start + p + 1] = coeffs
    return Dp / h**p


def build_dissipation(
    order: int, n_nodes: int, strength: float, element_length: float = 2.0
) -> DissipationOperator:
    """``-strength * h**(2p-1) * M^-1 Dp^T M Dp`` with ``p = order // 2``.

    Negative semidefinite in the ``M`` inner product, and zero on polynomials of
    degree below ``p``.
    """
    if strength < 0:
        raise ValueError(f"dissipation strength must be nonnegative, got {strength}")
    ops = build_fd_sbp(order, n_nodes, element_length)
    p = order // 2
    h = element_length / (n_nodes - 1)
    Dp = difference_matrix(p, n_nodes, h)
    w = ops.weights
    A = -strength * h ** (2 * p - 1) * (Dp.T * w) @ Dp / w[:, None]
    if strength == 0:
        A = np.zeros_like(A)
    A.setflags(write=False)
    return DissipationOperator(A, order, float(strength))


def dump_operator(ops: SbpOperatorSet, path: str | Path) -> None:
    """Write ``D``, ``M``, ``R`` and ``B`` as plain-text blocks, 17 significant digits."""
    lines = [f"# kind={ops.kind.value} n={ops.n} includes_boundary={ops.includes_boundary}"]
    for name in ("D", "M", "R", "B"):
        mat = getattr(ops, name)
        lines.append(f"# {name} {mat.shape[0]}x{mat.shape[1]}")
        lines.extend(" ".join(f"{v:.17g}" for v in row) for row in mat)
    Path(path).write_text("\n".join(lines) + "\n")


def load_operator_blocks(path: str | Path) -> dict[str, np.ndarray]:
    blocks: dict[str, list[list[float]]] = {}
    current = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            head = line[2:].split()
            if head and head[0] in ("D", "M", "R", "B"):
                current = head[0]
                blocks[current] = []
            continue
        if current is not None and line.strip():
            blocks[current].append([float(v) for v in line.split()])
    return {k: np.array(v) for k, v in blocks.items()}
