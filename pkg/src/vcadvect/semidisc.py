"""Semidiscretisation of ``u_t + (a(x) u)_x = 0`` on a multi-element mesh.

Each element carries nodal values on the reference element [-1, 1].  The right
hand side is the strong-form flux-reconstruction scheme with correction matrix
``M^-1 R^T B``:

    du/dt = (2 / dx_k) * (volume - M^-1 R^T B (f_num - f_interior))

with a split or unsplit volume term.  The state is a ``(K, n)`` array, one row
per element.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .nodes import RuleKind, build_rule, interpolation_matrix
from .sbp import (
    DissipationOperator,
    OperatorKind,
    SbpOperatorSet,
    build_dissipation,
    build_fd_sbp,
    build_spectral_sbp,
)

BLOWUP_THRESHOLD = 1e100


class BlowUpError(RuntimeError):
    """Raised when a state or right-hand side stops being finite (or explodes)."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class FluxKind(enum.Enum):
    EDGE_CENTRAL = "edge_central"
    SPLIT_CENTRAL = "split_central"
    UNSPLIT_CENTRAL = "unsplit_central"
    EDGE_UPWIND = "edge_upwind"
    SPLIT_UPWIND = "split_upwind"
    UNSPLIT_UPWIND = "unsplit_upwind"

    @property
    def family(self) -> str:
        return self.value.split("_")[0]

    @property
    def is_upwind(self) -> bool:
        return self.value.endswith("upwind")

    @property
    def upwind_member(self) -> FluxKind:
        return FluxKind(f"{self.family}_upwind")


class VolumeForm(enum.Enum):
    SPLIT = "split"
    UNSPLIT = "unsplit"


class Sampling(enum.Enum):
    DIRECT = "direct"
    LOBATTO = "lobatto"


@dataclass(frozen=True)
class SchemeConfig:
    """One scheme out of basis x flux x volume form (x FD options)."""

    basis: str = "gl"  # "gl", "gll" or "fd"
    N: int = 3
    flux: FluxKind = FluxKind.SPLIT_UPWIND
    volume_form: VolumeForm = VolumeForm.SPLIT
    fd_order: int = 4
    fd_nodes: int = 100
    dissipation: float | None = None
    sampling: Sampling = Sampling.LOBATTO

    def __post_init__(self):
        if self.basis not in ("gl", "gll", "fd"):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "flux", FluxKind(self.flux))
        object.__setattr__(self, "volume_form", VolumeForm(self.volume_form))
        object.__setattr__(self, "sampling", Sampling(self.sampling))
        if self.dissipation is not None and self.basis != "fd":
            raise ValueError("artificial dissipation is only available for the fd basis")

    @property
    def n_nodes(self) -> int:
        return self.fd_nodes if self.basis == "fd" else self.N + 1

    def build_operators(self) -> SbpOperatorSet:
        if self.basis == "fd":
            return build_fd_sbp(self.fd_order, self.fd_nodes)
        return build_spectral_sbp(build_rule(self.basis, self.N))


@dataclass(frozen=True)
class Mesh1D:
    x_L: float
    x_R: float
    boundaries: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        if not self.x_L < self.x_R:
            raise ValueError("need x_L < x_R")
        if len(b) < 2 or np.any(np.diff(b) <= 0):
            raise ValueError("element boundaries must be strictly increasing")
        if b[0] != self.x_L or b[-1] != self.x_R:
            raise ValueError("boundaries must start at x_L and end at x_R")
        b.setflags(write=False)
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def uniform(cls, x_L: float, x_R: float, K: int) -> Mesh1D:
        if K < 1:
            raise ValueError("need at least one element")
        b = np.linspace(x_L, x_R, K + 1)
        b[0], b[-1] = x_L, x_R
        return cls(float(x_L), float(x_R), b)

    @property
    def K(self) -> int:
        return len(self.boundaries) - 1

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def physical_nodes(self, ref_nodes) -> np.ndarray:
        """Map reference nodes on [-1, 1] into every element, shape ``(K, n)``."""
        ref = np.asarray(ref_nodes)
        left = self.boundaries[:-1, None]
        return left + 0.5 * (ref[None, :] + 1.0) * self.dx[:, None]


def _evaluate(f, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()


@dataclass(frozen=True)
class CoefficientField:
    """Speed ``a`` sampled on a mesh/basis.

    ``nodal`` feeds the volume terms and ``traces = R @ nodal`` the split fluxes;
    ``edges`` are exact interface values used by the edge fluxes and diagnostics.
    """

    a: Callable = field(repr=False)
    a_prime: Callable = field(repr=False)
    nodal: np.ndarray = field(repr=False)
    nodal_prime: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    traces: np.ndarray = field(repr=False)
    mode: Sampling = Sampling.LOBATTO


def sample_coefficient(
    a: Callable,
    a_prime: Callable,
    mesh: Mesh1D,
    ops: SbpOperatorSet,
    mode: Sampling | str = Sampling.LOBATTO,
) -> CoefficientField:
    """Sample ``a`` at the basis nodes of every element.

    In ``LOBATTO`` mode on a Gauss-Legendre basis the nodal values come from the
    degree-N interpolant of ``a`` through the element's Gauss-Lobatto points, so
    that the restriction to the element edges reproduces ``a`` there.
    """
    mode = Sampling(mode)
    x = mesh.physical_nodes(ops.nodes)
    if mode is Sampling.LOBATTO and ops.kind is OperatorKind.SPECTRAL_GL:
        gll = build_rule(RuleKind.GAUSS_LOBATTO_LEGENDRE, ops.n - 1)
        xs = mesh.physical_nodes(gll.nodes)
        nodal = _evaluate(a, xs) @ interpolation_matrix(gll.nodes, ops.nodes).T
    else:
        nodal = _evaluate(a, x)
    nodal_prime = _evaluate(a_prime, x)
    edges = _evaluate(a, mesh.boundaries)
    for name, arr in (("a", nodal), ("a'", nodal_prime), ("a", edges)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} is not finite at some sample point")
    traces = nodal @ ops.R.T
    return CoefficientField(a, a_prime, nodal, nodal_prime, edges, traces, mode)


def numerical_flux(kind, u_minus, u_plus, a_minus=None, a_plus=None, a_edge=None):
    """Interface flux for scalar or array traces.

    For the unsplit kinds ``u_minus`` and ``u_plus`` are the products
    ``(a u)_-`` and ``(a u)_+`` (see :func:`unsplit_flux`).
    """
    kind = FluxKind(kind)
    if kind is FluxKind.EDGE_CENTRAL:
        return a_edge * (u_minus + u_plus) / 2
    if kind is FluxKind.SPLIT_CENTRAL:
        return (a_minus * u_minus + a_plus * u_plus) / 2
    if kind is FluxKind.UNSPLIT_CENTRAL:
        return (u_minus + u_plus) / 2
    if kind is FluxKind.EDGE_UPWIND:
        return a_edge * u_minus
    if kind is FluxKind.SPLIT_UPWIND:
        return a_minus * u_minus
    return u_minus


def unsplit_flux(kind, au_minus, au_plus):
    kind = FluxKind(kind)
    if kind.family != "unsplit":
        raise ValueError(f"{kind.value} is not an unsplit flux")
    return numerical_flux(kind, au_minus, au_plus)


def boundary_traces(state: np.ndarray, ops: SbpOperatorSet, g_left: float):
    """``(u_minus, u_plus)`` at the ``K + 1`` interfaces, left to right.

    The physical left interface takes ``g_left`` as exterior state; the physical
    right interface has no exterior state and gets ``nan`` for ``u_plus``.
    """
    ut = state @ ops.R.T
    K = state.shape[0]
    u_minus = np.empty(K + 1)
    u_plus = np.empty(K + 1)
    u_minus[0] = g_left
    u_minus[1:] = ut[:, 1]
    u_plus[:K] = ut[:, 0]
    u_plus[K] = np.nan
    return u_minus, u_plus


def interface_fluxes(state, coeff: CoefficientField, kind: FluxKind, ops: SbpOperatorSet, g_left):
    """Numerical flux at every interface; the right physical one is upwind."""
    kind = FluxKind(kind)
    u_minus, u_plus = boundary_traces(state, ops, g_left)
    K = state.shape[0]
    aR = coeff.edges[-1]
    if kind.family == "unsplit":
        aut = (coeff.nodal * state) @ ops.R.T
        au_minus = np.concatenate(([coeff.edges[0] * g_left], aut[:, 1]))
        au_plus = np.concatenate((aut[:, 0], [np.nan]))
        f = np.empty(K + 1)
        f[:K] = numerical_flux(kind, au_minus[:K], au_plus[:K])
        f[K] = au_minus[K]
        return f
    a_minus = np.concatenate(([coeff.edges[0]], coeff.traces[:, 1]))
    a_plus = np.concatenate((coeff.traces[:, 0], [aR]))
    f = np.empty(K + 1)
    f[:K] = numerical_flux(
        kind, u_minus[:K], u_plus[:K], a_minus[:K], a_plus[:K], coeff.edges[:K]
    )
    f[K] = numerical_flux(kind.upwind_member, u_minus[K], 0.0, a_minus[K], 0.0, aR)
    return f


def compute_rhs(
    state: np.ndarray,
    t: float,
    mesh: Mesh1D,
    coeff: CoefficientField,
    scheme: SchemeConfig,
    ops: SbpOperatorSet,
    g_L: Callable[[float], float],
    dissipation: DissipationOperator | None = None,
) -> np.ndarray:
    """Time derivative of every element's nodal values."""
    state = np.asarray(state, dtype=float)
    if state.shape != (mesh.K, ops.n) or coeff.nodal.shape != state.shape:
        raise ValueError(
            f"state shape {state.shape} does not match mesh/basis {(mesh.K, ops.n)}"
        )
    D, R = ops.D, ops.R
    a = coeff.nodal
    au = a * state
    if scheme.volume_form is VolumeForm.SPLIT:
        Da = a @ D.T
        volume = -0.5 * (au @ D.T + a * (state @ D.T) + state * Da)
        f_int = 0.5 * (au @ R.T) + 0.5 * coeff.traces * (state @ R.T)
    else:
        volume = -(au @ D.T)
        f_int = au @ R.T

    f = interface_fluxes(state, coeff, scheme.flux, ops, g_L(t))
    f_num = np.stack((f[:-1], f[1:]), axis=1)
    jump = (f_num - f_int) * ops.B.diagonal()
    correction = (jump @ R) / ops.weights
    rhs = (volume - correction) * (2.0 / mesh.dx)[:, None]
    if dissipation is not None:
        rhs = rhs + state @ dissipation.matrix.T
    if not np.all(np.isfinite(rhs)):
        raise BlowUpError(f"non-finite right-hand side at t={t}", t)
    return rhs


@dataclass
class Discretisation:
    """Everything needed to evaluate the right-hand side of one run.

    The scheme is linear in the state and affine in the inflow datum, so it is
    also available as ``du/dt = A u + b g_L(t)`` on the flattened state.
    """

    mesh: Mesh1D
    scheme: SchemeConfig
    ops: SbpOperatorSet
    coeff: CoefficientField
    g_L: Callable[[float], float]
    dissipation: DissipationOperator | None = None
    _linear: tuple | None = field(default=None, repr=False)

    @classmethod
    def build(cls, mesh, scheme: SchemeConfig, a, a_prime, g_L) -> Discretisation:
        ops = scheme.build_operators()
        coeff = sample_coefficient(a, a_prime, mesh, ops, scheme.sampling)
        diss = None
        if scheme.basis == "fd" and scheme.dissipation is not None:
            if not np.allclose(mesh.dx, mesh.dx[0]):
                raise ValueError("artificial dissipation needs a uniform mesh")
            diss = build_dissipation(
                scheme.fd_order, scheme.fd_nodes, scheme.dissipation, float(mesh.dx[0])
            )
        return cls(mesh, scheme, ops, coeff, g_L, diss)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.mesh.K, self.ops.n)

    @property
    def physical_nodes(self) -> np.ndarray:
        return self.mesh.physical_nodes(self.ops.nodes)

    def rhs(self, state, t):
        return compute_rhs(
            state, t, self.mesh, self.coeff, self.scheme, self.ops, self.g_L, self.dissipation
        )

    def _rhs_with_inflow(self, state, g):
        return compute_rhs(
            state, 0.0, self.mesh, self.coeff, self.scheme, self.ops, lambda _t: g,
            self.dissipation,
        )

    def linear_operator(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``(A, b)`` with ``rhs(u, t).ravel() == A @ u.ravel() + b * g_L(t)``."""
        if self._linear is None:
            size = self.mesh.K * self.ops.n
            A = np.empty((size, size))
            e = np.zeros(size)
            for j in range(size):
                e[j] = 1.0
                A[:, j] = self._rhs_with_inflow(e.reshape(self.shape), 0.0).ravel()
                e[j] = 0.0
            b = self._rhs_with_inflow(np.zeros(self.shape), 1.0).ravel()
            self._linear = (A, b)
        return self._linear

    def fast_rhs(self) -> Callable:
        """Right-hand side on flattened states backed by the assembled operator."""
        A, b = self.linear_operator()
        g = self.g_L

        def rhs(u, t):
            return A @ u + b * g(t)

        return rhs
