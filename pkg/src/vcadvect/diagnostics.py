"""Discrete-norm errors and the terms of the error energy balance.

Along a run the error ``eps1 = I^N(u) - U`` (nodal samples of the exact solution
minus the numerical solution) is tracked together with

* ``BTs``: interface and boundary dissipation of the numerical flux,
* ``Int_d``: the volume term weighted by ``a'``,
* ``Theta2``: the Gauss-node defect between restriction and multiplication,
* ``eta = (BTs + Int_d + Theta2) / ||eps1||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nodes import build_rule, interpolation_matrix
from .sbp import OperatorKind, SbpOperatorSet
from .semidisc import CoefficientField, FluxKind, Mesh1D, numerical_flux

ETA_EPS = 1e-14


def broken_norm(values: np.ndarray, mesh: Mesh1D, ops: SbpOperatorSet) -> float:
    """``sqrt(sum_k dx_k/2 * ||v^k||_N^2)`` for an elementwise nodal array."""
    jac = 0.5 * mesh.dx
    return float(np.sqrt(np.sum(jac[:, None] * ops.weights * values**2)))


def energy(state: np.ndarray, mesh: Mesh1D, ops: SbpOperatorSet) -> float:
    return broken_norm(state, mesh, ops) ** 2


def energy_rate(state, rhs, mesh: Mesh1D, ops: SbpOperatorSet) -> float:
    """``d/dt`` of :func:`energy` given the right-hand side at ``state``."""
    jac = 0.5 * mesh.dx
    return float(2 * np.sum(jac[:, None] * ops.weights * state * rhs))


def mass(state, mesh: Mesh1D, ops: SbpOperatorSet) -> float:
    jac = 0.5 * mesh.dx
    return float(np.sum(jac[:, None] * ops.weights * state))


def nodal_exact(exact, t: float, mesh: Mesh1D, ops: SbpOperatorSet) -> np.ndarray:
    return np.asarray(exact(t, mesh.physical_nodes(ops.nodes)), dtype=float)


def discrete_error(state, exact, mesh: Mesh1D, ops: SbpOperatorSet, t: float):
    """``(total, eps1)`` in the broken discrete norm.

    Both use nodal samples of the exact solution, so they coincide; the pair is
    kept so that callers do not depend on that.
    """
    diff = nodal_exact(exact, t, mesh, ops) - state
    norm = broken_norm(diff, mesh, ops)
    return norm, norm


def oversampled_error(state, exact, mesh: Mesh1D, ops: SbpOperatorSet, t: float, factor: int = 5):
    """L2 error of the piecewise interpolant, Gauss quadrature with ``factor * n`` points."""
    if ops.kind is OperatorKind.FINITE_DIFFERENCE:
        return float("nan")
    fine = build_rule("gl", min(factor * ops.n - 1, 32))
    L = interpolation_matrix(ops.nodes, fine.nodes)
    xf = mesh.physical_nodes(fine.nodes)
    diff = np.asarray(exact(t, xf), dtype=float) - state @ L.T
    jac = 0.5 * mesh.dx
    return float(np.sqrt(np.sum(jac[:, None] * fine.weights * diff**2)))


def edge_traces(values: np.ndarray, ops: SbpOperatorSet) -> np.ndarray:
    """Left/right element-edge values ``R v`` as a ``(K, 2)`` array."""
    return values @ ops.R.T


def compute_BTs(eps1_traces: np.ndarray, coeff: CoefficientField, flux_kind) -> float:
    """Boundary and interface terms of the error energy balance.

    ``sigma/2 (a_R (E_R^K)^2 + a_L (E_L^1)^2) + sigma/2 sum_k a_{k-1/2} [[E]]^2``
    with ``sigma = 1`` for upwind fluxes and ``0`` for central ones.
    """
    if not FluxKind(flux_kind).is_upwind:
        return 0.0
    E = np.asarray(eps1_traces, dtype=float)
    a = coeff.edges
    boundary = a[-1] * E[-1, 1] ** 2 + a[0] * E[0, 0] ** 2
    jumps = E[:-1, 1] - E[1:, 0]
    return float(0.5 * boundary + 0.5 * np.sum(a[1:-1] * jumps**2))


def compute_Int_d(eps1_nodal, coeff_derivative_nodal, mesh: Mesh1D, ops: SbpOperatorSet) -> float:
    jac = 0.5 * mesh.dx
    return float(0.5 * np.sum(jac[:, None] * ops.weights * eps1_nodal**2 * coeff_derivative_nodal))


def compute_Theta2(
    interp_traces: np.ndarray,
    eps1_traces: np.ndarray,
    coeff: CoefficientField,
    flux_kind,
    mesh: Mesh1D,
    ops: SbpOperatorSet | None = None,
    g_left: float | None = None,
) -> float:
    """Half the Jacobian-weighted sum of the per-element defects ``eps2^k``.

    ``eps2^k = 1/2 [a eps1 I(u)]_{-1}^{1}
               - [eps1 (f_num(I(u)^-, I(u)^+) - 1/2 (R a)(R I(u)))]_{-1}^{1}``

    The flux is evaluated on traces of the interpolant of the exact solution,
    with ``g_left`` (default: the left trace itself) as exterior state at
    ``x_L``; the right physical flux is upwind.  Zero on Gauss-Lobatto sets.
    """
    if ops is not None and ops.kind is OperatorKind.SPECTRAL_GLL:
        return 0.0
    kind = FluxKind(flux_kind)
    I = np.asarray(interp_traces, dtype=float)
    E = np.asarray(eps1_traces, dtype=float)
    K = I.shape[0]
    a_edge = coeff.edges
    ra = coeff.traces
    g = I[0, 0] if g_left is None else g_left

    u_minus = np.concatenate(([g], I[:, 1]))
    u_plus = np.concatenate((I[:, 0], [0.0]))
    f = np.empty(K + 1)
    if kind.family == "unsplit":
        # (a u)_- restricted from the interpolant: a_edge * I at the edge traces
        au_minus = np.concatenate(([a_edge[0] * g], ra[:, 1] * I[:, 1]))
        au_plus = np.concatenate((ra[:, 0] * I[:, 0], [0.0]))
        f[:K] = numerical_flux(kind, au_minus[:K], au_plus[:K])
        f[K] = au_minus[K]
    else:
        a_minus = np.concatenate(([a_edge[0]], ra[:, 1]))
        a_plus = np.concatenate((ra[:, 0], [a_edge[-1]]))
        f[:K] = numerical_flux(kind, u_minus[:K], u_plus[:K], a_minus[:K], a_plus[:K], a_edge[:K])
        f[K] = numerical_flux(kind.upwind_member, u_minus[K], 0.0, a_minus[K], 0.0, a_edge[K])
    f_num = np.stack((f[:-1], f[1:]), axis=1)
    a_el = np.stack((a_edge[:-1], a_edge[1:]), axis=1)
    sign = np.array([-1.0, 1.0])
    first = 0.5 * np.sum(sign * a_el * E * I, axis=1)
    second = np.sum(sign * E * (f_num - 0.5 * ra * I), axis=1)
    eps2 = first - second
    return float(0.5 * np.sum(0.5 * mesh.dx * eps2))


def compute_eta(BTs: float, Int_d: float, Theta2: float, eps1_norm: float) -> float | None:
    if eps1_norm > ETA_EPS:
        return (BTs + Int_d + Theta2) / eps1_norm**2
    return None


def check_sufficiency(
    BTs: float,
    Theta2: float,
    eps1_norm: float,
    max_abs_a_prime: float,
    a_prime_negative: bool = True,
) -> bool:
    """``(BTs + Theta2) / ||eps1||^2 > max|a'| / 2`` when ``a'`` is negative somewhere.

    Vacuously true when ``a' >= 0`` everywhere or when ``eps1`` vanishes.
    """
    if not a_prime_negative:
        return True
    if eps1_norm <= ETA_EPS:
        return True
    return (BTs + Theta2) / eps1_norm**2 > max_abs_a_prime / 2


@dataclass
class TheoryDiagnostics:
    times: list = field(default_factory=list)
    BTs: list = field(default_factory=list)
    Int_d: list = field(default_factory=list)
    Theta2: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    eta_running_mean: list = field(default_factory=list)
    sufficiency_flag: list = field(default_factory=list)


@dataclass
class ErrorTrace:
    times: list = field(default_factory=list)
    total_error: list = field(default_factory=list)
    eps1_error: list = field(default_factory=list)
    oversampled_error: list = field(default_factory=list)
    energy: list = field(default_factory=list)


class RunMonitor:
    """Observer collecting errors and theory diagnostics at sample times."""

    def __init__(self, disc, exact, a_prime_bounds: tuple[float, float], diagnostics: bool = True):
        self.disc = disc
        self.exact = exact
        self.with_theory = diagnostics
        self.min_a_prime, self.max_abs_a_prime = a_prime_bounds
        self.errors = ErrorTrace()
        self.theory = TheoryDiagnostics()
        self._eta_integral = 0.0
        self._eta_prev: tuple[float, float] | None = None
        self._eta_t0: float | None = None

    def __call__(self, t: float, state) -> None:
        disc = self.disc
        mesh, ops = disc.mesh, disc.ops
        u = np.asarray(state, dtype=float).reshape(disc.shape)
        u_nodal = nodal_exact(self.exact, t, mesh, ops)
        eps1 = u_nodal - u
        norm = broken_norm(eps1, mesh, ops)
        e = self.errors
        e.times.append(t)
        e.total_error.append(norm)
        e.eps1_error.append(norm)
        e.oversampled_error.append(oversampled_error(u, self.exact, mesh, ops, t))
        e.energy.append(energy(u, mesh, ops))
        if not self.with_theory:
            return
        kind = disc.scheme.flux
        E = edge_traces(eps1, ops)
        bts = compute_BTs(E, disc.coeff, kind)
        intd = compute_Int_d(eps1, disc.coeff.nodal_prime, mesh, ops)
        theta = compute_Theta2(
            edge_traces(u_nodal, ops), E, disc.coeff, kind, mesh, ops,
            float(self.exact(t, mesh.x_L)),
        )
        eta = compute_eta(bts, intd, theta, norm)
        th = self.theory
        th.times.append(t)
        th.BTs.append(bts)
        th.Int_d.append(intd)
        th.Theta2.append(theta)
        th.eta.append(eta)
        th.eta_running_mean.append(self._running_mean(t, eta))
        th.sufficiency_flag.append(
            check_sufficiency(bts, theta, norm, self.max_abs_a_prime, self.min_a_prime < 0)
        )

    def _running_mean(self, t, eta):
        # trapezoidal time average of eta over the samples where it is defined
        if eta is None:
            return None
        if self._eta_prev is None:
            self._eta_prev, self._eta_t0 = (t, eta), t
            return eta
        tp, ep = self._eta_prev
        self._eta_integral += 0.5 * (t - tp) * (eta + ep)
        self._eta_prev = (t, eta)
        span = t - self._eta_t0
        return self._eta_integral / span if span > 0 else eta

    def rows(self):
        e, th = self.errors, self.theory
        for i, t in enumerate(e.times):
            row = dict(
                time=t,
                total_error=e.total_error[i],
                eps1_error=e.eps1_error[i],
                oversampled_error=e.oversampled_error[i],
                energy=e.energy[i],
            )
            if self.with_theory:
                row.update(
                    BTs=th.BTs[i], Int_d=th.Int_d[i], Theta2=th.Theta2[i], eta=th.eta[i],
                    eta_running_mean=th.eta_running_mean[i],
                    sufficiency_flag=th.sufficiency_flag[i],
                )
            yield row
