import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcadvect.diagnostics import energy_rate, mass
from vcadvect.nodes import interpolate
from vcadvect.semidisc import (
    BlowUpError,
    Discretisation,
    FluxKind,
    Mesh1D,
    Sampling,
    SchemeConfig,
    VolumeForm,
    boundary_traces,
    compute_rhs,
    interface_fluxes,
    numerical_flux,
    sample_coefficient,
    unsplit_flux,
)

COMBOS = list(itertools.product(["gl", "gll"], FluxKind, VolumeForm))


def make(basis, flux, form, a, a_prime, g, K=3, domain=(0.0, 1.0), N=3, **kw):
    scheme = SchemeConfig(basis=basis, N=N, flux=flux, volume_form=form, **kw)
    return Discretisation.build(Mesh1D.uniform(*domain, K), scheme, a, a_prime, g)


def const(c):
    return lambda x: c + 0 * np.asarray(x, dtype=float)


def test_flux_formulas():
    assert numerical_flux("edge_central", 1.0, 3.0, a_edge=2.0) == 4.0
    assert numerical_flux("split_upwind", 2.0, 9.0, 1.5, 7.0) == 3.0
    assert numerical_flux("split_central", 1.0, 3.0, 2.0, 4.0) == 7.0
    assert numerical_flux("edge_upwind", 2.0, 5.0, a_edge=3.0) == 6.0
    assert unsplit_flux("unsplit_central", 2.0, 4.0) == 3.0
    assert unsplit_flux("unsplit_upwind", 2.0, 4.0) == 2.0
    with pytest.raises(ValueError):
        unsplit_flux("split_central", 1.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(um=st.floats(-10, 10), up=st.floats(-10, 10), a=st.floats(0, 5))
def test_edge_and_split_fluxes_agree_for_continuous_a(um, up, a):
    for fam in ("central", "upwind"):
        e = numerical_flux(f"edge_{fam}", um, up, a, a, a)
        s = numerical_flux(f"split_{fam}", um, up, a, a, a)
        assert abs(e - s) <= 1e-12 * (1 + abs(e))


def test_flux_kind_properties():
    assert FluxKind.SPLIT_CENTRAL.upwind_member is FluxKind.SPLIT_UPWIND
    assert FluxKind.UNSPLIT_UPWIND.family == "unsplit"
    assert not FluxKind.EDGE_CENTRAL.is_upwind


@pytest.mark.parametrize("basis,flux,form", COMBOS)
def test_free_stream_preservation(basis, flux, form):
    d = make(basis, flux, form, const(1.0), const(0.0), lambda t: 2.5)
    rhs = d.rhs(np.full(d.shape, 2.5), 0.0)
    assert np.max(np.abs(rhs)) <= 1e-12


@pytest.mark.parametrize("flux,form", list(itertools.product(FluxKind, VolumeForm)))
def test_free_stream_fd(flux, form):
    d = make("fd", flux, form, const(0.7), const(0.0), lambda t: 1.0, K=2, fd_nodes=24)
    assert np.max(np.abs(d.rhs(np.ones(d.shape), 0.0))) <= 1e-12


@pytest.mark.parametrize("basis,flux,form", COMBOS)
def test_linear_speed_single_element(basis, flux, form):
    # u = 1, a = x on [0, 1]: u_t = -(x)_x = -1 everywhere
    d = make(basis, flux, form, lambda x: x, const(1.0), lambda t: 1.0, K=1, N=4)
    np.testing.assert_allclose(d.rhs(np.ones(d.shape), 0.0), -1.0, atol=1e-12)


def test_gll_split_and_unsplit_surfaces_coincide():
    a = lambda x: 1.5 + np.sin(x)
    ap = lambda x: np.cos(x)
    rng = np.random.default_rng(0)
    for flux in FluxKind:
        d = make("gll", flux, "split", a, ap, lambda t: 0.3, K=4)
        u = rng.normal(size=d.shape)
        # GLL restriction commutes with multiplication, so both interior traces agree
        assert np.allclose((d.coeff.nodal * u) @ d.ops.R.T, d.coeff.traces * (u @ d.ops.R.T),
                           atol=1e-14)
        if flux.family == "split":
            other = make("gll", FluxKind(f"unsplit_{flux.value.split('_')[1]}"), "split", a, ap,
                         lambda t: 0.3, K=4)
            np.testing.assert_allclose(d.rhs(u, 0.0), other.rhs(u, 0.0), atol=1e-11)


@pytest.mark.parametrize("sampling", list(Sampling))
@pytest.mark.parametrize("basis", ["gl", "gll"])
def test_edge_and_split_rhs_agree_for_polynomial_a(sampling, basis):
    a = lambda x: 1 + x + 0.5 * x**2
    ap = lambda x: 1 + x
    u = np.random.default_rng(1).normal(size=(5, 4))
    for fam in ("central", "upwind"):
        e = make(basis, f"edge_{fam}", "split", a, ap, lambda t: 0.1, K=5, sampling=sampling)
        s = make(basis, f"split_{fam}", "split", a, ap, lambda t: 0.1, K=5, sampling=sampling)
        np.testing.assert_allclose(e.rhs(u, 0.0), s.rhs(u, 0.0), atol=1e-12)


def test_sampling_modes():
    mesh = Mesh1D.uniform(0.1, np.pi / 3, 4)
    gl = SchemeConfig(basis="gl", N=3).build_operators()
    gll = SchemeConfig(basis="gll", N=3).build_operators()
    # a = x on GLL: nodal values are the physical node coordinates
    c = sample_coefficient(lambda x: x, const(1.0), mesh, gll)
    np.testing.assert_array_equal(c.nodal, mesh.physical_nodes(gll.nodes))
    # polynomial a: both modes agree
    sq = lambda x: np.asarray(x) ** 2
    lo = sample_coefficient(sq, lambda x: 2 * x, mesh, gl, "lobatto")
    di = sample_coefficient(sq, lambda x: 2 * x, mesh, gl, "direct")
    np.testing.assert_allclose(lo.nodal, di.nodal, atol=1e-13)
    # cos: exact edges in both modes, different nodal values
    lo = sample_coefficient(np.cos, lambda x: -np.sin(x), mesh, gl, "lobatto")
    di = sample_coefficient(np.cos, lambda x: -np.sin(x), mesh, gl, "direct")
    np.testing.assert_array_equal(lo.edges, np.cos(mesh.boundaries))
    np.testing.assert_array_equal(lo.edges, di.edges)
    assert np.max(np.abs(lo.nodal - di.nodal)) > 1e-8
    np.testing.assert_allclose(lo.traces[:, 0], np.cos(mesh.boundaries[:-1]), atol=1e-14)
    np.testing.assert_allclose(lo.traces[:, 1], np.cos(mesh.boundaries[1:]), atol=1e-14)


def test_sampling_rejects_nonfinite():
    mesh = Mesh1D.uniform(-1, 1, 2)
    ops = SchemeConfig(basis="gll", N=2).build_operators()
    with pytest.raises(ValueError), np.errstate(divide="ignore"):
        sample_coefficient(lambda x: 1 / np.asarray(x), const(0.0), mesh, ops)


def test_mesh_validation_and_lengths():
    m = Mesh1D.uniform(-0.1, 1.0, 7)
    assert abs(m.dx.sum() - 1.1) <= 1e-13
    with pytest.raises(ValueError):
        Mesh1D(1.0, 0.0, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Mesh1D(0.0, 1.0, np.array([0.0, 0.6, 0.5, 1.0]))
    with pytest.raises(ValueError):
        Mesh1D.uniform(0, 1, 0)


def test_boundary_traces():
    ops = SchemeConfig(basis="gl", N=5).build_operators()
    mesh = Mesh1D.uniform(0, 1, 4)
    x = mesh.physical_nodes(ops.nodes)
    u = 1 + x - 2 * x**3
    um, up = boundary_traces(u, ops, 0.25)
    assert um[0] == 0.25 and np.isnan(up[-1])
    np.testing.assert_allclose(um[1:-1], up[1:-1], atol=1e-12)
    r = np.random.default_rng(5).normal(size=(4, 6))
    um, up = boundary_traces(r, ops, 0.0)
    for k in range(4):
        ends = interpolate(ops.nodes, r[k], np.array([-1.0, 1.0]))
        assert abs(up[k] - ends[0]) <= 1e-13 and abs(um[k + 1] - ends[1]) <= 1e-13
    gll = SchemeConfig(basis="gll", N=3).build_operators()
    um, up = boundary_traces(r[:, :4], gll, 0.0)
    np.testing.assert_array_equal(up[:-1], r[:, 0])
    np.testing.assert_array_equal(um[1:], r[:, 3])


def test_rhs_rejects_shape_mismatch():
    d = make("gl", "split_upwind", "split", const(1.0), const(0.0), lambda t: 0.0)
    with pytest.raises(ValueError):
        d.rhs(np.zeros((3, 5)), 0.0)


def test_rhs_signals_blowup():
    d = make("gl", "split_upwind", "split", const(1.0), const(0.0), lambda t: np.nan)
    with pytest.raises(BlowUpError):
        d.rhs(np.zeros(d.shape), 0.0)


@pytest.mark.parametrize("basis", ["gl", "gll"])
@pytest.mark.parametrize("flux", ["split_upwind", "edge_upwind"])
def test_energy_rate_nonpositive(basis, flux):
    d = make(basis, flux, "split", lambda x: x, const(1.0), lambda t: 0.0, K=8,
             domain=(0.0, 2 * np.pi))
    rng = np.random.default_rng(7)
    for _ in range(100):
        u = rng.normal(size=d.shape)
        assert energy_rate(u, d.rhs(u, 0.0), d.mesh, d.ops) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), basis=st.sampled_from(["gl", "gll"]),
       flux=st.sampled_from(list(FluxKind)), form=st.sampled_from(list(VolumeForm)))
def test_mass_balance(seed, basis, flux, form):
    a = lambda x: 2 + np.sin(3 * x)
    ap = lambda x: 3 * np.cos(3 * x)
    d = make(basis, flux, form, a, ap, lambda t: 0.4, K=5)
    u = np.random.default_rng(seed).normal(size=d.shape)
    f = interface_fluxes(u, d.coeff, flux, d.ops, 0.4)
    rate = mass(d.rhs(u, 0.0), d.mesh, d.ops)
    assert abs(rate - (f[0] - f[-1])) <= 1e-11 * (1 + np.abs(f).max())


def test_linear_operator_matches_rhs():
    d = make("gl", "split_central", "split", np.cos, lambda x: -np.sin(x), np.sin, K=4,
             domain=(0.1, np.pi / 3))
    u = np.random.default_rng(2).normal(size=d.shape)
    fast = d.fast_rhs()
    for t in (0.0, 0.7):
        np.testing.assert_allclose(fast(u.ravel(), t), d.rhs(u, t).ravel(), atol=1e-11)


def test_dissipation_only_for_fd():
    with pytest.raises(ValueError):
        SchemeConfig(basis="gl", dissipation=1.0)
    d = make("fd", "split_central", "split", const(1.0), const(0.0), lambda t: 1.0, K=1,
             fd_nodes=30, dissipation=1.0)
    assert d.dissipation is not None
    assert np.max(np.abs(d.rhs(np.ones(d.shape), 0.0))) <= 1e-12
