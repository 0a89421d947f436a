import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcadvect.cases import (
    CaseId,
    CharacteristicsError,
    characteristics_oracle,
    inflow,
    make_case,
)

ALL = [
    ("a_x", "default"),
    ("a_x2", "default"),
    ("a_x2", "negative"),
    ("a_x2", "negative_exp"),
    ("a_1mx2", "default"),
    ("a_cos", "default"),
]


def case(pair):
    return make_case(*pair)


def test_case_definitions():
    c = make_case("a_x")
    assert c.domain == (0.0, 2 * np.pi)
    x = np.linspace(0, 2 * np.pi, 9)
    np.testing.assert_array_equal(c.exact(0.0, x), np.sin(12 * (x - 0.1)))
    c = make_case(CaseId.A_X2)
    assert c.domain == (0.1, 1.0) and c.life_span is None
    assert make_case("a_x2", "negative").domain == (-0.1, 1.0)
    assert make_case("a_x2", "negative").life_span == 10.0
    assert make_case("a_x2", "negative_exp").life_span is None
    assert make_case("a_1mx2").domain == (-1.0, 0.9)
    assert make_case("a_cos").domain == (0.1, np.pi / 3)


def test_bad_variants():
    with pytest.raises(ValueError):
        make_case("a_x2", "other")
    with pytest.raises(ValueError):
        make_case("a_cos", "negative")
    with pytest.raises(ValueError):
        make_case("a_sin")


@pytest.mark.parametrize("pair", ALL)
def test_initial_data(pair):
    c = case(pair)
    x = np.linspace(c.x_L, c.x_R, 50)
    np.testing.assert_allclose(c.exact(0.0, x), c.u0(x), atol=1e-13)
    assert inflow(c, 0.0) == pytest.approx(float(c.u0(c.x_L)), abs=1e-13)


def test_a_x2_fixed_point():
    c = make_case("a_x2", "negative")
    for t in (0.0, 1.0, 9.0, 30.0):
        assert c.exact(t, 0.0) == pytest.approx(c.u0(0.0), abs=1e-15)


def test_a_x_inflow():
    c = make_case("a_x")
    for t in (0.0, 0.5, 3.0):
        assert inflow(c, t) == pytest.approx(np.exp(-t) * np.sin(-1.2), rel=1e-14)


def test_pole_of_negative_variant():
    c = make_case("a_x2", "negative")
    with np.errstate(all="ignore"):
        assert not np.isfinite(c.exact(10.0, -0.1))
    assert np.isfinite(c.exact(9.9, -0.1))
    # with exp(-x^4) data the singularity is removable
    assert make_case("a_x2", "negative_exp").exact(10.0, -0.1) == 0.0


def _residual(c, t, x, h=1e-4):
    # fourth-order central differences
    def d(f, s):
        return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h)

    u_t = d(lambda s: c.exact(s, x), t)
    flux_x = d(lambda s: c.a(s) * c.exact(t, s), x)
    return u_t + flux_x


@pytest.mark.parametrize("pair", ALL)
def test_pde_residual(pair):
    c = case(pair)
    rng = np.random.default_rng(11)
    t_max = 9.0 if c.life_span else 3.0
    for _ in range(10):
        t = rng.uniform(0.1, t_max)
        x = rng.uniform(c.x_L + 0.01, c.x_R - 0.01)
        scale = 1 + abs(c.exact(t, x))
        assert abs(_residual(c, t, x)) <= 1e-6 * scale


@pytest.mark.parametrize("pair", ALL)
def test_oracle_on_grid(pair):
    c = case(pair)
    for t in np.linspace(0.0, 1.0, 10):
        for x in np.linspace(c.x_L, c.x_R, 10):
            got = characteristics_oracle(c.a, c.a_prime, c.u0, t, x, c.domain)
            assert abs(got - c.exact(t, x)) <= 1e-8


def test_oracle_constant_speed():
    u0 = lambda x: np.sin(3 * x) + x**2
    for t, x in [(0.3, 0.2), (1.5, -0.4), (2.0, 1.0)]:
        got = characteristics_oracle(lambda y: 1.0, lambda y: 0.0, u0, t, x)
        assert abs(got - u0(x - t)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0.0, 5.0), x=st.floats(0.1, 1.0))
def test_oracle_matches_a_x2(t, x):
    c = make_case("a_x2")
    got = characteristics_oracle(c.a, c.a_prime, c.u0, t, x, c.domain)
    assert abs(got - c.exact(t, x)) <= 1e-8


def test_oracle_cos_point():
    c = make_case("a_cos")
    got = characteristics_oracle(c.a, c.a_prime, c.u0, 0.7, 0.5, c.domain)
    assert abs(got - c.exact(0.7, 0.5)) <= 1e-8


def test_oracle_inflow():
    for pair in ALL:
        c = case(pair)
        got = characteristics_oracle(c.a, c.a_prime, c.u0, 0.8, c.x_L, c.domain)
        assert abs(got - inflow(c, 0.8)) <= 1e-8


def test_oracle_detects_escape():
    # past the pole the backward characteristic from x_L runs off to -infinity
    c = make_case("a_x2", "negative")
    with pytest.raises(CharacteristicsError):
        characteristics_oracle(c.a, c.a_prime, c.u0, 12.0, -0.1, c.domain)


def test_a_x_amplitude_decay():
    c = make_case("a_x")
    x = np.linspace(0, 2 * np.pi, 2001)
    for t in (0.5, 1.0, 2.0):
        # the initial amplitude is reached inside the domain, scaled by e^{-t}
        assert np.max(np.abs(c.exact(t, x))) == pytest.approx(np.exp(-t), rel=1e-3)
