import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from berger_helix.ambient import BergerParams
from berger_helix.errors import ConfigurationError, DomainError
from berger_helix.helix import (
    PERTURBABLE,
    HelixSpec,
    beta,
    beta_arclength,
    constants,
    example1_spec,
    example2_spec,
    perturbed_spec,
    s_to_u,
)
from berger_helix.isometry import Curve, IsometryFamily, example1_family


def _params_strategy():
    eps = st.floats(0.1, 5.0)
    big = st.floats(1.01, 10.0)
    small = st.floats(0.05, 10.0)
    spacelike = st.builds(lambda e, n, s: BergerParams(e, -1, s * n), eps, big, st.sampled_from([1, -1]))
    timelike = st.builds(lambda e, n, s: BergerParams(e, 1, s * n), eps, small, st.sampled_from([1, -1]))
    return st.one_of(spacelike, timelike)


valid_params = _params_strategy()


def test_constants_timelike_example():
    c = constants(BergerParams(1, 1, 2))
    expected = dict(B=9, a_tilde=45, b_tilde=-18, alpha1=15, alpha2=3, g11=1 / 6, g33=5 / 6, d=1 / math.sqrt(5))
    for k, val in expected.items():
        assert getattr(c, k) == pytest.approx(val, abs=1e-12), k
    assert c.D == pytest.approx(45 * 324 - 3 * 45**2)
    assert c.I == pytest.approx(-585)


def test_constants_fig1_example():
    c = constants(BergerParams(2, -1, 4))
    r = math.sqrt(79)
    assert c.B == pytest.approx(-79)
    assert c.a_tilde == pytest.approx(1185 / 4)
    assert c.b_tilde == pytest.approx(79)
    assert c.alpha1 == pytest.approx((79 + 8 * r) / 2)
    assert c.alpha2 == pytest.approx((79 - 8 * r) / 2)
    assert c.d == pytest.approx((r - 8) / math.sqrt(15))


def test_constants_fig3_example():
    c = constants(BergerParams(1, -1, math.sqrt(5)))
    assert c.B == pytest.approx(-9)
    assert c.a_tilde == pytest.approx(36)
    assert c.alpha1 == pytest.approx(9 + 3 * math.sqrt(5))
    assert c.alpha2 == pytest.approx(9 - 3 * math.sqrt(5))
    assert c.d == pytest.approx((3 - math.sqrt(5)) / 2)


@pytest.mark.parametrize(
    "args,match",
    [((1, -1, 1.0), "not integrable"), ((1, -1, 0.5), "not integrable"), ((1, 1, 0), "Hopf tube"), ((0, 1, 2), "epsilon")],
)
def test_invalid_params(args, match):
    with pytest.raises(DomainError, match=match):
        constants(BergerParams(*args))


@given(valid_params)
def test_constants_invariants(p):
    c = constants(p)
    assert c.a_tilde > 0 and p.lam * c.B > 0
    assert c.alpha1 * c.alpha2 == pytest.approx(c.a_tilde, rel=1e-11)
    assert c.alpha1**2 + c.alpha2**2 == pytest.approx(c.b_tilde**2 - 2 * c.a_tilde, rel=1e-11)
    assert c.g11 + c.g33 == pytest.approx(1, abs=1e-11)
    assert c.g11 * c.g33 == pytest.approx((1 + p.lam * p.nu**2) / (4 * c.B), rel=1e-10)
    assert 0 < c.d < 1
    assert c.d == pytest.approx(math.sqrt(c.alpha2 / c.alpha1), rel=1e-10)


@given(valid_params)
def test_frequencies_are_characteristic_roots(p):
    c = constants(p)
    k = c.b_tilde**2 - 2 * c.a_tilde
    for a in (c.alpha1, c.alpha2):
        scale = max(a**4, k * a**2, c.a_tilde**2)
        assert abs(a**4 - k * a**2 + c.a_tilde**2) / scale < 1e-9
    # and they are the positive roots of the quadratic in r^2
    roots = np.sort(np.sqrt(np.roots([1.0, -k, c.a_tilde**2]).real))
    assert np.allclose(roots, [c.alpha2, c.alpha1], rtol=1e-7)


@given(valid_params)
def test_kappa_closed_forms_agree(p):
    c = constants(p)
    kappa = (1 - c.d**2) / c.d
    assert kappa == pytest.approx(2 * p.epsilon * abs(p.nu) / c.sqrt_lam_nu2, rel=1e-10)


def test_beta_examples():
    p = BergerParams(1, 1, 2)
    c = constants(p)
    assert np.allclose(beta(c, 1, 0.0), [math.sqrt(c.g11), 0, math.sqrt(c.g33), 0])
    b = beta(c, 1, math.pi / 3)
    assert np.hypot(b[0], b[1]) == pytest.approx(math.sqrt(1 / 6))
    assert np.hypot(b[2], b[3]) == pytest.approx(math.sqrt(5 / 6))
    u = np.random.default_rng(0).uniform(-10, 10, 100)
    db = beta(c, 1, u, 1)
    assert np.allclose(np.sum(db * db, axis=-1), 45, rtol=1e-12)
    assert np.allclose(np.linalg.norm(beta(c, 1, u), axis=-1), 1, atol=1e-14)


@pytest.mark.parametrize("p", [BergerParams(1, 1, 2), BergerParams(2, -1, 4), BergerParams(1, -1, math.sqrt(5))])
def test_beta_derivatives_match_fd(p):
    c = constants(p)
    u = np.linspace(-1, 1, 7)
    h = 1e-4 / c.alpha1
    for k in range(4):
        fd = (beta(c, p.lam, u + h, k) - beta(c, p.lam, u - h, k)) / (2 * h)
        exact = beta(c, p.lam, u, k + 1)
        assert np.abs(fd - exact).max() < 1e-6 * max(1.0, np.abs(exact).max())


@pytest.mark.parametrize("p", [BergerParams(1, 1, 2), BergerParams(2, -1, 4)])
def test_beta_is_torus_geodesic(p):
    # acceleration has no component tangent to the flat torus
    c = constants(p)
    u = np.linspace(-3, 3, 50)
    b, acc = beta(c, p.lam, u), beta(c, p.lam, u, 2)
    t1 = np.stack([-b[:, 1], b[:, 0], 0 * u, 0 * u], axis=-1)
    t2 = np.stack([0 * u, 0 * u, -b[:, 3], b[:, 2]], axis=-1)
    for t in (t1, t2):
        assert np.abs(np.sum(acc * t, axis=-1)).max() < 1e-9


def test_beta_arclength():
    p = BergerParams(1, 1, 2)
    c = constants(p)
    d = c.d
    assert np.allclose(beta_arclength(c, 1, 0.0), np.array([d, 0, 1, 0]) / math.sqrt(1 + d * d))
    s = np.random.default_rng(2).uniform(-20, 20, 100)
    h = 1e-3
    f = lambda t: beta_arclength(c, 1, t)  # noqa: E731
    # fourth-order stencil keeps truncation below 1e-11
    fd = (8 * (f(s + h) - f(s - h)) - (f(s + 2 * h) - f(s - 2 * h))) / (12 * h)
    assert np.abs(np.linalg.norm(fd, axis=-1) - 1).max() < 1e-10
    assert np.abs(np.linalg.norm(beta_arclength(c, 1, s, 1), axis=-1) - 1).max() < 1e-12
    u = s_to_u(c, s)
    assert np.abs(beta_arclength(c, 1, s) - beta(c, 1, u)).max() < 1e-10


@pytest.mark.parametrize("p", [BergerParams(2, -1, 4), BergerParams(1, 1, 2)])
def test_beta_arclength_reparametrization_both_types(p):
    c = constants(p)
    u = np.linspace(-2, 2, 41)
    assert np.abs(beta_arclength(c, p.lam, math.sqrt(c.a_tilde) * u) - beta(c, p.lam, u)).max() < 1e-10


def test_jet_example_at_origin():
    p = BergerParams(2, -1, 4)
    spec = example1_spec(p, Curve.linear(1.0))
    c = spec.constants
    q0 = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [-1, 0, 1, 0], [0, -1, 0, 1]]) / math.sqrt(2)
    jet = spec(0.0, 0.0)
    assert np.allclose(jet.F, q0 @ [math.sqrt(c.g11), 0, math.sqrt(c.g33), 0], atol=1e-15)


def test_jet_invariants_and_fd(preset):
    _, spec, grid = preset
    rng = np.random.default_rng(7)
    u = rng.uniform(*grid.u_range, 40)
    v = rng.uniform(*grid.v_range, 40)
    jet = spec(u, v)
    assert max(jet.invariant_residuals()) < 1e-10
    h = 1e-5
    # u-derivative chain, each scaled by its magnitude
    for lower, upper in [("F", "Fu"), ("Fu", "Fuu"), ("Fuu", "Fuuu"), ("Fuuu", "Fuuuu")]:
        fd = (getattr(spec(u + h, v), lower) - getattr(spec(u - h, v), lower)) / (2 * h)
        exact = getattr(jet, upper)
        assert np.abs(fd - exact).max() < 1e-6 * max(1.0, np.abs(exact).max())
    fd = (spec(u, v + h).F - spec(u, v - h).F) / (2 * h)
    assert np.abs(fd - jet.Fv).max() < 1e-6 * max(1.0, np.abs(jet.Fv).max())


def test_constant_family_has_zero_fv():
    p = BergerParams(1, 1, 2)
    fam = IsometryFamily(0.0, Curve.constant(0.3), Curve.constant(0.5), Curve.constant(0.1))
    spec = HelixSpec(p, constants(p), fam)
    assert np.all(spec(np.linspace(0, 1, 5), 0.3).Fv == 0)


def test_v_outside_domain():
    spec = example1_spec(BergerParams(1, 1, 2), Curve.linear(1.0), domain=(-1.0, 1.0))
    spec(0.0, 0.5)
    with pytest.raises(DomainError):
        spec(0.0, 1.5)


def test_spec_rejects_bad_families():
    p = BergerParams(1, 1, 2)
    with pytest.raises(DomainError):
        example1_spec(p, Curve.linear(1.0), branch=-1)
    bad = IsometryFamily(0.0, Curve.constant(0.0), Curve.linear(1.0), Curve.constant(0.0))
    with pytest.raises(DomainError, match="compatibility"):
        HelixSpec(p, constants(p), bad)
    HelixSpec(p, constants(p), bad, strict=False)


def test_example2_spec_is_canonical():
    spec = example2_spec(BergerParams(1, -1, math.sqrt(5)))
    assert spec.canonical_v
    jet = spec(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    assert np.allclose(np.sum(jet.Fv**2, axis=-1), -1 + 5)


@given(valid_params)
def test_example_families_satisfy_compat(p):
    assume(abs(p.nu) < 8)
    spec1 = example1_spec(p, Curve.exp())
    spec2 = example2_spec(p)
    assert spec1.strict and spec2.strict


def test_perturbed_spec():
    spec = example1_spec(BergerParams(1, 1, 2), Curve.linear(1.0))
    for name in PERTURBABLE:
        pert = perturbed_spec(spec, name, 0.01)
        assert not pert.strict
    assert perturbed_spec(spec, "a_tilde", 0.01).constants.a_tilde == pytest.approx(45.45)
    assert perturbed_spec(spec, "nu", 0.01).params.nu == pytest.approx(2.02)
    with pytest.raises(ConfigurationError):
        perturbed_spec(spec, "zeta", 0.01)
