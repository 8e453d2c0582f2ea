import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from berger_helix.ambient import J1
from berger_helix.errors import ConfigurationError, DomainError
from berger_helix.isometry import (
    Curve,
    IsometryFamily,
    OrthogonalMatrix4,
    build_Q,
    commuting_branch,
    compat_residual,
    example1_family,
    example2_family,
    named_curve,
    q_derivative,
    r1,
    validate_family,
)

angle = st.floats(-10, 10, allow_nan=False)


def example1_displayed(x2):
    """Example-1 matrix as displayed, written out entrywise."""
    c, s = math.cos(x2), math.sin(x2)
    return np.array(
        [
            [c, -s, c, -s],
            [s, c, s, c],
            [-c, -s, c, s],
            [s, -c, -s, c],
        ]
    ) / math.sqrt(2)


def example2():
    d = 1 / math.sqrt(5)
    return example2_family(d, math.sqrt(5))


def test_r1_examples():
    h = math.sqrt(2) / 2
    assert np.allclose(r1(0, 0, 0), [1, 0, 0, 0], atol=1e-15)
    assert np.allclose(r1(math.pi / 4, 0, 0), [h, 0, h, 0], atol=1e-15)
    assert np.allclose(r1(math.pi / 2, 0, math.pi / 2), [0, 0, 0, -1], atol=1e-15)


@given(angle, angle, angle)
def test_r1_unit(a, b, c):
    assert abs(np.linalg.norm(r1(a, b, c)) - 1) < 1e-14


def test_commuting_branch_is_plus():
    assert commuting_branch() == 1


@pytest.mark.parametrize("v", [0.0, math.pi / 2, 0.3, -2.1, 5.0])
def test_example1_matches_displayed_matrix(v):
    q = build_Q(example1_family(Curve.linear(1.0)), v, require_commuting=True)
    assert np.allclose(q.m, example1_displayed(v), atol=1e-15)


def test_example1_at_zero():
    q = build_Q(example1_family(Curve.linear(1.0)), 0.0)
    expected = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [-1, 0, 1, 0], [0, -1, 0, 1]]) / math.sqrt(2)
    assert np.allclose(q.m, expected, atol=1e-15)


def test_example1_at_quarter_turn():
    q = build_Q(example1_family(Curve.linear(1.0)), math.pi / 2)
    expected = np.array([[0, -1, 0, -1], [1, 0, 1, 0], [0, -1, 0, 1], [1, 0, -1, 0]]) / math.sqrt(2)
    assert np.allclose(q.m, expected, atol=1e-15)


def _fd_matrix(family, v, h=1e-5):
    return (family.matrix(v + h) - family.matrix(v - h)) / (2 * h)


@pytest.mark.parametrize(
    "family",
    [example1_family(Curve.linear(1.0)), example1_family(Curve.exp()), example2(), example1_family(named_curve("sin"))],
    ids=["ex1-v", "ex1-exp", "ex2", "ex1-sin"],
)
def test_q_derivative_matches_fd(family):
    for v in np.linspace(-1.5, 1.5, 13):
        dx = max(abs(float(x)) for x in family.angle_derivatives(v))
        assert np.abs(q_derivative(family, v) - _fd_matrix(family, v)).max() < 1e-6 * max(1.0, dx)


def test_q_derivative_of_constant_family_is_zero():
    fam = IsometryFamily(0.4, Curve.constant(0.3), Curve.constant(1.0), Curve.constant(-2.0))
    assert np.all(q_derivative(fam, 0.7) == 0)


def test_q_derivative_displayed_matrix_at_zero():
    fam = example1_family(Curve.linear(1.0))
    h = 1e-6
    fd = (example1_displayed(h) - example1_displayed(-h)) / (2 * h)
    assert np.allclose(q_derivative(fam, 0.0), fd, atol=1e-9)


def test_fd_adapter_for_curves_without_derivative():
    curve = Curve(np.sin)
    v = np.linspace(-2, 2, 9)
    assert np.allclose(curve.derivative(v), np.cos(v), atol=1e-12)


def test_compat_examples():
    v = np.linspace(-3, 3, 31)
    assert np.abs(compat_residual(example1_family(Curve.exp()), v)).max() < 1e-9
    assert np.abs(compat_residual(example2(), v)).max() < 1e-9
    fam = IsometryFamily(0.0, Curve.constant(0.0), Curve.linear(1.0), Curve.constant(0.0))
    assert np.allclose(compat_residual(fam, v), 1.0)


def test_example2_angles_follow_tangent_rule():
    d = 0.3
    fam = example2_family(d, 2.0)
    x1 = float(fam.xi1(0.0))
    assert math.tan(x1) == pytest.approx(1 / d)
    assert float(fam.xi2.derivative(0.0)) == pytest.approx(math.tan(x1) * 2.0)
    assert float(fam.xi3.derivative(0.0)) == pytest.approx(2.0 / math.tan(x1))
    with pytest.raises(DomainError):
        example2_family(1.2, 1.0)


@pytest.mark.parametrize("family", [example1_family(Curve.linear(1.0)), example1_family(Curve.exp()), example2()])
def test_random_v_orthogonal_commuting(family):
    v = np.random.default_rng(1).uniform(-2 * math.pi, 2 * math.pi, 1000)
    q = family.matrix(v)
    assert np.abs(np.swapaxes(q, -1, -2) @ q - np.eye(4)).max() < 1e-12
    assert np.abs(q @ J1 - J1 @ q).max() < 1e-12
    det = np.linalg.det(q)
    assert np.abs(np.abs(det) - 1).max() < 1e-10
    assert det.max() - det.min() < 1e-10


@given(angle, angle, angle, angle, st.sampled_from([1, -1]))
def test_any_family_is_orthogonal(xi, a, b, c, branch):
    fam = IsometryFamily(xi, Curve.constant(a), Curve.constant(b), Curve.constant(c), branch=branch)
    q = build_Q(fam, 0.0)
    assert isinstance(q, OrthogonalMatrix4)
    if branch == commuting_branch():
        assert q.commutes_with_j1()
    else:
        assert q.anticommutes_with_j1()


def test_anticommuting_branch_rejected_on_request():
    fam = example1_family(Curve.linear(1.0), branch=-commuting_branch())
    assert not fam.commuting
    build_Q(fam, 0.2)
    with pytest.raises(DomainError):
        build_Q(fam, 0.2, require_commuting=True)


def test_validate_family():
    val = validate_family(example1_family(Curve.linear(1.0)))
    assert val.ok and val.samples == 257
    bad = validate_family(IsometryFamily(0.0, Curve.constant(0.0), Curve.linear(1.0), Curve.constant(0.0)))
    assert not bad.ok and bad.compat == pytest.approx(1.0)


def test_family_validation_errors():
    with pytest.raises(ConfigurationError):
        IsometryFamily(0.0, Curve.constant(0), Curve.constant(0), Curve.constant(0), branch=2)
    with pytest.raises(ConfigurationError):
        IsometryFamily(0.0, Curve.constant(0), Curve.constant(0), Curve.constant(0), domain=(1, 1))
    with pytest.raises(ConfigurationError):
        named_curve("cosh")
    with pytest.raises(DomainError):
        OrthogonalMatrix4(np.ones((4, 4)))
