"""Finite-difference shape operator and the equations built on it.

A surface is any callable ``(u, v) -> SurfaceJet`` that broadcasts over array
arguments (a :class:`~berger_helix.helix.HelixSpec` qualifies).  The
Weingarten map is A(X) = -nabla_X N, with the derivative of N's frame
components taken by central differences in (u, v) plus one Richardson level.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from berger_helix.ambient import (
    BergerParams,
    covariant_coeffs,
    cross_coeffs,
    metric_coeffs,
    sectional_curvature_coeffs,
)
from berger_helix.errors import ConfigurationError
from berger_helix.helix import HelixConstants, SurfaceJet
from berger_helix.verify.normal import NormalData, normal_data

Surface = Callable[[np.ndarray, np.ndarray], SurfaceJet]

SHAPE_STEP = 1e-5
# the mu equation differentiates an FD quantity again: a coarser inner step
# keeps round-off down, and the outer step is scaled by the u-frequency of mu
MU_INNER_STEP = 3e-4
MU_STEP_SCALE = 1e-3
PHASE_STEP = 1e-5
RELIABILITY = 1e-6
# near a pole of mu the basis change to (T, JT) amplifies round-off in the
# derivatives of N, so the step grows with |mu| up to this cap
MAX_ADAPTIVE_STEP = 1e-3
# points with |mu| above this multiple of 2 sqrt(lambda B) sit near a pole of mu
POLE_GUARD = 5.0


def _check_step(h: float) -> None:
    if not np.all(np.asarray(h) > 0):
        raise ConfigurationError(f"finite-difference step must be positive, got {h!r}")


def _per_point(h, shape):
    """Step as an array that broadcasts against values of ``shape``."""
    h = np.asarray(h, dtype=float)
    return h.reshape(h.shape + (1,) * (len(shape) - h.ndim)) if h.ndim else h


def _plain(fn, h):
    f1, f2 = fn(h), fn(-h)
    return (f1 - f2) / (2 * _per_point(h, f1.shape))


def _richardson(fn, h):
    return (4 * _plain(fn, h / 2) - _plain(fn, h)) / 3


def central_difference(fn: Callable[[float], np.ndarray], h: float, richardson: bool = True):
    """Derivative at 0 of ``fn(t)`` and an estimate of its error.

    With ``richardson`` the steps h and h/2 are combined to cancel the h^2
    term.  The error estimate is then the gap to the same extrapolation
    started from h/2; without it, the gap between steps h and h/2.
    """
    _check_step(h)
    if not richardson:
        d1 = _plain(fn, h)
        return d1, np.abs(_plain(fn, h / 2) - d1)
    coarse = _richardson(fn, h)
    return coarse, np.abs(_richardson(fn, h / 2) - coarse)


def _normals(surface: Surface, params: BergerParams, u, v) -> np.ndarray:
    return normal_data(surface(u, v), params).N


def _solve_tangent(U, V, W):
    """(p, q) with W = p U + q V, using the g_eps Gram matrix of (U, V)."""
    guu, guv, gvv = metric_coeffs(U, U), metric_coeffs(U, V), metric_coeffs(V, V)
    gwu, gwv = metric_coeffs(W, U), metric_coeffs(W, V)
    det = guu * gvv - guv * guv
    return (gwu * gvv - gwv * guv) / det, (guu * gwv - guv * gwu) / det


@dataclass(frozen=True)
class ShapeData:
    """Shape operator at one or many points.

    ``matrix[..., i, j]`` is the component on basis vector ``i`` of A applied
    to basis vector ``j`` of (T, JT), so its columns are A(T) and A(JT).
    ``K`` comes from the Gauss equation with the ambient sectional curvature
    of the tangent plane evaluated from the curvature tensor.
    """

    matrix: np.ndarray
    mu: np.ndarray
    K: np.ndarray
    ambient_sectional: np.ndarray
    AU: np.ndarray
    AV: np.ndarray
    error: np.ndarray
    reliable: np.ndarray
    normal: NormalData

    @property
    def trace(self) -> np.ndarray:
        return self.matrix[..., 0, 0] + self.matrix[..., 1, 1]

    @property
    def det(self) -> np.ndarray:
        m = self.matrix
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _assemble(nd: NormalData, dnu, dnv, eps):
    """A(F_u), A(F_v) and the matrix of A in (T, JT) from derivatives of N."""
    AU = -covariant_coeffs(nd.U, nd.N, dnu, eps)
    AV = -covariant_coeffs(nd.V, nd.N, dnv, eps)
    T, JT = nd.T, nd.JT
    gtt, gjj = metric_coeffs(T, T), metric_coeffs(JT, JT)

    def apply(W):
        p, q = _solve_tangent(nd.U, nd.V, W)
        return p[..., None] * AU + q[..., None] * AV

    AT, AJT = apply(T), apply(JT)
    m = np.empty(AT.shape[:-1] + (2, 2))
    m[..., 0, 0] = metric_coeffs(AT, T) / gtt
    m[..., 1, 0] = metric_coeffs(AT, JT) / gjj
    m[..., 0, 1] = metric_coeffs(AJT, T) / gtt
    m[..., 1, 1] = metric_coeffs(AJT, JT) / gjj
    return m, AU, AV


def shape_operator(
    surface: Surface,
    u,
    v,
    params: BergerParams,
    *,
    h: float = SHAPE_STEP,
    richardson: bool = True,
    reliability: float = RELIABILITY,
    adaptive: bool = True,
) -> ShapeData:
    """Matrix of A in the basis (T, JT), with mu read off the (JT, JT) slot.

    With ``adaptive`` a cheap pilot pass estimates mu and the step at each
    point becomes h * max(1, |mu| / mu0), capped at ``MAX_ADAPTIVE_STEP``,
    where mu0 = 2 sqrt(|B|) is the scale of mu away from its poles.
    ``error`` is the largest change of a matrix entry when the difference
    scheme is restarted from h/2, relative to max(1, |mu|); points where it
    exceeds ``reliability`` are flagged in ``reliable``.
    """
    _check_step(h)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    eps, lam, nu = params.epsilon, params.lam, params.nu
    nd = normal_data(surface(u, v), params)

    def n_u(t):
        return _normals(surface, params, u + t, v)

    def n_v(t):
        return _normals(surface, params, u, v + t)

    if adaptive:
        pilot, _, _ = _assemble(nd, _plain(n_u, h), _plain(n_v, h), eps)
        mu0 = 2 * np.sqrt(abs(1 + lam * nu**2 * (1 + eps**2)))
        stretch = np.maximum(1.0, np.nan_to_num(np.abs(pilot[..., 1, 1]) / mu0))
        h = np.minimum(h * stretch, max(MAX_ADAPTIVE_STEP, np.max(h)))

    scheme = _richardson if richardson else _plain
    m, AU, AV = _assemble(nd, scheme(n_u, h), scheme(n_v, h), eps)
    m_fine, _, _ = _assemble(nd, scheme(n_u, h / 2), scheme(n_v, h / 2), eps)

    sectional = sectional_curvature_coeffs(nd.T, nd.JT, eps)
    K = sectional + lam * (m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
    error = np.abs(m_fine - m).max(axis=(-1, -2)) / np.maximum(1.0, np.abs(m[..., 1, 1]))
    reliable = np.isfinite(error) & (error <= reliability)
    return ShapeData(m, m[..., 1, 1], K, sectional, AU, AV, error, reliable, nd)


def gauss_curvature(shape: ShapeData, params: BergerParams, nu=None) -> np.ndarray:
    """K = K_amb + lambda det A.

    The ambient sectional curvature is taken from ``shape`` (curvature tensor on
    the plane (T, JT)); without it the closed form -eps^2 - 4 lambda nu^2
    (1 + eps^2) is used with the given ``nu``.
    """
    lam, eps = params.lam, params.epsilon
    if shape.ambient_sectional is not None:
        kbar = shape.ambient_sectional
    else:
        nu = params.nu if nu is None else nu
        kbar = -(eps**2) - 4 * lam * nu**2 * (1 + eps**2)
    return kbar + lam * shape.det


def gauss_curvature_closed(params: BergerParams) -> float:
    """Constant Gauss curvature -4 lambda (1 + eps^2) nu^2 of a helix surface."""
    return -4 * params.lam * (1 + params.epsilon**2) * params.nu**2


def ambient_sectional_closed(params: BergerParams) -> float:
    e2 = params.epsilon**2
    return -e2 - 4 * params.lam * params.nu**2 * (1 + e2)


def shape_form_residual(shape: ShapeData, params: BergerParams) -> np.ndarray:
    """Largest deviation of A from [[0, -lambda eps], [eps, mu]] off the mu slot."""
    m = shape.matrix
    eps, lam = params.epsilon, params.lam
    return np.maximum.reduce(
        [np.abs(m[..., 0, 0]), np.abs(m[..., 0, 1] + lam * eps), np.abs(m[..., 1, 0] - eps)]
    )


def mu_pole(mu: np.ndarray, constants: HelixConstants, guard: float = POLE_GUARD) -> np.ndarray:
    return ~np.isfinite(mu) | (np.abs(mu) > guard * 2 * constants.sqrt_lam_B)


def check_mu_pde(
    surface: Surface,
    u,
    v,
    params: BergerParams,
    constants: HelixConstants,
    *,
    H: float | None = None,
    h: float = MU_INNER_STEP,
    guard: float = POLE_GUARD,
) -> np.ndarray:
    """Residual of mu_u + nu mu^2 + 4 lambda nu B (NaN where skipped).

    mu is differentiated along u, which is the direction of T in the canonical
    coordinates.  Points close to a pole of mu (see ``guard``) are skipped.
    ``H`` defaults to ``MU_STEP_SCALE`` divided by 2 |nu| sqrt(lambda B), the
    frequency at which mu runs through its poles.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    nu, lam = params.nu, params.lam
    if H is None:
        H = MU_STEP_SCALE / (2 * abs(nu) * constants.sqrt_lam_B)
    _check_step(H)

    def mu_at(t):
        return shape_operator(surface, u + t, v, params, h=h, adaptive=False).mu

    mu = mu_at(0.0)
    dmu, _ = central_difference(mu_at, H)
    res = np.abs(dmu + nu * mu**2 + 4 * lam * nu * constants.B)
    skip = mu_pole(mu, constants, guard)
    for t in (-H, H):
        skip |= mu_pole(mu_at(t), constants, guard)
    return np.where(skip, np.nan, res)


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def phase_derivatives(surface: Surface, u, v, params: BergerParams, h: float = PHASE_STEP):
    """(phi_u, phi_v) with phase jumps removed by nearest-branch continuation."""
    _check_step(h)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def phi(uu, vv):
        return normal_data(surface(uu, vv), params).phi

    def d(fp, fm, step):
        return _wrap(fp - fm) / (2 * step)

    def deriv(shift_u, shift_v):
        lo = d(phi(u + shift_u, v + shift_v), phi(u - shift_u, v - shift_v), h)
        hi = d(phi(u + shift_u / 2, v + shift_v / 2), phi(u - shift_u / 2, v - shift_v / 2), h / 2)
        return (4 * hi - lo) / 3

    return deriv(h, 0.0), deriv(0.0, h)


def check_normal_phase(surface: Surface, u, v, params: BergerParams, h: float = PHASE_STEP, B: float | None = None):
    """Residuals of phi_u + 2 B / eps and of phi_v.

    ``B`` defaults to 1 + lambda nu^2 (1 + eps^2) from ``params``.
    """
    eps, lam, nu = params.epsilon, params.lam, params.nu
    if B is None:
        B = 1 + lam * nu**2 * (1 + eps**2)
    pu, pv = phase_derivatives(surface, u, v, params, h)
    return np.abs(pu + 2 * B / eps), np.abs(pv)


def structure_residuals(surface: Surface, u, v, params: BergerParams, shape: ShapeData, h: float = SHAPE_STEP):
    """Both sides of X(nu) = -lambda g(A X + eps JX, T) for X = F_u, F_v.

    Returns ``(lhs_u, lhs_v, rhs_u, rhs_v)``: FD derivatives of the computed
    angle function and the right-hand sides.  For a helix surface all four
    vanish.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    eps, lam = params.epsilon, params.lam

    def nu_at(uu, vv):
        return normal_data(surface(uu, vv), params).nu

    lhs_u, _ = central_difference(lambda t: nu_at(u + t, v), h)
    lhs_v, _ = central_difference(lambda t: nu_at(u, v + t), h)
    nd = shape.normal
    rhs_u = -lam * metric_coeffs(shape.AU + eps * cross_coeffs(nd.N, nd.U), nd.T)
    rhs_v = -lam * metric_coeffs(shape.AV + eps * cross_coeffs(nd.N, nd.V), nd.T)
    return lhs_u, lhs_v, rhs_u, rhs_v
