"""Unit normal, angle function and the (T, JT) frame of a surface."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from berger_helix.ambient import (
    BergerParams,
    cross_coeffs,
    frame_coefficients_array,
    metric_coeffs,
)
from berger_helix.errors import DegenerateNormalError, DomainError
from berger_helix.helix import SurfaceJet

DEGENERATE_TOL = 1e-12
E1 = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class NormalData:
    """Normal data at one or many surface points.

    Vectors are stored by their components in the frame (E1, E2, E3).
    ``causal`` is the sign of g(N, N) found for the raw normal, which must
    equal lambda for a surface of the declared type; ``degenerate`` marks
    points where the tangent plane is null or F_u, F_v are dependent.
    """

    N: np.ndarray
    nu: np.ndarray
    T: np.ndarray
    JT: np.ndarray
    phi: np.ndarray
    causal: np.ndarray
    degenerate: np.ndarray
    U: np.ndarray
    V: np.ndarray


def normal_data(jet: SurfaceJet, params: BergerParams) -> NormalData:
    """Vectorized normal computation; degenerate points come back as NaN."""
    eps = params.epsilon
    U = frame_coefficients_array(jet.F, jet.Fu, eps)
    V = frame_coefficients_array(jet.F, jet.Fv, eps)
    raw = cross_coeffs(U, V)
    nn = metric_coeffs(raw, raw)
    scale = np.linalg.norm(U, axis=-1) * np.linalg.norm(V, axis=-1)
    degenerate = (np.abs(nn) <= DEGENERATE_TOL * np.maximum(scale, 1.0) ** 2) | (
        np.linalg.norm(raw, axis=-1) <= DEGENERATE_TOL * np.maximum(scale, 1.0)
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        N = raw / np.sqrt(np.abs(nn))[..., None]
    N = np.where(degenerate[..., None], np.nan, N)
    nu = params.lam * -N[..., 0]
    # orient N so that nu has the sign of the declared angle function
    flip = np.where(np.sign(nu) == -math.copysign(1.0, params.nu), -1.0, 1.0)
    N = N * flip[..., None]
    nu = nu * flip
    T = E1 - nu[..., None] * N
    JT = cross_coeffs(N, T)
    phi = np.arctan2(N[..., 2], N[..., 1])
    return NormalData(N, nu, T, JT, phi, np.sign(nn), degenerate, U, V)


def _scalar(x):
    return float(np.asarray(x).reshape(()))


def unit_normal(jet: SurfaceJet, params: BergerParams) -> NormalData:
    """Normal data at a single point; degenerate planes raise."""
    if np.asarray(jet.u).shape != ():
        raise ValueError("unit_normal expects a single-point jet; use normal_data for grids")
    nd = normal_data(jet, params)
    if bool(nd.degenerate):
        raw = cross_coeffs(nd.U, nd.V)
        if np.linalg.norm(raw) <= DEGENERATE_TOL * max(1.0, np.linalg.norm(nd.U) * np.linalg.norm(nd.V)):
            raise DegenerateNormalError("F_u and F_v are linearly dependent")
        raise DegenerateNormalError("the tangent plane is null (causal type changes here)")
    return nd


def angle_function(jet: SurfaceJet, params: BergerParams) -> float:
    """nu = lambda g(N, E1) with N oriented as in :func:`normal_data`."""
    return _scalar(unit_normal(jet, params).nu)


def hyperbolic_angle(nu: float, lam: int) -> float:
    """Hyperbolic angle between N and E1: arcosh|nu| or arsinh(nu)."""
    if lam == -1:
        if abs(nu) <= 1:
            raise DomainError(f"spacelike surfaces need |nu| > 1, got {nu!r}")
        return math.acosh(abs(nu))
    if lam == 1:
        if nu == 0:
            raise DomainError("nu = 0 describes a Hopf tube, excluded")
        return math.asinh(nu)
    raise DomainError(f"lambda must be +-1, got {lam!r}")


def j_operator(N: np.ndarray, X: np.ndarray) -> np.ndarray:
    """JX = N ^ X on frame components."""
    return cross_coeffs(N, X)
