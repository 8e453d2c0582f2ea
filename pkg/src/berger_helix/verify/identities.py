"""Algebraic identities satisfied by the position vector of a helix surface.

All functions broadcast over the leading axes of the jet and return arrays of
residuals (0-d arrays for single points).
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from berger_helix.ambient import J1, BergerParams, frame_array, metric_array, metric_coeffs
from berger_helix.helix import HelixConstants, SurfaceJet
from berger_helix.verify.normal import NormalData, j_operator
from berger_helix.verify.results import ResidualReport

PRODUCT_TOL = 1e-8


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _norm(a):
    return np.linalg.norm(a, axis=-1)


def _j1(x):
    return x @ J1.T


def check_ode(jet: SurfaceJet, constants: HelixConstants) -> np.ndarray:
    """Euclidean norm of F_uuuu + (b~^2 - 2 a~) F_uu + a~^2 F."""
    c = constants
    res = jet.Fuuuu + (c.b_tilde**2 - 2 * c.a_tilde) * jet.Fuu + c.a_tilde**2 * jet.F
    return _norm(res)


# Each relation maps (jet, constants, params) to (value, target, scale).  The
# residual is |value - target| / max(1, scale), where scale is the product of
# the Euclidean lengths of the vectors involved, so relations among large
# derivatives are judged at the precision their inputs carry.
Relation = Callable[[SurfaceJet, HelixConstants, BergerParams], tuple]


def _pair(a: str, b: str, target: Callable[[HelixConstants, BergerParams], float], ja: bool = False) -> Relation:
    def rel(jet, c, p):
        x, y = getattr(jet, a), getattr(jet, b)
        if ja:
            x = _j1(x)
        return _dot(x, y), target(c, p), _norm(x) * _norm(y)

    return rel


def _twisted_sum(a1, b1, a2, b2) -> Relation:
    """<J1 a1, b1> + <J1 a2, b2> = 0."""

    def rel(jet, c, p):
        x1, y1 = _j1(getattr(jet, a1)), getattr(jet, b1)
        x2, y2 = _j1(getattr(jet, a2)), getattr(jet, b2)
        return _dot(x1, y1) + _dot(x2, y2), 0.0, np.maximum(_norm(x1) * _norm(y1), _norm(x2) * _norm(y2))

    return rel


def _hopf_product(c: HelixConstants, p: BergerParams) -> float:
    return (1 + p.lam * p.nu**2) / p.epsilon


PRODUCT_RELATIONS: dict[str, Relation] = {
    "F.F": _pair("F", "F", lambda c, p: 1.0),
    "Fu.Fu": _pair("Fu", "Fu", lambda c, p: c.a_tilde),
    "F.Fu": _pair("F", "Fu", lambda c, p: 0.0),
    "Fu.Fuu": _pair("Fu", "Fuu", lambda c, p: 0.0),
    "Fuu.Fuu": _pair("Fuu", "Fuu", lambda c, p: c.D),
    "F.Fuu": _pair("F", "Fuu", lambda c, p: -c.a_tilde),
    "Fu.Fuuu": _pair("Fu", "Fuuu", lambda c, p: -c.D),
    "Fuu.Fuuu": _pair("Fuu", "Fuuu", lambda c, p: 0.0),
    "F.Fuuu": _pair("F", "Fuuu", lambda c, p: 0.0),
    "Fuuu.Fuuu": _pair("Fuuu", "Fuuu", lambda c, p: c.E),
    "J1F.Fu": _pair("F", "Fu", _hopf_product, ja=True),
    "J1F.Fuu": _pair("F", "Fuu", lambda c, p: 0.0, ja=True),
    "Fu.J1Fuu": _pair("Fuu", "Fu", lambda c, p: c.I, ja=True),
    "J1Fu.Fuuu": _pair("Fu", "Fuuu", lambda c, p: 0.0, ja=True),
    "J1Fu.Fuu+J1F.Fuuu": _twisted_sum("Fu", "Fuu", "F", "Fuuu"),
    "J1Fuu.Fuuu+J1Fu.Fuuuu": _twisted_sum("Fuu", "Fuuu", "Fu", "Fuuuu"),
}


def product_residuals(jet: SurfaceJet, constants: HelixConstants, params: BergerParams) -> dict[str, np.ndarray]:
    out = {}
    for name, rel in PRODUCT_RELATIONS.items():
        value, target, scale = rel(jet, constants, params)
        out[name] = np.abs(value - target) / np.maximum(1.0, scale)
    return out


def check_products(
    jet: SurfaceJet, constants: HelixConstants, params: BergerParams, tolerance: float = PRODUCT_TOL
) -> ResidualReport:
    """One record per product relation, maximized over the points of ``jet``."""
    report = ResidualReport()
    for name, res in product_residuals(jet, constants, params).items():
        report.record_grid(f"product[{name}]", res, tolerance, jet.u, jet.v)
    return report


def check_helix_conditions(jet: SurfaceJet, params: BergerParams):
    """Residuals of the two conditions characterizing helix parametrizations.

    The first is max(|g(F_u, F_u) + 1 + lambda nu^2|, |g(E1, F_u) + 1 + lambda nu^2|),
    the second |g(F_u, F_v) - g(F_v, E1)|.
    """
    eps, lam, nu = params.epsilon, params.lam, params.nu
    e1 = _j1(jet.F) / eps
    target = -(1 + lam * nu**2)
    g = lambda a, b: metric_array(jet.F, a, b, eps)  # noqa: E731
    r1 = np.maximum(np.abs(g(jet.Fu, jet.Fu) - target), np.abs(g(e1, jet.Fu) - target))
    r2 = np.abs(g(jet.Fu, jet.Fv) - g(jet.Fv, e1))
    return r1, r2


def normal_identities(jet: SurfaceJet, nd: NormalData, params: BergerParams) -> dict[str, np.ndarray]:
    """Residuals of the identities relating N, T, JT, nu and phi.

    Vectors are compared through their frame components (Euclidean norm).
    Degenerate points come back as NaN.
    """
    eps, lam, nu_spec = params.epsilon, params.lam, params.nu
    N, T, JT, nu = nd.N, nd.T, nd.JT, nd.nu
    e1 = np.array([1.0, 0.0, 0.0])
    g = metric_coeffs
    out = {
        "nu_constant": np.abs(nu - nu_spec),
        "normal_unit": np.abs(g(N, N) - lam),
        "normal_Fu": np.abs(g(N, nd.U)) / np.maximum(1.0, _norm(nd.U)),
        "normal_Fv": np.abs(g(N, nd.V)) / np.maximum(1.0, _norm(nd.V)),
        # T is the tangential part of E1, which equals F_u in canonical coordinates
        "T_decomposition": _norm(e1 - nd.U - nu[..., None] * N),
        "gTT": np.abs(g(T, T) + (1 + lam * nu**2)),
        "gJTJT": np.abs(g(JT, JT) - (lam + nu**2)),
        "gTJT": np.abs(g(T, JT)),
    }
    j_metric = []
    j_square = []
    basis = (T, JT)
    for X in basis:
        jx = j_operator(N, X)
        j_square.append(_norm(j_operator(N, jx) - lam * X))
        for Y in basis:
            j_metric.append(np.abs(g(jx, j_operator(N, Y)) + lam * g(X, Y)))
    out["J_metric"] = np.maximum.reduce(j_metric)
    out["J_square"] = np.maximum.reduce(j_square)
    # N = -lambda nu E1 + sqrt(lambda + nu^2) (cos phi E2 + sin phi E3)
    root = np.sqrt(np.abs(lam + nu**2))
    rebuilt = np.stack([-lam * nu, root * np.cos(nd.phi), root * np.sin(nd.phi)], axis=-1)
    out["phase_reconstruction"] = _norm(N - rebuilt)
    return out


def fv_norm_residual(jet: SurfaceJet, constants: HelixConstants) -> np.ndarray:
    """|<F_v, F_v> - (lambda + nu^2)|, meaningful under the canonical v-scale."""
    return np.abs(_dot(jet.Fv, jet.Fv) - constants.sqrt_lam_nu2**2)


def surface_invariants(jet: SurfaceJet) -> dict[str, np.ndarray]:
    return {
        "jet_unit": np.abs(_dot(jet.F, jet.F) - 1),
        "jet_orthogonal": np.abs(_dot(jet.F, jet.Fu)) / np.maximum(1.0, _norm(jet.Fu)),
    }


def frame_gram_residual(jet: SurfaceJet, params: BergerParams) -> np.ndarray:
    """Max deviation of the frame Gram matrix from diag(-1, 1, 1) along the jet."""
    fr = frame_array(jet.F, params.epsilon)
    gram = metric_array(jet.F[..., None, None, :], fr[..., :, None, :], fr[..., None, :, :], params.epsilon)
    return np.abs(gram - np.diag([-1.0, 1.0, 1.0])).max(axis=(-1, -2))
