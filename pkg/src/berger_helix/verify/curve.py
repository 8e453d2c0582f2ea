"""Metric invariants of the generating curve beta.

Two kinds of quantities: the Lorentzian speed and the angle that the
arc-length curve makes with the Hopf field E1 (measured with g_eps along
sample points), and the geodesic curvature and torsion of beta as a curve of
the round sphere (from a numerical Frenet frame).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from berger_helix.ambient import J1, BergerParams, metric_array
from berger_helix.helix import HelixConstants, beta_arclength

CURVE_SAMPLES = 33
FRENET_STEP = 1e-3


@dataclass(frozen=True)
class CurveMetrics:
    """Measured values next to their closed forms.

    ``speed_eps`` is the g_eps length of the unit-speed tangent,
    ``helix_angle`` is g_eps(beta', E1) / ||beta'||_eps, and ``kappa_g``,
    ``tau_g`` are the curvature and torsion in round S^3.  The ``*_closed``
    fields hold eps sqrt(lambda / B), -lambda sqrt(lambda + nu^2),
    (1 - d^2) / d and 1.  Measured values are worst cases over the samples.
    """

    speed_eps: float
    helix_angle: float
    kappa_g: float
    tau_g: float
    speed_closed: float
    helix_angle_closed: float
    kappa_closed: float
    kappa_alt: float
    causal: int

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "speed_eps": abs(self.speed_eps - self.speed_closed),
            "helix_angle": abs(self.helix_angle - self.helix_angle_closed),
            "kappa_closed_forms": abs(self.kappa_closed - self.kappa_alt) / max(1.0, abs(self.kappa_alt)),
            "kappa_frenet": abs(self.kappa_g - self.kappa_closed),
            "tau_frenet": abs(abs(self.tau_g) - 1.0),
        }


def sample_parameters(constants: HelixConstants, n: int = CURVE_SAMPLES) -> np.ndarray:
    """Arc-length samples covering one period of the slow circle."""
    return np.linspace(0.0, 2 * math.pi / constants.d, n)


def _worst(values: np.ndarray, target: float) -> float:
    return float(values[np.argmax(np.abs(values - target))])


def frenet_round(c: HelixConstants, lam: int, s, method: str = "analytic", h: float = FRENET_STEP):
    """(kappa, tau) of the arc-length beta in round S^3 at the samples ``s``.

    The covariant derivative in S^3 of a field X along beta is X' + <X, beta'> beta.
    With ``method="analytic"`` the derivatives of beta are exact; ``"fd"``
    replaces them by fourth-order central differences of beta alone.
    """
    s = np.asarray(s, dtype=float)
    if method == "analytic":
        d = [beta_arclength(c, lam, s, k) for k in range(4)]
    elif method == "fd":
        f = lambda t: beta_arclength(c, lam, t)  # noqa: E731

        def diff(g):
            return lambda t: (8 * (g(t + h) - g(t - h)) - (g(t + 2 * h) - g(t - 2 * h))) / (12 * h)

        d1 = diff(f)
        d2 = diff(d1)
        d3 = diff(d2)
        d = [f(s), d1(s), d2(s), d3(s)]
    else:
        raise ValueError(f"unknown method {method!r}")
    b, t, a, a1 = d
    # acceleration tangent to S^3 (beta'' has normal part -beta for unit speed)
    k = a + np.sum(t * t, axis=-1, keepdims=True) * b
    kappa = np.linalg.norm(k, axis=-1)
    n = k / kappa[..., None]
    # derivative of the principal normal, then its component orthogonal to T and N
    dk = a1 + 2 * np.sum(t * a, axis=-1, keepdims=True) * b + np.sum(t * t, axis=-1, keepdims=True) * t
    dn = dk / kappa[..., None] - k * (np.sum(k * dk, axis=-1) / kappa**3)[..., None]
    dn = dn + np.sum(n * t, axis=-1, keepdims=True) * b
    binormal_part = dn + kappa[..., None] * t
    tau = np.linalg.norm(binormal_part, axis=-1)
    # orientation of the torsion from det(beta, T, N, B-direction)
    frame = np.stack([b, t, n, binormal_part], axis=-2)
    sign = np.sign(np.linalg.det(frame))
    return kappa, sign * tau


def curve_metrics(constants: HelixConstants, params: BergerParams, samples: int = CURVE_SAMPLES) -> CurveMetrics:
    c = constants
    eps, lam, nu = params.epsilon, params.lam, params.nu
    s = sample_parameters(c, samples)
    b = beta_arclength(c, lam, s)
    db = beta_arclength(c, lam, s, 1)
    g = metric_array(b, db, db, eps)
    speed = np.sqrt(np.abs(g))
    e1 = (b @ J1.T) / eps
    angle = metric_array(b, db, e1, eps) / speed
    kappa, tau = frenet_round(c, lam, s)

    speed_closed = eps * c.sqrt_lam_B / abs(c.B)
    angle_closed = -lam * c.sqrt_lam_nu2
    kappa_closed = (1 - c.d**2) / c.d
    kappa_alt = 2 * eps * abs(nu) / c.sqrt_lam_nu2
    return CurveMetrics(
        speed_eps=_worst(speed, speed_closed),
        helix_angle=_worst(angle, angle_closed),
        kappa_g=_worst(kappa, kappa_closed),
        tau_g=_worst(np.abs(tau), 1.0) * (1 if np.all(tau >= 0) else -1),
        speed_closed=speed_closed,
        helix_angle_closed=angle_closed,
        kappa_closed=kappa_closed,
        kappa_alt=kappa_alt,
        causal=int(np.sign(g).max()),
    )
