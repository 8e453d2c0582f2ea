"""Geometry of the Lorentzian Berger sphere S^3_eps.

Points of S^3 are stored as real 4-vectors ``(x1, x2, x3, x4)`` with
``z = x1 + i x2`` and ``w = x3 + i x4``.  The Hopf field and the two horizontal
fields are then ``X_k(p) = J_k p`` for the three complex structures below, and
the Lorentzian frame is ``E1 = X1 / eps``, ``E2 = X2``, ``E3 = X3``.

Everything is written twice: array kernels (``*_array`` and the tables) that
broadcast over leading axes and are used by the surface verifier, and thin
per-point wrappers that take :class:`TangentVector` objects and validate them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from berger_helix.errors import ConfigurationError, DomainError, UsageError

J1 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
J2 = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
J3 = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
for _m in (J1, J2, J3):
    _m.setflags(write=False)

# signature of the orthonormal frame (E1 timelike)
ETA = np.array([-1.0, 1.0, 1.0])
ETA.setflags(write=False)

UNIT_TOL = 1e-12
TANGENCY_SNAP = 1e-12
TANGENCY_MAX = 1e-6
DEFAULT_FD_STEP = 1e-5


@dataclass(frozen=True)
class BergerParams:
    """Ambient deformation and causal data of a helix surface.

    ``lam`` is -1 for spacelike surfaces (Riemannian induced metric) and +1 for
    timelike ones; ``nu`` is the constant angle function.
    """

    epsilon: float
    lam: int
    nu: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not math.isfinite(eps) or eps <= 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.lam not in (-1, 1):
            raise DomainError(f"lambda must be -1 (spacelike) or +1 (timelike), got {self.lam!r}")
        nu = float(self.nu)
        if not math.isfinite(nu):
            raise DomainError(f"nu must be finite, got {self.nu!r}")
        if self.lam == -1 and abs(nu) <= 1:
            raise DomainError(
                f"spacelike helix surfaces need |nu| > 1 (got nu={nu}): "
                "the horizontal distribution of the Hopf map is not integrable"
            )
        if self.lam == 1 and nu == 0:
            raise DomainError("timelike surface with nu = 0 is a Hopf tube, excluded")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "lam", int(self.lam))
        object.__setattr__(self, "nu", nu)

    @property
    def spacelike(self) -> bool:
        return self.lam == -1


EpsLike = Union[BergerParams, float]


def _eps(params: EpsLike) -> float:
    if isinstance(params, BergerParams):
        return params.epsilon
    eps = float(params)
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {params!r}")
    return eps


@dataclass(frozen=True, eq=False)
class AmbientPoint:
    """A point of S^3 in R^4."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(4)
        if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
            raise DomainError(f"point {x} is not on the unit sphere (|x| = {np.linalg.norm(x)!r})")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def normalized(cls, x) -> "AmbientPoint":
        x = np.asarray(x, dtype=float)
        return cls(x / np.linalg.norm(x))

    def __eq__(self, other):
        return isinstance(other, AmbientPoint) and bool(np.array_equal(self.x, other.x))

    def __hash__(self):
        return hash(self.x.tobytes())


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector of R^4 tangent to S^3 at ``base``.

    Small tangency defects (between 1e-12 and 1e-6) are removed by projecting
    out the radial part; larger ones raise :class:`DomainError`.
    """

    base: AmbientPoint
    v: np.ndarray

    def __post_init__(self):
        if not isinstance(self.base, AmbientPoint):
            object.__setattr__(self, "base", AmbientPoint(self.base))
        p = self.base.x
        v = np.array(self.v, dtype=float).reshape(4)
        defect = float(v @ p)
        if abs(defect) > TANGENCY_MAX:
            raise DomainError(f"vector is not tangent to S^3 at the base point (<v,p> = {defect:.3e})")
        if abs(defect) > TANGENCY_SNAP:
            v = v - defect * p
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    def _same_base(self, other: "TangentVector") -> None:
        if not np.array_equal(self.base.x, other.base.x):
            raise UsageError("tangent vectors live at different base points")

    def __add__(self, other: "TangentVector") -> "TangentVector":
        self._same_base(other)
        return TangentVector(self.base, self.v + other.v)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        self._same_base(other)
        return TangentVector(self.base, self.v - other.v)

    def __mul__(self, s: float) -> "TangentVector":
        return TangentVector(self.base, float(s) * self.v)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.v)

    def __eq__(self, other):
        return (
            isinstance(other, TangentVector)
            and self.base == other.base
            and bool(np.array_equal(self.v, other.v))
        )

    def __hash__(self):
        return hash((self.base, self.v.tobytes()))


@dataclass(frozen=True)
class FrameCoefficients:
    """Components of a tangent vector in the frame (E1, E2, E3)."""

    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


# ---------------------------------------------------------------------------
# array kernels


def frame_array(p: np.ndarray, eps: float) -> np.ndarray:
    """Frame vectors at ``p`` (shape ``(..., 4)``) as an array ``(..., 3, 4)``."""
    p = np.asarray(p, dtype=float)
    return np.stack([(p @ J1.T) / eps, p @ J2.T, p @ J3.T], axis=-2)


def metric_array(p: np.ndarray, a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """g_eps(a, b) at ``p``, broadcasting over leading axes."""
    x1 = np.asarray(p) @ J1.T
    return np.sum(a * b, axis=-1) - (eps**2 + 1) * np.sum(a * x1, axis=-1) * np.sum(b * x1, axis=-1)


def frame_coefficients_array(p: np.ndarray, v: np.ndarray, eps: float) -> np.ndarray:
    """Components of ``v`` in (E1, E2, E3), shape ``(..., 3)``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    x1 = p @ J1.T
    # g(v, E1) = <v, X1>(1 - (eps^2 + 1)) / eps = -eps <v, X1>; c1 = -g(v, E1)
    c1 = eps * np.sum(v * x1, axis=-1)
    c2 = np.sum(v * (p @ J2.T), axis=-1)
    c3 = np.sum(v * (p @ J3.T), axis=-1)
    return np.stack([c1, c2, c3], axis=-1)


def from_coefficients_array(p: np.ndarray, c: np.ndarray, eps: float) -> np.ndarray:
    """Ambient 4-vector with frame components ``c`` at ``p``."""
    return np.einsum("...k,...ki->...i", np.asarray(c, dtype=float), frame_array(p, eps))


def metric_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """g_eps of two vectors given by frame components."""
    return np.sum(ETA * a * b, axis=-1)


def cross_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Lorentzian cross product on frame components."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack(
        [
            -(a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]),
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


def connection_table(eps: float) -> np.ndarray:
    """``G[i, j]`` holds the components of nabla_{E_{i+1}} E_{j+1}."""
    k = (2 + eps**2) / eps
    g = np.zeros((3, 3, 3))
    g[0, 1] = (0, 0, k)
    g[0, 2] = (0, -k, 0)
    g[1, 0] = (0, 0, eps)
    g[2, 0] = (0, -eps, 0)
    g[2, 1] = (-eps, 0, 0)
    g[1, 2] = (eps, 0, 0)
    return g


def covariant_coeffs(x: np.ndarray, y: np.ndarray, dy: np.ndarray, eps: float) -> np.ndarray:
    """Components of nabla_X Y given X, Y and the directional derivative X(y)."""
    return np.asarray(dy) + np.einsum("...i,...j,ijk->...k", x, y, connection_table(eps))


def curvature_table(eps: float) -> np.ndarray:
    """``R[i, j, k]`` holds the components of R(E_i, E_j) E_k (0-based)."""
    e2 = eps**2
    s = 4 + 3 * e2
    r = np.zeros((3, 3, 3, 3))
    r[0, 1, 0] = (0, -e2, 0)
    r[0, 2, 0] = (0, 0, -e2)
    r[0, 1, 1] = (-e2, 0, 0)
    r[0, 2, 2] = (-e2, 0, 0)
    r[1, 2, 2] = (0, s, 0)
    r[1, 2, 1] = (0, 0, -s)
    r[1, 0] = -r[0, 1]
    r[2, 0] = -r[0, 2]
    r[2, 1] = -r[1, 2]
    return r


def curvature_frame_coeffs(x, y, z, eps: float) -> np.ndarray:
    return np.einsum("...i,...j,...k,ijkl->...l", x, y, z, curvature_table(eps))


def curvature_closed_coeffs(x, y, z, eps: float) -> np.ndarray:
    """R(X, Y)Z from the closed-form expression in terms of g_eps and E1."""
    x, y, z = (np.asarray(t, dtype=float) for t in (x, y, z))
    e1 = np.array([1.0, 0.0, 0.0])
    g = metric_coeffs
    gx1, gy1, gz1 = g(x, e1), g(y, e1), g(z, e1)
    gyz, gxz = g(y, z), g(x, z)
    first = (4 + 3 * eps**2) * (gyz[..., None] * x - gxz[..., None] * y)
    second = 4 * (1 + eps**2) * (
        (gy1 * gz1)[..., None] * x
        - (gx1 * gz1)[..., None] * y
        + (gx1 * gyz - gy1 * gxz)[..., None] * e1
    )
    return first + second


# ---------------------------------------------------------------------------
# per-point operations


def hopf_map(p: AmbientPoint) -> np.ndarray:
    """Hopf projection S^3 -> S^2(1/2), returned as ``(Re, Im, t)``."""
    x = p.x
    z = complex(x[0], x[1])
    w = complex(x[2], x[3])
    zw = z * w.conjugate()
    return 0.5 * np.array([2 * zw.real, 2 * zw.imag, abs(z) ** 2 - abs(w) ** 2])


def frame_at(params: EpsLike, p: AmbientPoint) -> tuple[TangentVector, TangentVector, TangentVector]:
    """Orthonormal frame (E1, E2, E3) of g_eps at ``p``."""
    f = frame_array(p.x, _eps(params))
    return TangentVector(p, f[0]), TangentVector(p, f[1]), TangentVector(p, f[2])


def metric(params: EpsLike, U: TangentVector, V: TangentVector) -> float:
    """g_eps(U, V) = <U, V> - (eps^2 + 1) <U, X1> <V, X1>."""
    U._same_base(V)
    return float(metric_array(U.base.x, U.v, V.v, _eps(params)))


def frame_coefficients(params: EpsLike, V: TangentVector) -> FrameCoefficients:
    c = frame_coefficients_array(V.base.x, V.v, _eps(params))
    return FrameCoefficients(*(float(t) for t in c))


def from_coefficients(params: EpsLike, p: AmbientPoint, c) -> TangentVector:
    if isinstance(c, FrameCoefficients):
        c = c.as_array()
    return TangentVector(p, from_coefficients_array(p.x, c, _eps(params)))


def cross(params: EpsLike, U: TangentVector, V: TangentVector) -> TangentVector:
    """Cross product U ^ V of S^3_eps."""
    U._same_base(V)
    eps = _eps(params)
    a = frame_coefficients_array(U.base.x, U.v, eps)
    b = frame_coefficients_array(V.base.x, V.v, eps)
    return from_coefficients(eps, U.base, cross_coeffs(a, b))


Field = Callable[[np.ndarray], np.ndarray]
FieldDerivative = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _slide(p: np.ndarray, x: np.ndarray, t: float) -> np.ndarray:
    q = p + t * x
    return q / np.linalg.norm(q)


def field_derivative_fd(field: Field, p: np.ndarray, x: np.ndarray, eps: float, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central difference of the frame components of ``field`` along ``x``."""
    if not h > 0:
        raise ConfigurationError(f"finite-difference step must be positive, got {h!r}")
    qp, qm = _slide(p, x, h), _slide(p, x, -h)
    cp = frame_coefficients_array(qp, field(qp), eps)
    cm = frame_coefficients_array(qm, field(qm), eps)
    return (cp - cm) / (2 * h)


def covariant_derivative(
    params: EpsLike,
    X: TangentVector,
    field: Field,
    *,
    derivative: Optional[FieldDerivative] = None,
    h: float = DEFAULT_FD_STEP,
) -> TangentVector:
    """nabla^eps_X Y for a vector field Y given as a callable of position.

    ``field(q)`` returns the ambient 4-vector of Y at ``q``.  The directional
    derivative of Y's frame components along X is taken from
    ``derivative(p, X)`` when supplied and from central differences of step
    ``h`` otherwise.
    """
    if not h > 0:
        raise ConfigurationError(f"finite-difference step must be positive, got {h!r}")
    eps = _eps(params)
    p, x = X.base.x, X.v
    xc = frame_coefficients_array(p, x, eps)
    yc = frame_coefficients_array(p, field(p), eps)
    if derivative is not None:
        dy = np.asarray(derivative(p, x), dtype=float)
    else:
        dy = field_derivative_fd(field, p, x, eps, h)
    return from_coefficients(eps, X.base, covariant_coeffs(xc, yc, dy, eps))


def hopf_field(params: EpsLike) -> Field:
    """E1 as a vector field on R^4."""
    eps = _eps(params)
    return lambda q: (np.asarray(q) @ J1.T) / eps


def constant_frame_field(params: EpsLike, coeffs) -> Field:
    """The field with the given constant components in (E1, E2, E3)."""
    eps = _eps(params)
    c = np.asarray(coeffs, dtype=float)
    return lambda q: from_coefficients_array(q, c, eps)


def _zero_derivative(p, x):
    return np.zeros(3)


def killing_residual(params: EpsLike, X: TangentVector, *, finite_difference: bool = False, h: float = DEFAULT_FD_STEP) -> float:
    """Size of nabla_X E1 + eps X ^ E1, which vanishes for the Hopf field.

    The size is measured in the positive-definite norm of the frame
    components, so a null residual is still reported as nonzero.
    """
    eps = _eps(params)
    nab = covariant_derivative(
        eps, X, hopf_field(eps), derivative=None if finite_difference else _zero_derivative, h=h
    )
    p = X.base.x
    xc = frame_coefficients_array(p, X.v, eps)
    res = frame_coefficients_array(p, nab.v, eps) + eps * cross_coeffs(xc, np.array([1.0, 0.0, 0.0]))
    return float(np.linalg.norm(res))


CURVATURE_MODES = ("frame-table", "closed-form")


def curvature(params: EpsLike, X: TangentVector, Y: TangentVector, Z: TangentVector, mode: str = "frame-table") -> TangentVector:
    """Riemann tensor R(X, Y)Z with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
    X._same_base(Y)
    X._same_base(Z)
    eps = _eps(params)
    p = X.base.x
    x, y, z = (frame_coefficients_array(p, t.v, eps) for t in (X, Y, Z))
    if mode == "frame-table":
        c = curvature_frame_coeffs(x, y, z, eps)
    elif mode == "closed-form":
        c = curvature_closed_coeffs(x, y, z, eps)
    else:
        raise ConfigurationError(f"unknown curvature mode {mode!r}; expected one of {CURVATURE_MODES}")
    return from_coefficients(eps, X.base, c)


def sectional_curvature(params: EpsLike, X: TangentVector, Y: TangentVector) -> float:
    """g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) - g(X,Y)^2) for a non-degenerate plane."""
    eps = _eps(params)
    p = X.base.x
    x, y = (frame_coefficients_array(p, t.v, eps) for t in (X, Y))
    return float(sectional_curvature_coeffs(x, y, eps))


def sectional_curvature_coeffs(x, y, eps: float):
    r = curvature_closed_coeffs(x, y, y, eps)
    den = metric_coeffs(x, x) * metric_coeffs(y, y) - metric_coeffs(x, y) ** 2
    return metric_coeffs(r, x) / den


def random_point(rng: np.random.Generator) -> AmbientPoint:
    return AmbientPoint.normalized(rng.normal(size=4))


def random_tangent(rng: np.random.Generator, p: AmbientPoint, scale: float = 1.0) -> TangentVector:
    v = rng.normal(size=4) * scale
    return TangentVector(p, v - (v @ p.x) * p.x)
