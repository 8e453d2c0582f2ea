"""One-parameter families Q(v) of isometries of S^3_eps.

The isometries of S^3_eps are the orthogonal matrices that commute or
anticommute with J1.  A family is generated by a constant angle ``xi`` and three
scalar curves ``xi1, xi2, xi3`` of ``v``: the first row of Q is the unit vector
``r1(xi1, xi2, xi3)`` and the remaining rows are fixed linear images of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from berger_helix.ambient import J1, J2, J3
from berger_helix.errors import ConfigurationError, DomainError

ORTHO_TOL = 1e-12
COMPAT_TOL = 1e-9
VALIDATION_SAMPLES = 257
# window used to validate families whose domain is unbounded
DEFAULT_WINDOW = (-2 * math.pi, 2 * math.pi)

ScalarFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Curve:
    """A scalar function of ``v`` with an optional analytic derivative.

    Without ``df`` the derivative is a fourth-order central difference.
    Both callables must accept numpy arrays.
    """

    f: ScalarFn
    df: Optional[ScalarFn] = None
    name: str = "custom"
    fd_step: float = 1e-4

    def __call__(self, v):
        return self.f(np.asarray(v, dtype=float))

    def derivative(self, v):
        v = np.asarray(v, dtype=float)
        if self.df is not None:
            return self.df(v) * np.ones_like(v)
        h = self.fd_step
        f = self.f
        return (8 * (f(v + h) - f(v - h)) - (f(v + 2 * h) - f(v - 2 * h))) / (12 * h)

    @classmethod
    def constant(cls, c: float) -> "Curve":
        c = float(c)
        return cls(lambda v: np.full_like(v, c, dtype=float), lambda v: np.zeros_like(v, dtype=float), name=f"const({c!r})")

    @classmethod
    def linear(cls, slope: float, offset: float = 0.0) -> "Curve":
        a, b = float(slope), float(offset)
        return cls(lambda v: a * v + b, lambda v: np.full_like(v, a, dtype=float), name=f"linear({a!r},{b!r})")

    @classmethod
    def exp(cls) -> "Curve":
        return cls(np.exp, np.exp, name="exp")


NAMED_CURVES: dict[str, Callable[[], Curve]] = {
    "v": lambda: Curve.linear(1.0),
    "linear": lambda: Curve.linear(1.0),
    "exp": Curve.exp,
    "2v": lambda: Curve.linear(2.0),
    "sin": lambda: Curve(np.sin, np.cos, name="sin"),
    "zero": lambda: Curve.constant(0.0),
}


def named_curve(name: str) -> Curve:
    try:
        return NAMED_CURVES[name]()
    except KeyError:
        raise ConfigurationError(f"unknown curve {name!r}; choose from {sorted(NAMED_CURVES)}") from None


def r1(xi1, xi2, xi3) -> np.ndarray:
    """First row of Q: a unit vector parametrized by three angles."""
    xi1, xi2, xi3 = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (xi1, xi2, xi3)))
    c1, s1 = np.cos(xi1), np.sin(xi1)
    return np.stack([c1 * np.cos(xi2), -c1 * np.sin(xi2), s1 * np.cos(xi3), -s1 * np.sin(xi3)], axis=-1)


def _r1_partials(xi1, xi2, xi3) -> np.ndarray:
    """d r1 / d xi_k for k = 1, 2, 3, shape ``(..., 3, 4)``."""
    c1, s1 = np.cos(xi1), np.sin(xi1)
    c2, s2 = np.cos(xi2), np.sin(xi2)
    c3, s3 = np.cos(xi3), np.sin(xi3)
    z = np.zeros_like(c1)
    d1 = np.stack([-s1 * c2, s1 * s2, c1 * c3, -c1 * s3], axis=-1)
    d2 = np.stack([-c1 * s2, -c1 * c2, z, z], axis=-1)
    d3 = np.stack([z, z, -s1 * s3, -s1 * c3], axis=-1)
    return np.stack([d1, d2, d3], axis=-2)


def row_maps(xi: float, branch: int) -> np.ndarray:
    """The four matrices sending r1 to the rows of Q, shape ``(4, 4, 4)``."""
    c, s = math.cos(xi), math.sin(xi)
    return np.stack(
        [
            np.eye(4),
            branch * J1,
            c * J2 + s * J3,
            branch * (-c * J3 + s * J2),
        ]
    )


@lru_cache(maxsize=None)
def commuting_branch() -> int:
    """Sign choice of the row formula that yields matrices commuting with J1.

    Decided numerically at a generic sample instead of being assumed.
    """
    rng = np.random.default_rng(12345)
    xi, a, b, c = rng.uniform(-3, 3, size=4)
    for branch in (1, -1):
        q = np.einsum("kij,j->ki", row_maps(xi, branch), r1(a, b, c))
        if np.abs(q @ J1 - J1 @ q).max() < ORTHO_TOL:
            return branch
    raise AssertionError("neither sign choice commutes with J1")


@dataclass(frozen=True)
class OrthogonalMatrix4:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(4, 4)
        err = np.abs(m.T @ m - np.eye(4)).max()
        if err > ORTHO_TOL:
            raise DomainError(f"matrix is not orthogonal (max |Q^T Q - I| = {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def commutes_with_j1(self, tol: float = ORTHO_TOL) -> bool:
        return bool(np.abs(self.m @ J1 - J1 @ self.m).max() <= tol)

    def anticommutes_with_j1(self, tol: float = ORTHO_TOL) -> bool:
        return bool(np.abs(self.m @ J1 + J1 @ self.m).max() <= tol)


@dataclass(frozen=True)
class IsometryFamily:
    """Q(v) built from ``xi`` (constant) and the curves ``xi1, xi2, xi3``.

    ``branch`` selects the sign pattern of the second and fourth rows; ``None``
    picks the branch that commutes with J1.
    """

    xi: float
    xi1: Curve
    xi2: Curve
    xi3: Curve
    branch: Optional[int] = None
    domain: tuple = (-math.inf, math.inf)
    name: str = "custom"
    _maps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        branch = commuting_branch() if self.branch is None else self.branch
        if branch not in (1, -1):
            raise ConfigurationError(f"branch must be +1 or -1, got {branch!r}")
        lo, hi = self.domain
        if not lo < hi:
            raise ConfigurationError(f"empty family domain {self.domain!r}")
        object.__setattr__(self, "branch", branch)
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "_maps", row_maps(float(self.xi), branch))

    @property
    def commuting(self) -> bool:
        return self.branch == commuting_branch()

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=float)
        lo, hi = self.domain
        return bool(np.all((v >= lo) & (v <= hi)))

    def angles(self, v):
        return self.xi1(v), self.xi2(v), self.xi3(v)

    def angle_derivatives(self, v):
        return self.xi1.derivative(v), self.xi2.derivative(v), self.xi3.derivative(v)

    def matrix(self, v) -> np.ndarray:
        """Q(v) as an array of shape ``(..., 4, 4)`` (vectorized over ``v``)."""
        return np.einsum("kij,...j->...ki", self._maps, r1(*self.angles(v)))

    def matrix_derivative(self, v) -> np.ndarray:
        """dQ/dv by the chain rule through the curve derivatives."""
        v = np.asarray(v, dtype=float)
        a = self.angles(v)
        da = np.stack(np.broadcast_arrays(*self.angle_derivatives(v)), axis=-1)
        dr1 = np.einsum("...k,...ki->...i", da, _r1_partials(*np.broadcast_arrays(*a)))
        return np.einsum("kij,...j->...ki", self._maps, dr1)

    def validation_window(self) -> tuple:
        lo, hi = self.domain
        wlo, whi = DEFAULT_WINDOW
        return (lo if math.isfinite(lo) else wlo, hi if math.isfinite(hi) else whi)


def build_Q(family: IsometryFamily, v: float, *, require_commuting: bool = False) -> OrthogonalMatrix4:
    """Q(v) for a single parameter value."""
    q = OrthogonalMatrix4(family.matrix(float(v)))
    if require_commuting and not q.commutes_with_j1():
        raise DomainError("family does not commute with J1 (anticommuting branch)")
    return q


def q_derivative(family: IsometryFamily, v: float) -> np.ndarray:
    return family.matrix_derivative(float(v))


def compat_residual(family: IsometryFamily, v):
    """cos^2(xi1) xi2' - sin^2(xi1) xi3', which vanishes for helix surfaces."""
    v = np.asarray(v, dtype=float)
    x1 = family.xi1(v)
    return np.cos(x1) ** 2 * family.xi2.derivative(v) - np.sin(x1) ** 2 * family.xi3.derivative(v)


@dataclass(frozen=True)
class FamilyValidation:
    compat: float
    orthogonality: float
    commutation: float
    anticommutation: float
    det_spread: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.compat <= COMPAT_TOL and self.orthogonality <= ORTHO_TOL and self.commutation <= ORTHO_TOL


def validate_family(family: IsometryFamily, window: Optional[tuple] = None, samples: int = VALIDATION_SAMPLES) -> FamilyValidation:
    """Sample the family on evenly spaced ``v`` and measure its defects."""
    lo, hi = window if window is not None else family.validation_window()
    v = np.linspace(lo, hi, samples)
    q = family.matrix(v)
    qt = np.swapaxes(q, -1, -2)
    det = np.linalg.det(q)
    return FamilyValidation(
        compat=float(np.abs(compat_residual(family, v)).max()),
        orthogonality=float(np.abs(qt @ q - np.eye(4)).max()),
        commutation=float(np.abs(q @ J1 - J1 @ q).max()),
        anticommutation=float(np.abs(q @ J1 + J1 @ q).max()),
        det_spread=float(det.max() - det.min()),
        samples=samples,
    )


def example1_family(xi2: Curve, **kw) -> IsometryFamily:
    """xi = pi/2, xi1 = pi/4, xi3 = xi2."""
    return IsometryFamily(math.pi / 2, Curve.constant(math.pi / 4), xi2, xi2, name=f"example1[{xi2.name}]", **kw)


def example2_family(d: float, speed: float, d2: float = 0.0, d3: float = 0.0, **kw) -> IsometryFamily:
    """Constant xi1 with tan(xi1) = 1/d and linear xi2, xi3.

    ``speed`` is sqrt(lambda + nu^2), so that <F_v, F_v> = lambda + nu^2.
    """
    if not 0 < d < 1:
        raise DomainError(f"slope d must lie in (0, 1), got {d!r}")
    x1 = math.atan2(1.0, d)
    return IsometryFamily(
        0.0,
        Curve.constant(x1),
        Curve.linear(speed / d, d2),
        Curve.linear(speed * d, d3),
        name="example2",
        **kw,
    )
