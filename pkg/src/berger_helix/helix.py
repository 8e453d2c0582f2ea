"""Helix surfaces F(u, v) = Q(v) beta(u) and their derived constants."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from berger_helix.ambient import BergerParams
from berger_helix.errors import ConfigurationError, DomainError
from berger_helix.isometry import (
    COMPAT_TOL,
    ORTHO_TOL,
    Curve,
    IsometryFamily,
    example1_family,
    example2_family,
    validate_family,
)


@dataclass(frozen=True)
class HelixConstants:
    """Scalars that fix the generating curve beta and the surface ODE.

    ``sqrt_lam_B`` and ``sqrt_lam_nu2`` are sqrt(lambda B) and
    sqrt(lambda + nu^2), computed once.  Instances are not revalidated so that
    deliberately perturbed copies (see :meth:`perturbed`) can be built.
    """

    B: float
    a_tilde: float
    b_tilde: float
    alpha1: float
    alpha2: float
    g11: float
    g33: float
    d: float
    D: float
    E: float
    I: float
    sqrt_lam_B: float
    sqrt_lam_nu2: float

    @property
    def ode_coefficient(self) -> float:
        """b~^2 - 2 a~, the coefficient of F_uu in the fourth-order equation."""
        return self.b_tilde**2 - 2 * self.a_tilde

    def perturbed(self, name: str, rel: float) -> "HelixConstants":
        """Copy with one field scaled by ``1 + rel`` (negative controls)."""
        if name not in {f.name for f in dataclasses.fields(self)}:
            raise KeyError(name)
        return dataclasses.replace(self, **{name: getattr(self, name) * (1 + rel)})

    def invariant_residuals(self, params: BergerParams) -> dict[str, float]:
        """Relative defects of the algebraic relations between the constants."""
        at, bt = self.a_tilde, self.b_tilde
        lam, nu = params.lam, params.nu

        def rel(a, b):
            return abs(a - b) / max(1.0, abs(b))

        return {
            "alpha_product": rel(self.alpha1 * self.alpha2, at),
            "alpha_square_sum": rel(self.alpha1**2 + self.alpha2**2, bt**2 - 2 * at),
            "radii_sum": abs(self.g11 + self.g33 - 1.0),
            "radii_product": rel(self.g11 * self.g33, (1 + lam * nu**2) / (4 * self.B)),
            "slope": rel(self.d, math.sqrt(self.alpha2 / self.alpha1)),
            "D": rel(self.D, at * bt**2 - 3 * at**2),
            "E": rel(self.E, (bt**2 - 2 * at) * self.D - at**3),
            "I": rel(self.I, at * ((1 + lam * nu**2) / params.epsilon + bt)),
            "B": rel(self.B, 1 + lam * nu**2 * (1 + params.epsilon**2)),
            "sqrt_lam_B": rel(self.sqrt_lam_B**2, lam * self.B),
            "sqrt_lam_nu2": rel(self.sqrt_lam_nu2**2, lam + nu**2),
        }


def _sqrt_checked(x: float, what: str) -> float:
    if not x > 0:
        raise DomainError(f"{what} must be positive, got {x!r}")
    return math.sqrt(x)


def constants(params: BergerParams) -> HelixConstants:
    """Derived constants for the given ambient and angle data."""
    eps, lam, nu = params.epsilon, params.lam, params.nu
    B = 1 + lam * nu**2 * (1 + eps**2)
    sqrt_lam_B = _sqrt_checked(lam * B, "lambda*B")
    sqrt_lam_nu2 = _sqrt_checked(lam + nu**2, "lambda + nu^2")
    a_tilde = lam * B * (lam + nu**2) / eps**2
    b_tilde = -2 * B / eps
    alpha1 = (lam * B + eps * abs(nu) * sqrt_lam_B) / eps
    alpha2 = (lam * B - eps * abs(nu) * sqrt_lam_B) / eps
    g11 = lam * eps * alpha2 / (2 * B)
    g33 = lam * eps * alpha1 / (2 * B)
    d = (sqrt_lam_B - eps * abs(nu)) / sqrt_lam_nu2
    D = a_tilde * b_tilde**2 - 3 * a_tilde**2
    E = (b_tilde**2 - 2 * a_tilde) * D - a_tilde**3
    I = a_tilde * ((1 + lam * nu**2) / eps + b_tilde)
    c = HelixConstants(B, a_tilde, b_tilde, alpha1, alpha2, g11, g33, d, D, E, I, sqrt_lam_B, sqrt_lam_nu2)
    if not (a_tilde > 0 and alpha2 > 0 and 0 < d < 1):
        raise DomainError(f"parameters {params} do not define a helix surface")
    bad = {k: r for k, r in c.invariant_residuals(params).items() if r > 1e-9}
    if bad:
        raise DomainError(f"derived constants violate their identities: {bad}")
    return c


def _circle(freq: float, t, order: int):
    """``order``-th derivative of (cos(freq t), sin(freq t)).

    Each derivative is a quarter turn, applied by swapping components so that
    all orders share the same rounded phase.
    """
    ph = freq * t
    c, s = np.cos(ph), np.sin(ph)
    for _ in range(order % 4):
        c, s = -s, c
    return freq**order * c, freq**order * s


def beta(c: HelixConstants, lam: int, u, order: int = 0) -> np.ndarray:
    """Twisted torus geodesic beta(u) (or its ``order``-th derivative)."""
    u = np.asarray(u, dtype=float)
    r1, r3 = math.sqrt(c.g11), math.sqrt(c.g33)
    a, b = _circle(c.alpha1, u, order)
    x, y = _circle(c.alpha2, u, order)
    return np.stack([r1 * a, lam * r1 * b, r3 * x, lam * r3 * y], axis=-1)


def beta_arclength(c: HelixConstants, lam: int, s, order: int = 0) -> np.ndarray:
    """beta reparametrized by Euclidean arc length s = sqrt(a~) u."""
    s = np.asarray(s, dtype=float)
    d = c.d
    k = 1 / math.sqrt(1 + d * d)
    a, b = _circle(1 / d, s, order)
    x, y = _circle(d, s, order)
    return k * np.stack([d * a, lam * d * b, x, lam * y], axis=-1)


def s_to_u(c: HelixConstants, s):
    return np.asarray(s, dtype=float) / math.sqrt(c.a_tilde)


@dataclass(frozen=True)
class HelixSpec:
    """A candidate helix surface.

    With ``strict=True`` (the default) the family must commute with J1 and
    satisfy the compatibility condition; ``strict=False`` admits the
    deliberately broken surfaces used as negative controls.  ``canonical_v``
    declares the normalization <F_v, F_v> = lambda + nu^2.
    """

    params: BergerParams
    constants: HelixConstants
    family: IsometryFamily
    canonical_v: bool = False
    strict: bool = True
    label: str = ""

    def __post_init__(self):
        if self.strict:
            if not self.family.commuting:
                raise DomainError("helix surfaces need a family commuting with J1")
            val = validate_family(self.family)
            if val.compat > COMPAT_TOL:
                raise DomainError(f"family violates the compatibility condition (residual {val.compat:.3e})")
            if val.orthogonality > ORTHO_TOL or val.commutation > ORTHO_TOL:
                raise DomainError("family is not a family of isometries commuting with J1")

    def __call__(self, u, v) -> "SurfaceJet":
        return surface_jet(self, u, v)


@dataclass(frozen=True)
class SurfaceJet:
    """F and its u-derivatives up to order four, plus F_v, at (u, v).

    Every field is an array of shape ``(..., 4)``; u-derivatives are exact.
    """

    u: np.ndarray
    v: np.ndarray
    F: np.ndarray
    Fu: np.ndarray
    Fuu: np.ndarray
    Fuuu: np.ndarray
    Fuuuu: np.ndarray
    Fv: np.ndarray

    def invariant_residuals(self) -> tuple[float, float]:
        norm = np.abs(np.sum(self.F * self.F, axis=-1) - 1).max()
        ortho = np.abs(np.sum(self.F * self.Fu, axis=-1)).max()
        return float(norm), float(ortho)


def surface_jet(spec: HelixSpec, u, v) -> SurfaceJet:
    """Evaluate F = Q(v) beta(u) and its derivatives (vectorized over u, v)."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if not spec.family.contains(v):
        raise DomainError(f"v outside the family domain {spec.family.domain}")
    c = spec.constants
    lam = spec.params.lam
    q = spec.family.matrix(v)
    dq = spec.family.matrix_derivative(v)
    b = [beta(c, lam, u, k) for k in range(5)]

    def apply(m, x):
        return np.einsum("...ij,...j->...i", m, x)

    return SurfaceJet(
        u=u,
        v=v,
        F=apply(q, b[0]),
        Fu=apply(q, b[1]),
        Fuu=apply(q, b[2]),
        Fuuu=apply(q, b[3]),
        Fuuuu=apply(q, b[4]),
        Fv=apply(dq, b[0]),
    )


PERTURBABLE = tuple(f.name for f in dataclasses.fields(HelixConstants)) + ("nu",)


def perturbed_spec(spec: HelixSpec, name: str, rel: float) -> HelixSpec:
    """Negative control: scale one constant (or the declared nu) by ``1 + rel``.

    The surface keeps being generated from the constants of the copy, so
    perturbing a frequency or radius changes the surface while perturbing a
    product constant only changes what the checks expect.  Perturbing ``nu``
    leaves the surface alone and changes the declared angle function.
    """
    if name == "nu":
        p = spec.params
        params = BergerParams(p.epsilon, p.lam, p.nu * (1 + rel))
        return dataclasses.replace(spec, params=params, strict=False)
    try:
        c = spec.constants.perturbed(name, rel)
    except KeyError:
        raise ConfigurationError(f"cannot perturb {name!r}; choose from {', '.join(PERTURBABLE)}") from None
    return dataclasses.replace(spec, constants=c, strict=False)


def example1_spec(params: BergerParams, xi2: Curve, **kw) -> HelixSpec:
    fam_kw = {k: kw.pop(k) for k in ("branch", "domain") if k in kw}
    return HelixSpec(params, constants(params), example1_family(xi2, **fam_kw), **kw)


def example2_spec(params: BergerParams, d2: float = 0.0, d3: float = 0.0, **kw) -> HelixSpec:
    c = constants(params)
    fam_kw = {k: kw.pop(k) for k in ("branch", "domain") if k in kw}
    kw.setdefault("canonical_v", True)
    return HelixSpec(params, c, example2_family(c.d, c.sqrt_lam_nu2, d2, d3, **fam_kw), **kw)
