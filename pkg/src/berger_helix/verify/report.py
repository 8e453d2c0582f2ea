"""Run every check over a parameter grid and collect a ResidualReport."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from berger_helix.errors import ConfigurationError
from berger_helix.helix import HelixSpec
from berger_helix.isometry import validate_family
from berger_helix.verify import identities as ids
from berger_helix.verify import shape as sh
from berger_helix.verify.curve import curve_metrics
from berger_helix.verify.normal import normal_data
from berger_helix.verify.results import ResidualReport


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-8
    exact: float = 1e-12
    constants: float = 1e-9
    compat: float = 1e-9
    jet: float = 1e-10
    shape: float = 1e-4
    gauss_rel: float = 1e-3
    mu: float = 1e-3
    phase: float = 1e-4
    structure: float = 1e-4
    frenet: float = 1e-6
    curve_closed: float = 1e-10


@dataclass(frozen=True)
class Grid:
    """Tensor grid over (u, v) plus ``random_points`` seeded extra samples.

    A resolution of 0 in either direction gives no grid points.
    """

    u_range: tuple[float, float]
    v_range: tuple[float, float]
    nu: int = 64
    nv: int = 64
    random_points: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.nu < 0 or self.nv < 0 or self.random_points < 0:
            raise ConfigurationError("grid sizes must be non-negative")
        for r in (self.u_range, self.v_range):
            if not (math.isfinite(r[0]) and math.isfinite(r[1]) and r[0] <= r[1]):
                raise ConfigurationError(f"invalid range {r!r}")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat arrays of u and v: the tensor grid first, then the extras."""
        uu, vv = np.meshgrid(np.linspace(*self.u_range, self.nu), np.linspace(*self.v_range, self.nv), indexing="ij")
        rng = np.random.default_rng(self.seed)
        ru = rng.uniform(*self.u_range, self.random_points)
        rv = rng.uniform(*self.v_range, self.random_points)
        return np.concatenate([uu.ravel(), ru]), np.concatenate([vv.ravel(), rv])


def _meta(spec: HelixSpec, grid: Grid) -> dict[str, str]:
    p = spec.params
    return {
        "label": spec.label or spec.family.name,
        "family": spec.family.name,
        "branch": f"{spec.family.branch:+d}",
        "epsilon": repr(p.epsilon),
        "lambda": f"{p.lam:+d}",
        "nu": repr(p.nu),
        "u_range": f"{grid.u_range[0]!r}:{grid.u_range[1]!r}",
        "v_range": f"{grid.v_range[0]!r}:{grid.v_range[1]!r}",
        "grid": f"{grid.nu}x{grid.nv}",
        "random_points": str(grid.random_points),
        "seed": str(grid.seed),
    }


def full_report(spec: HelixSpec, grid: Grid, tolerances: Tolerances = Tolerances()) -> ResidualReport:
    """Every check of the helix-surface identities on the points of ``grid``.

    Finite-difference checks skip points that are degenerate or sit next to a
    pole of mu; the skip counts appear in the report.
    """
    tol = tolerances
    report = ResidualReport(meta=_meta(spec, grid))
    u, v = grid.points()
    if u.size == 0:
        return report
    params, c = spec.params, spec.constants

    inv = c.invariant_residuals(params)
    report.record("constants[invariants]", max(inv.values()), tol.constants)
    lo, hi = min(grid.v_range[0], grid.v_range[1]), max(grid.v_range)
    window = (lo, hi) if hi > lo else spec.family.validation_window()
    fam = validate_family(spec.family, window=window)
    report.record("family[compat]", fam.compat, tol.compat)
    report.record("family[orthogonality]", fam.orthogonality, tol.exact)
    report.record("family[commutation]", fam.commutation, tol.exact)

    jet = spec(u, v)
    for name, res in ids.surface_invariants(jet).items():
        report.record_grid(f"jet[{name}]", res, tol.jet, u, v)
    report.record_grid("ambient[frame_gram]", ids.frame_gram_residual(jet, params), tol.exact, u, v)
    report.record_grid("ode", ids.check_ode(jet, c), tol.algebraic, u, v)
    report.merge(ids.check_products(jet, c, params, tol.algebraic))
    r1, r2 = ids.check_helix_conditions(jet, params)
    report.record_grid("helix_condition[tangent]", r1, tol.algebraic, u, v)
    report.record_grid("helix_condition[transverse]", r2, tol.algebraic, u, v)
    if spec.canonical_v:
        report.record_grid("fv_norm", ids.fv_norm_residual(jet, c), tol.algebraic, u, v)

    nd = normal_data(jet, params)
    report.meta["degenerate_points"] = str(int(nd.degenerate.sum()))
    for name, res in ids.normal_identities(jet, nd, params).items():
        report.record_grid(f"normal[{name}]", res, tol.algebraic, u, v)

    shape = sh.shape_operator(spec, u, v, params)
    unreliable = ~shape.reliable
    report.meta["unreliable_points"] = str(int((unreliable & ~nd.degenerate).sum()))

    def fd(values):
        return np.where(unreliable, np.nan, values)

    report.record_grid("shape[form]", fd(sh.shape_form_residual(shape, params)), tol.shape, u, v)
    k_closed = sh.gauss_curvature_closed(params)
    k_rel = np.abs(sh.gauss_curvature(shape, params) - k_closed) / max(1.0, abs(k_closed))
    report.record_grid("gauss[curvature]", fd(k_rel), tol.gauss_rel, u, v)
    report.record_grid(
        "gauss[ambient_sectional]",
        np.abs(shape.ambient_sectional - sh.ambient_sectional_closed(params)),
        tol.algebraic,
        u,
        v,
    )
    report.record_grid("mu_pde", sh.check_mu_pde(spec, u, v, params, c), tol.mu, u, v)
    pu, pv = sh.check_normal_phase(spec, u, v, params, B=c.B)
    report.record_grid("phase[u]", pu, tol.phase, u, v)
    report.record_grid("phase[v]", pv, tol.phase, u, v)
    lhs_u, lhs_v, rhs_u, rhs_v = sh.structure_residuals(spec, u, v, params, shape)
    report.record_grid("structure[Fu]", fd(np.maximum(np.abs(lhs_u), np.abs(rhs_u))), tol.structure, u, v)
    report.record_grid("structure[Fv]", fd(np.maximum(np.abs(lhs_v), np.abs(rhs_v))), tol.structure, u, v)

    cm = curve_metrics(c, params)
    res = cm.residuals
    report.record("curve[speed_eps]", res["speed_eps"], tol.curve_closed)
    report.record("curve[helix_angle]", res["helix_angle"], tol.curve_closed)
    report.record("curve[kappa_closed_forms]", res["kappa_closed_forms"], tol.curve_closed)
    report.record("curve[kappa_frenet]", res["kappa_frenet"], tol.frenet)
    report.record("curve[tau_frenet]", res["tau_frenet"], tol.frenet)
    return report
