"""Numerical certification of helix-surface identities."""
from berger_helix.verify.curve import CurveMetrics, curve_metrics
from berger_helix.verify.identities import (
    check_helix_conditions,
    check_ode,
    check_products,
    normal_identities,
    product_residuals,
)
from berger_helix.verify.normal import NormalData, angle_function, hyperbolic_angle, normal_data, unit_normal
from berger_helix.verify.report import Grid, Tolerances, full_report
from berger_helix.verify.results import CheckResult, ResidualReport
from berger_helix.verify.shape import (
    ShapeData,
    check_mu_pde,
    check_normal_phase,
    gauss_curvature,
    shape_operator,
)

__all__ = [
    "CheckResult",
    "CurveMetrics",
    "Grid",
    "NormalData",
    "ResidualReport",
    "ShapeData",
    "Tolerances",
    "angle_function",
    "check_helix_conditions",
    "check_mu_pde",
    "check_normal_phase",
    "check_ode",
    "check_products",
    "curve_metrics",
    "full_report",
    "gauss_curvature",
    "hyperbolic_angle",
    "normal_data",
    "normal_identities",
    "product_residuals",
    "shape_operator",
    "unit_normal",
]
