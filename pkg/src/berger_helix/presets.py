"""Figure presets and the validated run configuration used by the CLI."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from berger_helix.ambient import BergerParams
from berger_helix.errors import ConfigurationError, UsageError
from berger_helix.export import Pole
from berger_helix.helix import HelixSpec, constants, example1_spec, example2_spec, perturbed_spec
from berger_helix.isometry import commuting_branch, named_curve
from berger_helix.verify.report import Grid, Tolerances

FAMILIES = ("example1", "example2")


@dataclass(frozen=True)
class Preset:
    """Parameters and ranges of a figure.  ``s_range`` is in arc length."""

    name: str
    epsilon: float
    nu: float
    lam: int
    family: str
    s_range: tuple[float, float]
    v_range: tuple[float, float]
    xi2: str = "v"
    # the figures show both causal types for these parameter sets
    both_lambdas: bool = False


PRESETS: dict[str, Preset] = {
    "fig1": Preset("fig1", 2.0, 4.0, -1, "example1", (-4 * math.pi, 4 * math.pi), (-2 * math.pi, 2 * math.pi), "v", True),
    "fig2": Preset("fig2", 1.0, 2.0, 1, "example1", (-2 * math.pi, 2 * math.pi), (-2.0, 2.0), "exp", True),
    "fig3": Preset("fig3", 1.0, math.sqrt(5.0), -1, "example2", (-2 * math.pi, 2 * math.pi), (-2.0, 2.0)),
    "fig3bis": Preset("fig3bis", 1.0, 2.0, 1, "example2", (-2 * math.pi, 2 * math.pi), (-2.0, 2.0)),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to build a surface, sample it and verify it.

    ``u_range`` is in the canonical coordinate; ``s_range`` (arc length) is
    converted with u = s / sqrt(a~) when ``u_range`` is not given.
    """

    params: BergerParams
    family: str = "example1"
    xi2: str = "v"
    u_range: Optional[tuple[float, float]] = None
    s_range: Optional[tuple[float, float]] = None
    v_range: tuple[float, float] = (-2.0, 2.0)
    resolution: tuple[int, int] = (64, 64)
    pole: Pole = field(default_factory=Pole)
    tolerances: Tolerances = field(default_factory=Tolerances)
    label: str = ""
    branch: Optional[int] = None
    perturb: Optional[tuple[str, float]] = None
    random_points: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.u_range is not None and self.s_range is not None:
            raise UsageError("give either a u-range or an s-range, not both")
        named_curve(self.xi2)
        # validates the helix constraints before any sampling
        constants(self.params)

    def resolved_u_range(self) -> tuple[float, float]:
        if self.u_range is not None:
            return self.u_range
        s = self.s_range if self.s_range is not None else (-2 * math.pi, 2 * math.pi)
        root = math.sqrt(constants(self.params).a_tilde)
        return (s[0] / root, s[1] / root)

    def grid(self) -> Grid:
        return Grid(self.resolved_u_range(), self.v_range, *self.resolution, self.random_points, self.seed)

    def spec(self) -> HelixSpec:
        kw = {"label": self.label}
        if self.branch is not None:
            kw["branch"] = self.branch
            kw["strict"] = self.branch == commuting_branch()
        if self.family == "example1":
            spec = example1_spec(self.params, named_curve(self.xi2), **kw)
        else:
            spec = example2_spec(self.params, **kw)
        if self.perturb is not None:
            spec = perturbed_spec(spec, *self.perturb)
        return spec


def preset_config(name: str, lam: Optional[int] = None, **overrides) -> RunConfig:
    """RunConfig for a figure preset; ``lam`` picks the other causal variant."""
    try:
        p = PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    if lam is not None and lam != p.lam and not p.both_lambdas:
        raise UsageError(f"preset {name} is defined only for lambda={p.lam:+d}")
    lam = p.lam if lam is None else lam
    base = dict(
        params=BergerParams(p.epsilon, lam, p.nu),
        family=p.family,
        xi2=p.xi2,
        s_range=p.s_range,
        v_range=p.v_range,
        label=name if lam == p.lam else f"{name}{'-timelike' if lam == 1 else '-spacelike'}",
    )
    base.update(overrides)
    if base.get("u_range") is not None:
        base["s_range"] = None
    return RunConfig(**base)
