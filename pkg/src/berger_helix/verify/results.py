"""Residual records and their aggregation over parameter grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    """Largest residual of one check and where it occurred.

    ``skipped`` counts points excluded from the check (degenerate normals,
    poles of mu); a check with nothing evaluated fails.
    """

    name: str
    residual: float
    tolerance: float
    worst: Optional[tuple[float, float]] = None
    evaluated: int = 1
    skipped: int = 0

    @property
    def passed(self) -> bool:
        # NaN compares false, so an undefined residual never passes
        return self.evaluated > 0 and bool(self.residual <= self.tolerance)


@dataclass
class ResidualReport:
    """Ordered collection of check results plus free-form metadata."""

    checks: dict[str, CheckResult] = field(default_factory=dict)
    meta: dict[str, str] = field(default_factory=dict)

    def add(self, result: CheckResult) -> CheckResult:
        if result.name in self.checks:
            raise KeyError(f"duplicate check {result.name!r}")
        self.checks[result.name] = result
        return result

    def record(self, name: str, residual: float, tolerance: float, **kw) -> CheckResult:
        return self.add(CheckResult(name, float(residual), float(tolerance), **kw))

    def record_grid(self, name: str, values, tolerance: float, u, v) -> CheckResult:
        """Reduce per-point residuals (NaN = skipped) to their maximum."""
        values = np.asarray(values, dtype=float)
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        values = np.broadcast_to(values, u.shape)
        valid = ~np.isnan(values)
        n = int(valid.sum())
        skipped = int(values.size - n)
        if n == 0:
            return self.add(CheckResult(name, math.nan, float(tolerance), None, 0, skipped))
        # inf counts as a failure at its location
        masked = np.where(valid, values, -np.inf)
        k = int(np.argmax(masked))
        worst = (float(u.flat[k]), float(v.flat[k]))
        return self.add(CheckResult(name, float(masked.flat[k]), float(tolerance), worst, n, skipped))

    def merge(self, other: "ResidualReport", prefix: str = "") -> None:
        for r in other:
            self.add(CheckResult(prefix + r.name, r.residual, r.tolerance, r.worst, r.evaluated, r.skipped))
        for k, val in other.meta.items():
            self.meta.setdefault(prefix + k, val)

    def __iter__(self) -> Iterator[CheckResult]:
        return iter(self.checks.values())

    def __len__(self) -> int:
        return len(self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        return self.checks[name]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self)

    def failures(self) -> list[CheckResult]:
        return [r for r in self if not r.passed]

    def to_text(self) -> str:
        """Line-oriented text form; identical reports give identical text."""
        lines = ["# helix surface verification report"]
        lines += [f"meta,{k},{_clean(val)}" for k, val in self.meta.items()]
        lines.append("# check,name,max_residual,tolerance,pass,worst_u,worst_v,evaluated,skipped")
        for r in self:
            wu, wv = ("nan", "nan") if r.worst is None else (_num(r.worst[0]), _num(r.worst[1]))
            lines.append(
                f"check,{r.name},{_num(r.residual)},{_num(r.tolerance)},"
                f"{'pass' if r.passed else 'fail'},{wu},{wv},{r.evaluated},{r.skipped}"
            )
        lines.append(f"summary,{'pass' if self.passed else 'fail'},{len(self) - len(self.failures())}/{len(self)}")
        return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    # fixed format; negative zero printed as zero for stable output
    x = float(x)
    if x == 0:
        x = 0.0
    return f"{x:.6e}"


def _clean(s) -> str:
    return str(s).replace(",", ";").replace("\n", " ")
