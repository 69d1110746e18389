"""Limit-cycle enumeration from return-map displacement sign changes.

A limit cycle through (0, y*) is a zero of the displacement d(y) = P(y) - y
of the first-return map on the positive y-axis.  The scan evaluates d on a
log-spaced grid, brackets sign changes, bisects each to a relative width, and
classifies stability from fresh displacement signs on both sides.

Scans are run in whichever direction (forward or reversed flow) expands away
from the focus, so displacements near the inner endpoint have a stable sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bounds import SystemParams, final_bound, trap_radius
from .dynamics import DynamicsError, poincare_map
from .logspace import LogLogValue
from .polynomial import CMonicPolynomial, Polynomial

__all__ = [
    "AnnulusError",
    "ScanFailureError",
    "CycleRecord",
    "CycleSet",
    "CountComparison",
    "CycleReport",
    "displacement",
    "default_scan_direction",
    "scan_cycles",
    "count_vs_bound",
    "enumerate_cycles",
]

# |d(y)| below max(1e-12, 100*tol) * y counts as numerically zero: an isolated
# zero cannot be certified there, and three consecutive such points suggest an
# annulus of periodic orbits (e.g. a center).
_ANNULUS_RUN = 3


class AnnulusError(RuntimeError):
    """The displacement vanished over a whole range: cycles are not isolated."""

    def __init__(self, message: str, y_lo: float, y_hi: float):
        super().__init__(message)
        self.y_lo = y_lo
        self.y_hi = y_hi


class ScanFailureError(RuntimeError):
    """Every grid point failed to produce a return."""


@dataclass(frozen=True)
class CycleRecord:
    """One isolated limit cycle crossing the section at y_star."""

    y_star: float
    width: float  # absolute half-width of the final bisection bracket
    period: float
    stability: str  # "attracting" | "repelling" | "undetermined"

    def to_dict(self) -> dict[str, Any]:
        return {
            "y_star": self.y_star,
            "width": self.width,
            "period": self.period,
            "stability": self.stability,
        }


@dataclass(frozen=True)
class CycleSet:
    """Scan outcome: cycles found plus per-point diagnostics."""

    cycles: tuple[CycleRecord, ...]
    y_min: float
    y_max: float
    grid_points: int
    direction: str
    failures: tuple[dict[str, Any], ...] = ()

    @property
    def count(self) -> int:
        return len(self.cycles)

    @property
    def outermost(self) -> float:
        """Section height of the outermost cycle; 0.0 when none exist."""
        return max((c.y_star for c in self.cycles), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cycles": [c.to_dict() for c in self.cycles],
            "y_min": self.y_min,
            "y_max": self.y_max,
            "grid_points": self.grid_points,
            "direction": self.direction,
            "failures": list(self.failures),
        }


@dataclass(frozen=True)
class CountComparison:
    """Observed cycle count against the certified double-exponential bound."""

    count: int
    bound_loglog: float
    within: bool

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "bound_loglog": self.bound_loglog, "within": self.within}


@dataclass(frozen=True)
class CycleReport:
    params: SystemParams
    cycle_set: CycleSet
    comparison: CountComparison

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "params": self.params.to_dict(),
            "scan": self.cycle_set.to_dict(),
            "comparison": self.comparison.to_dict(),
        }


def displacement(
    F: Polynomial,
    y: float,
    *,
    direction: str = "forward",
    tol: float = 1e-10,
    escape_radius: float | None = None,
    max_time: float | None = None,
) -> tuple[float, float]:
    """(d, period): displacement P(y) - y of the chosen return map and its time."""
    rr = poincare_map(
        F,
        y,
        direction=direction,
        tol=tol,
        escape_radius=escape_radius,
        max_time=max_time,
    )
    return rr.displacement, rr.transit_time


def default_scan_direction(F: Polynomial) -> str:
    """Direction in which the return map expands away from the focus.

    The focus multiplier of the forward map is e^{-pi a1 / sqrt(1 - a1^2/4)}
    to first order, so a1 < 0 expands forward and a1 > 0 expands in reverse.
    """
    a1 = F.coeffs_ascending[1] if len(F.coeffs_ascending) > 1 else 0.0
    return "inverse" if a1 > 0 else "forward"


def _forward_sign(d: float, direction: str) -> float:
    """Sign of the forward-map displacement given a measurement in `direction`."""
    return -d if direction == "inverse" else d


def scan_cycles(
    F: Polynomial,
    y_min: float,
    y_max: float,
    *,
    grid_points: int = 512,
    tol: float = 1e-10,
    escape_radius: float | None = None,
    direction: str | None = None,
    refine_rel: float = 1e-10,
) -> CycleSet:
    """Enumerate isolated limit cycles crossing the section in [y_min, y_max].

    Returns escaping or non-returning grid points as structured failures and
    excludes them from bracketing; raises ScanFailureError only if every point
    fails, and AnnulusError if the displacement is numerically zero on a run
    of grid points (cycles not isolated at this tolerance).
    """
    if not (0 < y_min < y_max and math.isfinite(y_max)):
        raise ValueError(f"need 0 < y_min < y_max, got [{y_min}, {y_max}]")
    if grid_points < 16:
        raise ValueError(f"grid_points must be at least 16, got {grid_points}")
    if direction is None:
        direction = default_scan_direction(F)
    if escape_radius is None:
        escape_radius = 10.0 * max(1.0, y_max)

    grid = np.geomspace(y_min, y_max, grid_points)
    zero_thresh = max(1e-12, 100.0 * tol)

    disp: list[float | None] = []
    failures: list[dict[str, Any]] = []
    for y in grid:
        try:
            d, _ = displacement(
                F, float(y), direction=direction, tol=tol, escape_radius=escape_radius
            )
            disp.append(d)
        except DynamicsError as exc:
            disp.append(None)
            failures.append({"y": float(y), "error": type(exc).__name__, "detail": str(exc)})

    valid = [(float(g), d) for g, d in zip(grid, disp) if d is not None]
    if not valid:
        raise ScanFailureError(
            f"no grid point in [{y_min}, {y_max}] produced a return "
            f"({len(failures)} failures; first: {failures[0]['detail']})"
        )

    # annulus detection: a run of numerically-zero displacements
    run: list[float] = []
    for y, d in valid:
        if abs(d) < zero_thresh * y:
            run.append(y)
            if len(run) >= _ANNULUS_RUN:
                raise AnnulusError(
                    f"displacement is numerically zero on [{run[0]:.6g}, {run[-1]:.6g}]: "
                    "periodic orbits are not isolated at this tolerance",
                    run[0],
                    run[-1],
                )
        else:
            run = []

    cycles: list[CycleRecord] = []
    for i in range(len(disp) - 1):
        d0, d1 = disp[i], disp[i + 1]
        if d0 is None or d1 is None:
            continue
        if d0 == 0.0 or d0 * d1 >= 0.0:
            continue
        lo, hi = float(grid[i]), float(grid[i + 1])
        d_lo = d0
        period = 0.0
        while hi - lo > refine_rel * hi:
            mid = 0.5 * (lo + hi)
            d_mid, period = displacement(
                F, mid, direction=direction, tol=tol, escape_radius=escape_radius
            )
            if d_mid == 0.0:
                lo = hi = mid
                break
            if (d_mid > 0) == (d_lo > 0):
                lo, d_lo = mid, d_mid
            else:
                hi = mid
        y_star = 0.5 * (lo + hi)
        width = 0.5 * (hi - lo)
        if period == 0.0:
            _, period = displacement(
                F, y_star, direction=direction, tol=tol, escape_radius=escape_radius
            )
        cycles.append(
            CycleRecord(
                y_star=y_star,
                width=width,
                period=period,
                stability=_classify_stability(
                    F, y_star, width, direction, tol, escape_radius, zero_thresh
                ),
            )
        )

    return CycleSet(
        cycles=tuple(cycles),
        y_min=y_min,
        y_max=y_max,
        grid_points=grid_points,
        direction=direction,
        failures=tuple(failures),
    )


def _classify_stability(
    F: Polynomial,
    y_star: float,
    width: float,
    direction: str,
    tol: float,
    escape_radius: float,
    zero_thresh: float,
) -> str:
    """Attracting iff the forward displacement points toward the cycle on both sides."""
    s = max(1e-6, 100.0 * width / y_star)
    try:
        d_in, _ = displacement(
            F, y_star * (1.0 - s), direction=direction, tol=tol, escape_radius=escape_radius
        )
        d_out, _ = displacement(
            F, y_star * (1.0 + s), direction=direction, tol=tol, escape_radius=escape_radius
        )
    except DynamicsError:
        return "undetermined"
    if abs(d_in) < zero_thresh * y_star or abs(d_out) < zero_thresh * y_star:
        return "undetermined"
    f_in = _forward_sign(d_in, direction)
    f_out = _forward_sign(d_out, direction)
    if f_in > 0 > f_out:
        return "attracting"
    if f_in < 0 < f_out:
        return "repelling"
    return "undetermined"


def count_vs_bound(cycle_set: CycleSet, bound: LogLogValue) -> CountComparison:
    """Compare the observed count with the certified bound.

    Counts of 2 or fewer are within any bound of double-exponential shape
    (such bounds always exceed e^e > 15); larger counts are compared in
    log-log space.
    """
    k = cycle_set.count
    if k <= 2:
        within = True
    else:
        within = LogLogValue.from_value(float(k)) <= bound
    return CountComparison(count=k, bound_loglog=bound.loglog_magnitude, within=within)


def enumerate_cycles(
    F: CMonicPolynomial,
    R: float,
    *,
    grid_points: int = 512,
    tol: float = 1e-10,
) -> CycleReport:
    """Scan [sigma, R] for cycles of a focus-type system and compare with the bound.

    The inner endpoint is the certified trap radius (clamped to the smallest
    representable scale ~1e-280 when it underflows); inside it no cycle can
    cross the section.
    """
    if not isinstance(F, CMonicPolynomial):
        raise TypeError("enumerate_cycles requires the bounded-coefficient form")
    if F.a1 == 0.0:
        raise ValueError("focus condition requires a1 != 0")
    params = SystemParams(n=F.n, C=F.C, a1=F.a1, R=float(R))
    sigma = trap_radius(params)
    y_min = max(sigma.to_float(), 1e-280)
    cycle_set = scan_cycles(
        F,
        y_min,
        params.R,
        grid_points=grid_points,
        tol=tol,
        escape_radius=10.0 * max(params.R, 1.0),
    )
    comparison = count_vs_bound(cycle_set, final_bound(params))
    return CycleReport(params=params, cycle_set=cycle_set, comparison=comparison)
