"""Numerical laboratory for limit cycles of planar Lienard systems x' = y - F(x), y' = -x.

Two halves, deliberately independent:

* the certified side (`bounds`) evaluates an explicit double-exponential
  upper bound for the number of limit cycles, together with every
  intermediate quantity of its proof chain, in log/log-log arithmetic;
* the empirical side (`dynamics`, `cycles`) integrates orbits, computes
  Poincare return maps, and enumerates actual limit cycles, while
  `verifier` samples each lemma-level inequality and reports margins.

`service`/`api` wrap everything in typed request handlers and an HTTP app;
`cli` is a thin client over the same handlers.
"""

from .bounds import (
    BoundRangeError,
    BoundReport,
    ConsistencyError,
    SystemParams,
    analytic_widths,
    compute_bound_report,
    cycle_count_bound,
    final_bound,
    index_bound,
    strip_widths,
    transit_time_bound,
    trap_radius,
    velocity_bound_values,
    velocity_bounds,
    velocity_bounds_log,
)
from .cycles import (
    AnnulusError,
    CountComparison,
    CycleRecord,
    CycleReport,
    CycleSet,
    ScanFailureError,
    count_vs_bound,
    displacement,
    enumerate_cycles,
    scan_cycles,
)
from .dynamics import (
    DynamicsError,
    EscapeError,
    EventSpec,
    IntegrationResult,
    NoReturnError,
    ReturnResult,
    StepFailureError,
    Trajectory,
    integrate,
    poincare_map,
    polar_derivatives,
    vector_field,
)
from .logspace import LogLogValue, LogValue
from .polynomial import (
    CMonicPolynomial,
    GrowthMargins,
    Polynomial,
    RawPolynomial,
    check_growth_properties,
    polynomial_from_dict,
    random_c_monic,
)
from .verifier import CHECK_IDS, CheckResult, VerificationReport, run_checks, run_suite

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # logspace
    "LogValue",
    "LogLogValue",
    # polynomial
    "CMonicPolynomial",
    "RawPolynomial",
    "Polynomial",
    "GrowthMargins",
    "check_growth_properties",
    "polynomial_from_dict",
    "random_c_monic",
    # bounds
    "SystemParams",
    "BoundReport",
    "BoundRangeError",
    "ConsistencyError",
    "trap_radius",
    "strip_widths",
    "velocity_bounds",
    "velocity_bounds_log",
    "velocity_bound_values",
    "transit_time_bound",
    "analytic_widths",
    "index_bound",
    "cycle_count_bound",
    "final_bound",
    "compute_bound_report",
    # dynamics
    "vector_field",
    "polar_derivatives",
    "integrate",
    "poincare_map",
    "EventSpec",
    "Trajectory",
    "IntegrationResult",
    "ReturnResult",
    "DynamicsError",
    "EscapeError",
    "NoReturnError",
    "StepFailureError",
    # cycles
    "displacement",
    "scan_cycles",
    "enumerate_cycles",
    "count_vs_bound",
    "CycleRecord",
    "CycleSet",
    "CycleReport",
    "CountComparison",
    "AnnulusError",
    "ScanFailureError",
    # verifier
    "run_checks",
    "run_suite",
    "CheckResult",
    "VerificationReport",
    "CHECK_IDS",
]
