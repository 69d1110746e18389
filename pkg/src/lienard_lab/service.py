"""Typed request/response layer shared by the HTTP service and the CLI.

Every operation is a plain function from a pydantic request model to a
pydantic response model; the FastAPI routes and the command-line front end
both call these handlers, so the two interfaces cannot drift apart.

Validation failures raise ValueError or pydantic.ValidationError; genuine
computation failures (escapes, no returns, range overflows) raise the
domain exceptions from dynamics/cycles/bounds untouched.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from .bounds import SystemParams, compute_bound_report
from .cycles import count_vs_bound, enumerate_cycles, scan_cycles
from .bounds import final_bound as _final_bound
from .dynamics import integrate, poincare_map
from .polynomial import CMonicPolynomial, Polynomial, RawPolynomial
from .verifier import run_checks, run_suite

__all__ = [
    "LogField",
    "LogLogField",
    "ParamsModel",
    "BoundRequest",
    "BoundResponse",
    "CyclesRequest",
    "CyclesResponse",
    "VerifyRequest",
    "VerifyResponse",
    "SimulateRequest",
    "SimulateResponse",
    "PortraitRequest",
    "PortraitResponse",
    "handle_bound",
    "handle_cycles",
    "handle_verify",
    "handle_simulate",
    "handle_portrait",
    "worker_count",
]


def worker_count(tasks: int) -> int:
    """Thread-pool width for independent orbit work; LIENARD_LAB_THREADS caps it."""
    limit = os.cpu_count() or 1
    env = os.environ.get("LIENARD_LAB_THREADS")
    if env is not None:
        try:
            limit = max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"LIENARD_LAB_THREADS must be an integer, got {env!r}") from exc
    return max(1, min(tasks, limit))


# --------------------------------------------------------------- system input


class SystemFields(BaseModel):
    """Polynomial input fields shared by all endpoints.

    Either the bounded-coefficient form (n, C, and a1 or the full coeffs
    vector a1..a_{n-1}) or an arbitrary polynomial via raw_coeffs
    (a0, a1, ...) — the latter only with allow_raw, since nothing is
    certified about it.
    """

    model_config = ConfigDict(extra="forbid")

    n: int | None = None
    C: float = 4.0
    a1: float | None = None
    coeffs: list[float] | None = None
    raw_coeffs: list[float] | None = None
    allow_raw: bool = False

    def build_polynomial(self) -> Polynomial:
        if self.raw_coeffs is not None:
            if not self.allow_raw:
                raise ValueError(
                    "raw coefficients bypass every certified bound; "
                    "pass allow_raw (CLI: --allow-raw) to proceed"
                )
            return RawPolynomial(tuple(float(c) for c in self.raw_coeffs))
        if self.n is None:
            raise ValueError("n is required unless raw_coeffs is given")
        if self.coeffs is not None:
            if self.a1 is not None and self.coeffs and self.a1 != self.coeffs[0]:
                raise ValueError(
                    f"a1 = {self.a1} contradicts coeffs[0] = {self.coeffs[0]}"
                )
            return CMonicPolynomial(self.n, self.C, tuple(float(c) for c in self.coeffs))
        if self.a1 is None:
            raise ValueError("either a1 or coeffs is required")
        coeffs = (float(self.a1),) + (0.0,) * (self.n - 2)
        return CMonicPolynomial(self.n, self.C, coeffs)

    def build_bounded(self) -> CMonicPolynomial:
        F = self.build_polynomial()
        if not isinstance(F, CMonicPolynomial):
            raise ValueError("this operation requires the bounded-coefficient form")
        return F


# ------------------------------------------------------------------ sub-models


class LogField(BaseModel):
    log: float | None = None
    zero: bool = False


class LogLogField(BaseModel):
    loglog: float


class ParamsModel(BaseModel):
    n: int
    C: float
    a1: float
    R: float


class CycleModel(BaseModel):
    y_star: float
    width: float
    period: float
    stability: str


class ScanModel(BaseModel):
    cycles: list[CycleModel]
    y_min: float
    y_max: float
    grid_points: int
    direction: str
    failures: list[dict[str, Any]]


class ComparisonModel(BaseModel):
    count: int
    bound_loglog: float
    within: bool


class CheckModel(BaseModel):
    lemma_id: str
    status: Literal["pass", "fail", "skipped", "inconclusive"]
    margin: float | None
    points_checked: int
    detail: str


class PolyModel(BaseModel):
    n: int
    C: float
    coeffs: list[float]


class VerifyReportModel(BaseModel):
    schema_version: int
    polynomial: PolyModel
    R: float
    seed: int
    all_pass: bool
    checks: list[CheckModel]


class OrbitModel(BaseModel):
    x0: float
    y0: float
    t: list[float]
    x: list[float]
    y: list[float]


# ---------------------------------------------------------------------- bound


class BoundRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    C: float = 4.0
    a1: float
    R: float = 1.0
    sigma_override: float | None = None


class BoundResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int
    params: ParamsModel
    certified: bool
    sigma_override: float | None
    sigma: LogField
    omega: LogField
    alpha: LogField
    mu: float
    L_lip: float
    t_max_bound: LogField
    delta: LogField
    lambda_: LogField = Field(alias="lambda")
    epsilon: LogField
    bernstein: LogField
    final_bound: LogLogField

    def to_payload(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True)


def handle_bound(req: BoundRequest) -> BoundResponse:
    params = SystemParams(n=req.n, C=req.C, a1=req.a1, R=req.R)
    report = compute_bound_report(params, sigma_override=req.sigma_override)
    return BoundResponse.model_validate(report.to_dict())


# --------------------------------------------------------------------- cycles


class CyclesRequest(SystemFields):
    R: float = 1.0
    grid_points: int = 512
    tol: float = 1e-10
    y_min: float | None = None
    y_max: float | None = None


class CyclesResponse(BaseModel):
    schema_version: int
    params: ParamsModel | None
    scan: ScanModel
    comparison: ComparisonModel | None

    def to_payload(self) -> dict[str, Any]:
        return self.model_dump()


def handle_cycles(req: CyclesRequest) -> CyclesResponse:
    F = req.build_polynomial()
    if isinstance(F, CMonicPolynomial) and req.y_min is None and req.y_max is None:
        report = enumerate_cycles(F, req.R, grid_points=req.grid_points, tol=req.tol)
        return CyclesResponse.model_validate(report.to_dict())
    if isinstance(F, CMonicPolynomial):
        params = SystemParams(n=F.n, C=F.C, a1=F.a1, R=req.R)
        y_min = req.y_min if req.y_min is not None else 1e-6
        y_max = req.y_max if req.y_max is not None else req.R
        cs = scan_cycles(F, y_min, y_max, grid_points=req.grid_points, tol=req.tol)
        comparison = count_vs_bound(cs, _final_bound(params))
        return CyclesResponse(
            schema_version=1,
            params=ParamsModel.model_validate(params.to_dict()),
            scan=ScanModel.model_validate(cs.to_dict()),
            comparison=ComparisonModel.model_validate(comparison.to_dict()),
        )
    # raw polynomial: free-range scan, nothing certified to compare against
    y_min = req.y_min if req.y_min is not None else 0.1
    y_max = req.y_max if req.y_max is not None else 10.0
    cs = scan_cycles(F, y_min, y_max, grid_points=req.grid_points, tol=req.tol)
    return CyclesResponse(
        schema_version=1,
        params=None,
        scan=ScanModel.model_validate(cs.to_dict()),
        comparison=None,
    )


# --------------------------------------------------------------------- verify


class VerifyRequest(SystemFields):
    R: float = 1.0
    seed: int = 42
    suite: int | None = None
    checks: list[str] | None = None
    samples: int = 2048
    strip_orbits: int = 8


class VerifyResponse(BaseModel):
    reports: list[VerifyReportModel]

    @property
    def all_pass(self) -> bool:
        return all(r.all_pass for r in self.reports)

    def to_payload(self) -> dict[str, Any]:
        return self.model_dump()


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    checks = tuple(req.checks) if req.checks is not None else None
    if req.suite is not None:
        reports = run_suite(
            req.suite,
            seed=req.seed,
            C=req.C,
            R=req.R,
            samples=req.samples,
            strip_orbits=req.strip_orbits,
            checks=checks,
        )
    else:
        F = req.build_bounded()
        reports = [
            run_checks(
                F,
                req.R,
                seed=req.seed,
                samples=req.samples,
                strip_orbits=req.strip_orbits,
                checks=checks,
            )
        ]
    return VerifyResponse(
        reports=[VerifyReportModel.model_validate(r.to_dict()) for r in reports]
    )


# ------------------------------------------------------------------- simulate


class SimulateRequest(SystemFields):
    x0: float = 0.0
    y0: float = 1.0
    t_end: float = 30.0
    tol: float = 1e-10
    poincare: bool = False


class SimulateResponse(BaseModel):
    steps: int
    rejected: int
    t_final: float
    x_final: float
    y_final: float
    t: list[float]
    x: list[float]
    y: list[float]
    poincare: dict[str, Any] | None = None

    def to_payload(self) -> dict[str, Any]:
        return self.model_dump()


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    F = req.build_polynomial()
    if not (math.isfinite(req.t_end) and req.t_end > 0):
        raise ValueError(f"t_end must be positive and finite, got {req.t_end}")
    res = integrate(F, (req.x0, req.y0), req.t_end, tol=req.tol, record=True)
    probe = None
    if req.poincare:
        if req.x0 != 0.0 or req.y0 <= 0.0:
            raise ValueError("the return-map probe requires starting at (0, y0) with y0 > 0")
        rr = poincare_map(F, req.y0, tol=req.tol)
        probe = {
            "y_in": rr.y_in,
            "y_out": rr.y_out,
            "displacement": rr.displacement,
            "transit_time": rr.transit_time,
            "direction": rr.direction,
        }
    traj = res.trajectory
    return SimulateResponse(
        steps=res.steps,
        rejected=res.rejected,
        t_final=res.t,
        x_final=res.x,
        y_final=res.y,
        t=[float(v) for v in traj.ts],
        x=[float(v) for v in traj.xs],
        y=[float(v) for v in traj.ys],
        poincare=probe,
    )


# ------------------------------------------------------------------- portrait


class PortraitRequest(SystemFields):
    ics: list[tuple[float, float]] | None = None
    t_end: float = 30.0
    tol: float = 1e-8


class PortraitResponse(BaseModel):
    orbits: list[OrbitModel]

    def to_payload(self) -> dict[str, Any]:
        return self.model_dump()


def _default_ring(count: int = 8, radius: float = 1.0) -> list[tuple[float, float]]:
    return [
        (radius * math.cos(2 * math.pi * k / count), radius * math.sin(2 * math.pi * k / count))
        for k in range(count)
    ]


def handle_portrait(req: PortraitRequest) -> PortraitResponse:
    F = req.build_polynomial()
    ics = req.ics if req.ics is not None else _default_ring()
    if not ics:
        raise ValueError("at least one initial condition is required")

    def run(ic: tuple[float, float]) -> OrbitModel:
        res = integrate(F, ic, req.t_end, tol=req.tol, record=True)
        traj = res.trajectory
        return OrbitModel(
            x0=float(ic[0]),
            y0=float(ic[1]),
            t=[float(v) for v in traj.ts],
            x=[float(v) for v in traj.xs],
            y=[float(v) for v in traj.ys],
        )

    with ThreadPoolExecutor(max_workers=worker_count(len(ics))) as pool:
        orbits = list(pool.map(run, ics))
    return PortraitResponse(orbits=orbits)
