"""HTTP face of the laboratory: one POST route per operation.

The routes are thin: they parse the request model, call the shared handler,
and map domain failures to structured HTTP errors (400 for invalid requests,
422 for computations that fail honestly, e.g. escaping orbits or parameter
ranges where even log-space representations overflow).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .bounds import BoundRangeError, ConsistencyError
from .cycles import AnnulusError, ScanFailureError
from .dynamics import DynamicsError
from .service import (
    BoundRequest,
    CyclesRequest,
    PortraitRequest,
    SimulateRequest,
    VerifyRequest,
    handle_bound,
    handle_cycles,
    handle_portrait,
    handle_simulate,
    handle_verify,
)

__all__ = ["create_app"]

_COMPUTATION_ERRORS = (
    DynamicsError,
    AnnulusError,
    ScanFailureError,
    BoundRangeError,
    ConsistencyError,
    OverflowError,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="lienard-lab",
        description="Certified limit-cycle bounds and numerical verification "
        "for planar Lienard systems of even degree.",
    )

    def guarded(handler, req):
        try:
            return handler(req)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except _COMPUTATION_ERRORS as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": type(exc).__name__, "message": str(exc)},
            ) from exc

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/bound")
    def bound(req: BoundRequest) -> dict:
        return guarded(handle_bound, req).to_payload()

    @app.post("/cycles")
    def cycles(req: CyclesRequest) -> dict:
        return guarded(handle_cycles, req).to_payload()

    @app.post("/verify")
    def verify(req: VerifyRequest) -> dict:
        return guarded(handle_verify, req).to_payload()

    @app.post("/simulate")
    def simulate(req: SimulateRequest) -> dict:
        return guarded(handle_simulate, req).to_payload()

    @app.post("/portrait")
    def portrait(req: PortraitRequest) -> dict:
        return guarded(handle_portrait, req).to_payload()

    return app
