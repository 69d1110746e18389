"""Request/response handlers and the HTTP application."""

import math

import pytest
from fastapi.testclient import TestClient

from lienard_lab.api import create_app
from lienard_lab.serialize import canonical_json
from lienard_lab.service import (
    BoundRequest,
    CyclesRequest,
    PortraitRequest,
    SimulateRequest,
    SystemFields,
    VerifyRequest,
    handle_bound,
    handle_cycles,
    handle_portrait,
    handle_simulate,
    handle_verify,
    worker_count,
)

VDP_RAW = [0.0, -1.0, 0.0, 1.0]  # x^3 - x
QUARTIC_CYCLE_COEFFS = [-0.15, 0.0, 1.0]  # x^4 + x^3 - 0.15x


def test_system_fields_expand_a1_shorthand():
    F = SystemFields(n=4, a1=1.0).build_polynomial()
    assert F.coeffs_ascending == (0.0, 1.0, 0.0, 0.0, 1.0)


def test_system_fields_reject_ambiguity_and_raw_without_optin():
    with pytest.raises(ValueError, match="contradicts"):
        SystemFields(n=4, a1=1.0, coeffs=[0.5, 0.0, 0.0]).build_polynomial()
    with pytest.raises(ValueError, match="allow_raw"):
        SystemFields(raw_coeffs=VDP_RAW).build_polynomial()
    with pytest.raises(ValueError, match="n is required"):
        SystemFields(a1=1.0).build_polynomial()
    with pytest.raises(ValueError):
        SystemFields(n=2, a1=1.0, extra_field=3)


def test_system_fields_bounded_requirement():
    with pytest.raises(ValueError, match="bounded-coefficient"):
        SystemFields(raw_coeffs=VDP_RAW, allow_raw=True).build_bounded()


def test_worker_count_respects_env(monkeypatch):
    monkeypatch.delenv("LIENARD_LAB_THREADS", raising=False)
    assert worker_count(1) == 1
    monkeypatch.setenv("LIENARD_LAB_THREADS", "2")
    assert worker_count(8) == 2
    assert worker_count(1) == 1
    monkeypatch.setenv("LIENARD_LAB_THREADS", "zippy")
    with pytest.raises(ValueError):
        worker_count(4)


def test_handle_bound_spot_values():
    resp = handle_bound(BoundRequest(n=2, C=4.0, a1=1.0, R=1.0))
    assert resp.certified is True
    assert resp.sigma.log == pytest.approx(-28.598477131518074, abs=1e-10)
    assert resp.final_bound.loglog == pytest.approx(71.0486038676163, abs=1e-10)
    payload = resp.to_payload()
    assert "lambda" in payload and "lambda_" not in payload
    assert payload["schema_version"] == 1


def test_handle_bound_override_voids_certification():
    resp = handle_bound(BoundRequest(n=2, a1=1.0, sigma_override=1e-10))
    assert resp.certified is False
    assert resp.sigma.log == pytest.approx(math.log(1e-10))


def test_handle_cycles_certified_path():
    resp = handle_cycles(CyclesRequest(n=4, coeffs=QUARTIC_CYCLE_COEFFS, grid_points=64))
    assert resp.params is not None and resp.comparison is not None
    assert len(resp.scan.cycles) == 1
    assert resp.comparison.within is True
    assert resp.scan.cycles[0].stability == "attracting"


def test_handle_cycles_raw_path_defaults():
    resp = handle_cycles(
        CyclesRequest(raw_coeffs=VDP_RAW, allow_raw=True, grid_points=64)
    )
    assert resp.params is None and resp.comparison is None
    assert resp.scan.y_min == 0.1 and resp.scan.y_max == 10.0
    assert len(resp.scan.cycles) == 1
    assert resp.scan.cycles[0].y_star == pytest.approx(1.2544168353074312, rel=1e-8)


def test_handle_cycles_explicit_window_keeps_comparison():
    resp = handle_cycles(
        CyclesRequest(
            n=4, coeffs=QUARTIC_CYCLE_COEFFS, y_min=0.05, y_max=1.0, grid_points=32
        )
    )
    assert resp.params is not None and resp.comparison is not None
    assert resp.scan.y_min == 0.05


def test_handle_verify_single_and_suite():
    single = handle_verify(VerifyRequest(n=2, a1=1.0, samples=256, strip_orbits=2))
    assert len(single.reports) == 1
    assert single.all_pass

    suite = handle_verify(VerifyRequest(suite=2, seed=11, samples=256, strip_orbits=2))
    assert len(suite.reports) == 2
    again = handle_verify(VerifyRequest(suite=2, seed=11, samples=256, strip_orbits=2))
    assert canonical_json(suite.to_payload()) == canonical_json(again.to_payload())


def test_handle_simulate_linear_center():
    req = SimulateRequest(
        raw_coeffs=[0.0], allow_raw=True, y0=1.0, t_end=2 * math.pi, poincare=True
    )
    resp = handle_simulate(req)
    assert resp.t[0] == 0.0
    assert all(b > a for a, b in zip(resp.t, resp.t[1:]))
    assert resp.x_final == pytest.approx(0.0, abs=1e-8)
    assert resp.y_final == pytest.approx(1.0, abs=1e-8)
    assert resp.poincare["y_out"] == pytest.approx(1.0, abs=1e-8)


def test_handle_simulate_probe_requires_section_start():
    with pytest.raises(ValueError, match="return-map probe"):
        handle_simulate(
            SimulateRequest(n=2, a1=1.0, x0=0.5, y0=1.0, poincare=True)
        )


def test_handle_portrait_default_ring_and_custom_ics():
    resp = handle_portrait(PortraitRequest(n=2, a1=1.0, t_end=5.0))
    assert len(resp.orbits) == 8
    for orbit in resp.orbits:
        assert math.hypot(orbit.x0, orbit.y0) == pytest.approx(1.0, rel=1e-12)
        assert orbit.t[-1] == pytest.approx(5.0)

    two = handle_portrait(
        PortraitRequest(n=2, a1=1.0, ics=[(0.0, 1.0), (0.0, 2.0)], t_end=3.0)
    )
    assert len(two.orbits) == 2
    with pytest.raises(ValueError):
        handle_portrait(PortraitRequest(n=2, a1=1.0, ics=[]))


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_api_healthz(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_api_bound_roundtrip(client):
    resp = client.post("/bound", json={"n": 2, "a1": 1.0})
    assert resp.status_code == 200
    body = resp.json()
    assert body["final_bound"]["loglog"] == pytest.approx(71.0486038676163)
    assert body["lambda"]["log"] is not None
    assert body["certified"] is True


def test_api_bound_invalid_params_is_400(client):
    resp = client.post("/bound", json={"n": 3, "a1": 1.0})
    assert resp.status_code == 400
    resp = client.post("/bound", json={"n": 2, "a1": 0.0})
    assert resp.status_code == 400


def test_api_bound_out_of_float_range_is_422(client):
    resp = client.post("/bound", json={"n": 2, "a1": 1.999})
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert detail["error"] == "BoundRangeError"


def test_api_cycles_raw_requires_optin(client):
    resp = client.post("/cycles", json={"raw_coeffs": VDP_RAW})
    assert resp.status_code == 400
    assert "allow_raw" in resp.json()["detail"]


def test_api_simulate_returns_trajectory(client):
    resp = client.post(
        "/simulate",
        json={"raw_coeffs": [0.0], "allow_raw": True, "t_end": 1.0, "tol": 1e-8},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["t"][0] == 0.0 and body["t"][-1] == 1.0
    assert len(body["t"]) == len(body["x"]) == len(body["y"])


def test_api_verify_reports_all_pass(client):
    resp = client.post(
        "/verify", json={"n": 2, "a1": 1.0, "samples": 256, "strip_orbits": 2}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["reports"]) == 1
    assert body["reports"][0]["all_pass"] is True
    assert len(body["reports"][0]["checks"]) == 8


def test_api_verify_unknown_check_is_400(client):
    resp = client.post("/verify", json={"n": 2, "a1": 1.0, "checks": ["lemma_42"]})
    assert resp.status_code == 400


def test_api_portrait(client):
    resp = client.post(
        "/portrait",
        json={"n": 2, "a1": 1.0, "ics": [[0.0, 1.0]], "t_end": 2.0},
    )
    assert resp.status_code == 200
    assert len(resp.json()["orbits"]) == 1
