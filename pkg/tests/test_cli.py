"""Command-line interface: exit codes, output formats, and file outputs."""

import json

import pytest

from lienard_lab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bound_table_lists_the_chain(capsys):
    code, out, _ = run_cli(capsys, "bound", "--n", "2", "--a1", "1.0")
    assert code == 0
    for name in ("sigma", "omega", "alpha", "t_max_bound", "final_bound"):
        assert name in out
    assert "trap_radius" in out  # lemma ids annotate each row
    assert "UNCERTIFIED" not in out


def test_bound_json_is_byte_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "bound", "--n", "2", "--a1", "1.0", "--format", "json")
    code2, out2, _ = run_cli(capsys, "bound", "--n", "2", "--a1", "1.0", "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["lambda"]["log"] is not None
    assert payload["final_bound"]["loglog"] == pytest.approx(71.0486038676163)


def test_bound_csv_uses_dotted_paths(capsys):
    code, out, _ = run_cli(capsys, "bound", "--n", "2", "--a1", "1.0", "--format", "csv")
    assert code == 0
    assert "final_bound.loglog" in out
    assert "params.n" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("bound", "--n", "3", "--a1", "1.0"),  # odd degree
        ("bound", "--n", "2", "--a1", "0.0"),  # not a focus
        ("bound", "--n", "2", "--a1", "2.5"),  # |a1| >= 2
        ("bound", "--n", "2", "--a1", "1.0", "--C", "1.0"),  # C below 4
    ],
)
def test_bound_invalid_inputs_exit_1(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert "invalid input" in err


def test_bound_overflow_exits_2(capsys):
    code, _, err = run_cli(capsys, "bound", "--n", "2", "--a1", "1.999")
    assert code == 2
    assert "BoundRangeError" in err


def test_bound_sigma_override_marks_uncertified(capsys):
    code, out, _ = run_cli(
        capsys, "bound", "--n", "2", "--a1", "1.0", "--sigma-override", "1e-10"
    )
    assert code == 0
    assert "UNCERTIFIED" in out


def test_unknown_subcommand_exits_1():
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 1


def test_malformed_coeff_list_exits_1():
    with pytest.raises(SystemExit) as exc_info:
        main(["bound", "--n", "2", "--coeffs", "one,two"])
    assert exc_info.value.code == 1


def _simulate_rows(out):
    lines = [l for l in out.strip().splitlines() if l and not l.startswith("#")]
    assert lines[0] == "t,x,y"
    return [tuple(float(v) for v in l.split(",")) for l in lines[1:]]


def test_simulate_emits_monotone_csv(capsys):
    code, out, _ = run_cli(
        capsys,
        *"simulate --raw-coeffs 0.0 --allow-raw --t-end 1.0 --tol 1e-8".split(),
    )
    assert code == 0
    rows = _simulate_rows(out)
    ts = [r[0] for r in rows]
    assert ts[0] == 0.0 and ts[-1] == 1.0
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_simulate_thinning_keeps_endpoints(capsys):
    base = "simulate --raw-coeffs 0.0 --allow-raw --t-end 1.0 --tol 1e-8".split()
    _, full_out, _ = run_cli(capsys, *base)
    code, thin_out, _ = run_cli(capsys, *base, "--every", "5")
    assert code == 0
    full, thin = _simulate_rows(full_out), _simulate_rows(thin_out)
    assert len(thin) <= len(full) // 5 + 2
    assert thin[0] == full[0] and thin[-1] == full[-1]


def test_simulate_rejects_nonpositive_thinning(capsys):
    code, _, err = run_cli(
        capsys,
        *"simulate --raw-coeffs 0.0 --allow-raw --every 0".split(),
    )
    assert code == 1
    assert "--every" in err


def test_simulate_writes_file(capsys, tmp_path):
    target = tmp_path / "orbit.csv"
    code, out, _ = run_cli(
        capsys,
        *f"simulate --n 2 --a1 1.0 --t-end 1.0 --tol 1e-8 --out {target}".split(),
    )
    assert code == 0
    assert f"wrote {target}" in out
    assert target.read_text().startswith("t,x,y\n")


def test_simulate_poincare_probe_comment(capsys):
    code, out, err = run_cli(
        capsys,
        *"simulate --raw-coeffs 0.0 --allow-raw --t-end 1.0 --poincare".split(),
    )
    assert code == 0
    assert "t,x,y" in out  # the CSV itself stays clean on stdout
    probe = [l for l in err.splitlines() if l.startswith("# return map:")]
    assert len(probe) == 1
    assert "y_out=" in probe[0]


def test_cycles_requires_raw_optin(capsys):
    code, _, err = run_cli(
        capsys, "cycles", "--raw-coeffs", "0,-1,0,1", "--grid-points", "64"
    )
    assert code == 1
    assert "allow-raw" in err or "allow_raw" in err


def test_cycles_raw_scan_finds_cubic_cycle(capsys):
    code, out, _ = run_cli(
        capsys,
        *"cycles --raw-coeffs 0,-1,0,1 --allow-raw --grid-points 64 --y-min 0.5 --y-max 4.0 --format json".split(),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["params"] is None and payload["comparison"] is None
    cycles = payload["scan"]["cycles"]
    assert len(cycles) == 1
    assert cycles[0]["y_star"] == pytest.approx(1.2544168353074312, rel=1e-8)


def test_cycles_table_shows_verdict(capsys):
    code, out, _ = run_cli(
        capsys,
        *"cycles --n 4 --coeffs=-0.15,0.0,1.0 --grid-points 64".split(),
    )
    assert code == 0
    assert "1 cycle(s)" in out
    assert "[attracting]" in out
    assert "within the certified bound" in out


def test_verify_json_runs_are_byte_identical(capsys):
    argv = "verify --suite 2 --seed 11 --samples 256 --strip-orbits 2 --format json".split()
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert len(payload["reports"]) == 2


def test_verify_table_summarizes(capsys):
    code, out, _ = run_cli(
        capsys, *"verify --n 2 --a1 1.0 --samples 256 --strip-orbits 2".split()
    )
    assert code == 0
    assert "report 1/1: PASS" in out
    assert "summary: 1/1 reports pass" in out


def test_verify_honest_failure_exits_3(capsys):
    # deliberately huge middle coefficients exceed the certified speed
    # envelope, so the corresponding check must report a failure
    code, out, _ = run_cli(
        capsys,
        *"verify --n 4 --C 40 --coeffs 1.0,39.0,39.0 --checks velocity_bound".split(),
    )
    assert code == 3
    assert "FAIL" in out


def test_verify_unknown_check_exits_1(capsys):
    code, _, err = run_cli(capsys, *"verify --n 2 --a1 1.0 --checks lemma_42".split())
    assert code == 1
    assert "unknown checks" in err


def test_portrait_writes_orbit_files(capsys, tmp_path):
    out_dir = tmp_path / "orbits"
    code, out, _ = run_cli(
        capsys,
        *f"portrait --n 2 --a1 1.0 --t-end 2.0 --out-dir {out_dir}".split(),
    )
    assert code == 0
    files = sorted(out_dir.glob("orbit_*.csv"))
    assert len(files) == 8  # default ring of initial conditions
    for f in files:
        text = f.read_text()
        assert text.startswith("t,x,y\n")
        assert len(text.splitlines()) > 2
    assert "wrote" in out


def test_portrait_custom_ics(capsys, tmp_path):
    out_dir = tmp_path / "two"
    code, _, _ = run_cli(
        capsys,
        *f"portrait --n 2 --a1 1.0 --ics 0,1;0,2 --t-end 1.0 --out-dir {out_dir}".split(),
    )
    assert code == 0
    assert len(list(out_dir.glob("orbit_*.csv"))) == 2


def test_server_mode_round_trips_through_http(capsys, monkeypatch):
    # Route the CLI's HTTP client into the ASGI app in-process: the payload
    # must match the in-process result byte for byte.
    import httpx
    from fastapi.testclient import TestClient

    from lienard_lab.api import create_app

    client = TestClient(create_app())

    def fake_post(url, json=None, timeout=None):
        assert url.startswith("http://fake")
        return client.post(url[len("http://fake") :], json=json)

    monkeypatch.setattr(httpx, "post", fake_post)

    code, local, _ = run_cli(capsys, *"bound --n 2 --a1 1.0 --format json".split())
    assert code == 0
    code, remote, _ = run_cli(
        capsys,
        *"bound --n 2 --a1 1.0 --format json --server http://fake".split(),
    )
    assert code == 0
    assert remote == local

    # server-side validation errors map onto the invalid-input exit code
    code, _, err = run_cli(
        capsys, *"bound --n 3 --a1 1.0 --server http://fake".split()
    )
    assert code == 1
    assert "server rejected" in err
