"""Command-line client for the laboratory.

Subcommands: bound, simulate, cycles, verify, portrait.  By default the
computation runs in-process; with --server URL the same request is POSTed to
a running HTTP service and the response rendered identically.

Exit codes: 0 success, 1 invalid input, 2 computation failure,
3 verification failure (at least one lemma check failed).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .bounds import LEMMA_IDS, BoundRangeError, ConsistencyError
from .cycles import AnnulusError, ScanFailureError
from .dynamics import DynamicsError
from .logspace import LogLogValue, LogValue
from .serialize import canonical_json, flatten, rows_csv, trajectory_csv
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

_EXIT_OK = 0
_EXIT_INVALID = 1
_EXIT_COMPUTATION = 2
_EXIT_VERIFICATION = 3

_COMPUTATION_ERRORS = (
    DynamicsError,
    AnnulusError,
    ScanFailureError,
    BoundRangeError,
    ConsistencyError,
    OverflowError,
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage with the validation exit code."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(_EXIT_INVALID)


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


def _ic_list(text: str) -> list[tuple[float, float]]:
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        nums = _float_list(part)
        if len(nums) != 2:
            raise argparse.ArgumentTypeError(f"initial condition needs x,y: {part!r}")
        out.append((nums[0], nums[1]))
    return out


def _add_system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="degree (even, >= 2)")
    p.add_argument("--C", type=float, default=4.0, help="coefficient bound (>= 4)")
    p.add_argument("--a1", type=float, default=None, help="linear coefficient (0 < |a1| < 2)")
    p.add_argument(
        "--coeffs",
        type=_float_list,
        default=None,
        metavar="a1,...,a_{n-1}",
        help="full coefficient vector below the monic top term",
    )
    p.add_argument(
        "--raw-coeffs",
        type=_float_list,
        default=None,
        metavar="a0,a1,...",
        help="arbitrary polynomial, ascending; requires --allow-raw",
    )
    p.add_argument(
        "--allow-raw",
        action="store_true",
        help="accept raw coefficients although nothing certified applies to them",
    )


def _system_kwargs(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "n": args.n,
        "C": args.C,
        "a1": args.a1,
        "coeffs": args.coeffs,
        "raw_coeffs": args.raw_coeffs,
        "allow_raw": args.allow_raw,
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="lienard-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="evaluate the full certified bound chain")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--C", type=float, default=4.0)
    b.add_argument("--a1", type=float, required=True)
    b.add_argument("--R", type=float, default=1.0)
    b.add_argument(
        "--sigma-override",
        type=float,
        default=None,
        help="replace the trap radius (marks every output UNCERTIFIED)",
    )
    b.add_argument("--format", choices=("json", "table", "csv"), default="table")
    b.add_argument("--server", default=None, metavar="URL")

    s = sub.add_parser("simulate", help="integrate one orbit and emit t,x,y CSV")
    _add_system_args(s)
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--y0", type=float, default=1.0)
    s.add_argument("--t-end", type=float, default=30.0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--poincare", action="store_true", help="probe the return map from (0, y0)")
    s.add_argument(
        "--every",
        type=int,
        default=1,
        metavar="N",
        help="thin the CSV to every Nth sample (the final state is always kept)",
    )
    s.add_argument("--out", default=None, metavar="FILE", help="write CSV here instead of stdout")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--server", default=None, metavar="URL")

    c = sub.add_parser("cycles", help="enumerate limit cycles from the return map")
    _add_system_args(c)
    c.add_argument("--R", type=float, default=1.0)
    c.add_argument("--grid-points", type=int, default=512)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--y-min", type=float, default=None)
    c.add_argument("--y-max", type=float, default=None)
    c.add_argument("--format", choices=("json", "table", "csv"), default="table")
    c.add_argument("--server", default=None, metavar="URL")

    v = sub.add_parser("verify", help="run the lemma-level numerical checks")
    _add_system_args(v)
    v.add_argument("--R", type=float, default=1.0)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--suite", type=int, default=None, metavar="N", help="verify N random systems")
    v.add_argument("--checks", default=None, help="comma-separated subset of check names")
    v.add_argument("--samples", type=int, default=2048)
    v.add_argument("--strip-orbits", type=int, default=8)
    v.add_argument("--format", choices=("json", "table", "csv"), default="table")
    v.add_argument("--server", default=None, metavar="URL")

    o = sub.add_parser("portrait", help="integrate a family of orbits to CSV files")
    _add_system_args(o)
    o.add_argument(
        "--ics",
        type=_ic_list,
        default=None,
        metavar="x1,y1;x2,y2;...",
        help="initial conditions (default: 8 points on the unit circle)",
    )
    o.add_argument("--t-end", type=float, default=30.0)
    o.add_argument("--tol", type=float, default=1e-8)
    o.add_argument("--out-dir", default="portrait_out")
    o.add_argument("--server", default=None, metavar="URL")

    return parser


# ------------------------------------------------------------------ transport


def _post(server: str, route: str, payload: dict[str, Any]) -> dict[str, Any]:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}{route}", json=payload, timeout=600.0)
    if resp.status_code == 400:
        raise ValueError(f"server rejected request: {resp.json().get('detail')}")
    if resp.status_code == 422:
        detail = resp.json().get("detail")
        raise ScanFailureError(f"server computation failed: {detail}")
    resp.raise_for_status()
    return resp.json()


def _run(server: str | None, route: str, request, handler) -> dict[str, Any]:
    if server:
        return _post(server, route, request.model_dump())
    return handler(request).to_payload()


# ------------------------------------------------------------------ rendering


def _human_log(d: dict[str, Any]) -> str:
    return LogValue.from_dict(d).human()


def _render_bound_table(payload: dict[str, Any]) -> str:
    lines = []
    p = payload["params"]
    lines.append(f"system: n={p['n']} C={p['C']:g} a1={p['a1']:g} R={p['R']:g}")
    if not payload["certified"]:
        lines.append(
            f"UNCERTIFIED: trap radius overridden to {payload['sigma_override']:g}; "
            "no output below is a proved bound"
        )
    rows = [
        ("sigma", _human_log(payload["sigma"])),
        ("omega", _human_log(payload["omega"])),
        ("alpha", _human_log(payload["alpha"])),
        ("mu", f"{payload['mu']:.6g}"),
        ("L_lip", f"{payload['L_lip']:.6g}"),
        ("t_max_bound", _human_log(payload["t_max_bound"])),
        ("epsilon", _human_log(payload["epsilon"])),
        ("delta", _human_log(payload["delta"])),
        ("lambda", _human_log(payload["lambda"])),
        ("bernstein", _human_log(payload["bernstein"])),
        ("final_bound", LogLogValue.from_dict(payload["final_bound"]).human()),
    ]
    width = max(len(r[0]) for r in rows)
    lemma_w = max(len(v) for v in LEMMA_IDS.values())
    for name, value in rows:
        lines.append(f"{name:<{width}}  {LEMMA_IDS[name]:<{lemma_w}}  {value}")
    return "\n".join(lines)


def _render_cycles_table(payload: dict[str, Any]) -> str:
    lines = []
    scan = payload["scan"]
    lines.append(
        f"scanned [{scan['y_min']:.6g}, {scan['y_max']:.6g}] with {scan['grid_points']} "
        f"grid points ({scan['direction']} map): {len(scan['cycles'])} cycle(s), "
        f"{len(scan['failures'])} failed point(s)"
    )
    for i, c in enumerate(scan["cycles"]):
        lines.append(
            f"  cycle {i}: y* = {c['y_star']:.12g}  period = {c['period']:.12g}  "
            f"[{c['stability']}]  width = {c['width']:.3g}"
        )
    comp = payload.get("comparison")
    if comp is not None:
        verdict = "within" if comp["within"] else "EXCEEDS"
        lines.append(
            f"count {comp['count']} {verdict} the certified bound "
            f"(loglog = {comp['bound_loglog']:.6g})"
        )
    return "\n".join(lines)


def _render_verify_table(payload: dict[str, Any]) -> str:
    lines = []
    reports = payload["reports"]
    for i, rep in enumerate(reports):
        poly = rep["polynomial"]
        coeffs = ",".join(f"{c:.12g}" for c in poly["coeffs"])
        verdict = "PASS" if rep["all_pass"] else "FAIL"
        lines.append(
            f"report {i + 1}/{len(reports)}: {verdict}  n={poly['n']} C={poly['C']:g} "
            f"coeffs=[{coeffs}] R={rep['R']:g} seed={rep['seed']}"
        )
        for c in rep["checks"]:
            margin = "-" if c["margin"] is None else f"{c['margin']:.6g}"
            lines.append(
                f"  {c['status']:<12} {c['lemma_id']:<17} margin={margin:<13} "
                f"points={c['points_checked']}"
            )
    n_fail = sum(0 if r["all_pass"] else 1 for r in reports)
    lines.append(
        f"summary: {len(reports) - n_fail}/{len(reports)} reports pass"
        + (f", {n_fail} FAILED" if n_fail else "")
    )
    return "\n".join(lines)


# ----------------------------------------------------------------- subcommands


def _cmd_bound(args) -> int:
    req = BoundRequest(
        n=args.n, C=args.C, a1=args.a1, R=args.R, sigma_override=args.sigma_override
    )
    payload = _run(args.server, "/bound", req, handle_bound)
    if args.format == "json":
        print(canonical_json(payload))
    elif args.format == "csv":
        print(rows_csv(flatten(payload)), end="")
    else:
        print(_render_bound_table(payload))
    return _EXIT_OK


def _cmd_simulate(args) -> int:
    if args.every < 1:
        raise ValueError("--every must be a positive integer")
    req = SimulateRequest(
        **_system_kwargs(args),
        x0=args.x0,
        y0=args.y0,
        t_end=args.t_end,
        tol=args.tol,
        poincare=args.poincare,
    )
    payload = _run(args.server, "/simulate", req, handle_simulate)
    if args.every > 1:
        ts, xs, ys = payload["t"], payload["x"], payload["y"]
        keep = list(range(0, len(ts), args.every))
        if keep and keep[-1] != len(ts) - 1:
            keep.append(len(ts) - 1)
        payload = dict(payload)
        payload["t"] = [ts[i] for i in keep]
        payload["x"] = [xs[i] for i in keep]
        payload["y"] = [ys[i] for i in keep]
    if args.format == "json":
        print(canonical_json(payload))
        return _EXIT_OK
    text = trajectory_csv(payload["t"], payload["x"], payload["y"])
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({len(payload['t'])} rows)")
    else:
        print(text, end="")
    if payload.get("poincare"):
        pr = payload["poincare"]
        print(
            f"# return map: y_in={pr['y_in']:.17g} y_out={pr['y_out']:.17g} "
            f"transit_time={pr['transit_time']:.17g}",
            file=sys.stderr,
        )
    return _EXIT_OK


def _cmd_cycles(args) -> int:
    req = CyclesRequest(
        **_system_kwargs(args),
        R=args.R,
        grid_points=args.grid_points,
        tol=args.tol,
        y_min=args.y_min,
        y_max=args.y_max,
    )
    payload = _run(args.server, "/cycles", req, handle_cycles)
    if args.format == "json":
        print(canonical_json(payload))
    elif args.format == "csv":
        print(rows_csv(flatten(payload)), end="")
    else:
        print(_render_cycles_table(payload))
    return _EXIT_OK


def _cmd_verify(args) -> int:
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    req = VerifyRequest(
        **_system_kwargs(args),
        R=args.R,
        seed=args.seed,
        suite=args.suite,
        checks=checks,
        samples=args.samples,
        strip_orbits=args.strip_orbits,
    )
    payload = _run(args.server, "/verify", req, handle_verify)
    if args.format == "json":
        print(canonical_json(payload))
    elif args.format == "csv":
        print(rows_csv(flatten(payload)), end="")
    else:
        print(_render_verify_table(payload))
    all_pass = all(r["all_pass"] for r in payload["reports"])
    return _EXIT_OK if all_pass else _EXIT_VERIFICATION


def _cmd_portrait(args) -> int:
    req = PortraitRequest(**_system_kwargs(args), ics=args.ics, t_end=args.t_end, tol=args.tol)
    payload = _run(args.server, "/portrait", req, handle_portrait)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, orbit in enumerate(payload["orbits"]):
        path = out / f"orbit_{i:02d}.csv"
        path.write_text(trajectory_csv(orbit["t"], orbit["x"], orbit["y"]))
        print(
            f"wrote {path} ({len(orbit['t'])} rows, from ({orbit['x0']:g}, {orbit['y0']:g}))"
        )
    return _EXIT_OK


_COMMANDS = {
    "bound": _cmd_bound,
    "simulate": _cmd_simulate,
    "cycles": _cmd_cycles,
    "verify": _cmd_verify,
    "portrait": _cmd_portrait,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return _EXIT_INVALID
    except _COMPUTATION_ERRORS as exc:
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
