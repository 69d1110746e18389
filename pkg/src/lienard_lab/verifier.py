"""Numerical verification of every lemma-level inequality behind the bound.

Each check samples the claimed region (log-radially where scales span many
decades), evaluates both sides of the inequality, and reports the worst
normalized margin (bound - value) / |bound|: positive margins mean the claim
held everywhere with room to spare.  Checks never use each other's outputs,
so a transcription error in one cannot hide another.

All randomness flows from numpy Generators seeded per check, so a report for
a given (polynomial, R, seed) is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .bounds import (
    BoundRangeError,
    SystemParams,
    _neg_log_epsilon_log,
    analytic_widths,
    strip_widths,
    transit_time_bound,
    trap_radius,
    velocity_bounds,
)
from .dynamics import DynamicsError, EventSpec, integrate, poincare_map
from .logspace import LogValue
from .polynomial import CMonicPolynomial, random_c_monic

__all__ = [
    "CheckResult",
    "VerificationReport",
    "run_checks",
    "run_suite",
    "CHECK_IDS",
]

_MIN_REPRESENTABLE = 1e-280  # radii below this cannot be integrated in doubles
_MARGIN_CAP = 1e308  # stored instead of inf when a log-space margin overflows


@dataclass(frozen=True)
class CheckResult:
    lemma_id: str
    status: str  # "pass" | "fail" | "skipped" | "inconclusive"
    margin: float | None
    points_checked: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "lemma_id": self.lemma_id,
            "status": self.status,
            "margin": self.margin,
            "points_checked": self.points_checked,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    polynomial: dict[str, Any]
    R: float
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failed(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if c.status == "fail")

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "polynomial": self.polynomial,
            "R": self.R,
            "seed": self.seed,
            "all_pass": self.all_pass,
            "checks": [c.to_dict() for c in self.checks],
        }


def _poly_parts(F: CMonicPolynomial):
    """(q_coeffs_desc, tail_coeffs_desc): F(u) = u*q(u), tail = q - a1."""
    asc = F.coeffs_ascending  # (0, a1, ..., a_{n-1}, 1)
    q_desc = tuple(reversed(asc[1:]))
    tail_desc = tuple(reversed((0.0,) + asc[2:]))
    return q_desc, tail_desc


def _horner_arr(coeffs_desc, u):
    acc = np.zeros_like(u)
    for a in coeffs_desc:
        acc = acc * u + a
    return acc


def _log_uniform(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _check_tail_bound(F, params, rng, samples, **_):
    """|sum_{i>=2} a_i u^{i-1}| <= 2 C r throughout B_{1/2}."""
    _, tail_desc = _poly_parts(F)
    r = _log_uniform(rng, 1e-150, 0.5, samples)
    phi = rng.uniform(0.0, 2.0 * math.pi, samples)
    u = r * np.cos(phi)
    vals = np.abs(_horner_arr(tail_desc, u))
    bound = 2.0 * params.C * r
    margins = (bound - vals) / bound
    worst = float(margins.min())
    return CheckResult(
        lemma_id="tail_bound",
        status="pass" if worst >= 0 else "fail",
        margin=worst,
        points_checked=samples,
        detail="sup of tail ratio over B_1/2 sampled log-radially",
    )


def _check_trap_ball(F, params, rng, samples, **_):
    """phidot <= (|a1|-2)/4 and |rdot| <= 2r inside the trapping ball."""
    a = params.abs_a1
    ball = (2.0 - a) / (4.0 * params.C)
    q_desc, _ = _poly_parts(F)
    r = _log_uniform(rng, ball * 1e-12, ball, samples)
    phi = rng.uniform(0.0, 2.0 * math.pi, samples)
    c, s = np.cos(phi), np.sin(phi)
    q = _horner_arr(q_desc, r * c)
    rdot = -r * c * c * q
    phidot = -1.0 + s * c * q
    phi_bound = (a - 2.0) / 4.0  # negative: rotation stays clockwise at speed
    m_phi = (phi_bound - phidot) / abs(phi_bound)
    m_r = (2.0 * r - np.abs(rdot)) / (2.0 * r)
    worst = float(min(m_phi.min(), m_r.min()))
    return CheckResult(
        lemma_id="trap_ball",
        status="pass" if worst >= 0 else "fail",
        margin=worst,
        points_checked=samples,
        detail=f"ball radius {ball:.6g}; both angular and radial estimates",
    )


def _check_radial_sign(F, params, rng, samples, **_):
    """sign(rdot) = -sign(a1) wherever the linear term dominates the tail.

    Valid for r < |a1|/(2C); sampled up to 0.9 of that radius, excluding the
    measure-zero sliver |cos phi| <= 1e-6 where rdot vanishes identically.
    """
    a1 = F.a1
    r_max = 0.9 * abs(a1) / (2.0 * params.C)
    q_desc, _ = _poly_parts(F)
    r = _log_uniform(rng, r_max * 1e-12, r_max, samples)
    phi = rng.uniform(0.0, 2.0 * math.pi, samples)
    c = np.cos(phi)
    keep = np.abs(c) > 1e-6
    r, c = r[keep], c[keep]
    q = _horner_arr(q_desc, r * c)
    rdot = -r * c * c * q
    signed = -np.sign(a1) * rdot  # must be positive
    margins = signed / (abs(a1) * r * c * c)
    worst = float(margins.min())
    return CheckResult(
        lemma_id="radial_sign",
        status="pass" if worst > 0 else "fail",
        margin=worst,
        points_checked=int(keep.sum()),
        detail=f"radius < {r_max:.6g}: radial motion is monotone toward/away from the focus",
    )


def _check_strip_transit(F, params, rng, samples, strip_orbits=8, **_):
    """Orbits cross the strip |y - F(x)| <= alpha in time <= 1.

    Two independent families: (a) the edge derivative -x - F'(x) s must push
    through the strip with margin 2 alpha at sampled x; (b) actual orbits
    dropped on the entry edge must exit through the other edge within t <= 1.
    """
    sigma = trap_radius(params).to_float()
    if sigma < _MIN_REPRESENTABLE:
        return CheckResult(
            lemma_id="strip_transit",
            status="skipped",
            margin=None,
            points_checked=0,
            detail="trap radius below representable scale; strip not samplable",
        )
    _, alpha_lv = strip_widths(params)
    alpha = alpha_lv.to_float()
    x_hi = 0.999 * min(params.R, 0.5)
    x_lo = 1.5 * sigma
    if x_lo >= x_hi:
        return CheckResult(
            lemma_id="strip_transit",
            status="skipped",
            margin=None,
            points_checked=0,
            detail=f"no strip range: 1.5 sigma = {x_lo:.3g} >= {x_hi:.3g}",
        )

    # (a) edge-derivative margins, both edges, both signs of x
    xs = _log_uniform(rng, x_lo, x_hi, samples)
    xs = np.concatenate([xs, -xs])
    dF = _horner_arr(tuple(reversed(F.derivative_coeffs())), xs)
    worst = math.inf
    for s_edge in (alpha, -alpha):
        drift = -xs - dF * s_edge  # d/dt of (y - F(x)) on the edge
        req = np.where(xs > 0, -drift, drift)  # must exceed 2 alpha in crossing direction
        m = (req - 2.0 * alpha) / (2.0 * alpha)
        worst = min(worst, float(m.min()))

    # (b) measured transits
    timed = 0
    attempts = 0
    x_candidates = _log_uniform(rng, x_lo, x_hi, 8 * strip_orbits)
    signs = rng.choice([-1.0, 1.0], size=x_candidates.size)
    for x0 in x_candidates * signs:
        if timed >= strip_orbits:
            break
        attempts += 1
        Fx = F.eval(float(x0))
        entry_s = alpha if x0 > 0 else -alpha
        y0 = Fx + entry_s
        rr = math.hypot(x0, y0)
        if not (1.2 * sigma < rr < 0.98 * params.R):
            continue
        exit_s = -entry_s
        ev = EventSpec(
            g=lambda x, y, _e=exit_s: (y - F.eval(x)) - _e,
            direction=-1 if x0 > 0 else 1,
            terminal=True,
        )
        try:
            res = integrate(F, (float(x0), y0), 1.5, tol=1e-10, events=[ev], record=False)
        except DynamicsError as exc:
            return CheckResult(
                lemma_id="strip_transit",
                status="inconclusive",
                margin=None,
                points_checked=2 * samples + timed,
                detail=f"integration failed during a transit: {exc}",
            )
        if res.reason != "event":
            worst = min(worst, 1.0 - 1.5)
            return CheckResult(
                lemma_id="strip_transit",
                status="fail",
                margin=worst,
                points_checked=2 * samples + timed + 1,
                detail=f"orbit from x = {x0:.6g} did not exit the strip within t = 1.5",
            )
        worst = min(worst, 1.0 - res.t)
        timed += 1

    status = "pass" if worst >= 0 else "fail"
    if timed == 0:
        status = "inconclusive"
    return CheckResult(
        lemma_id="strip_transit",
        status=status,
        margin=worst,
        points_checked=2 * samples + timed,
        detail=f"{timed} transits timed, slowest margin against t = 1 combined with edge derivatives",
    )


def _check_hausdorff_gap(F, params, rng, samples, **_):
    """Consecutive spiral turns through (0, sigma) are >= (pi |a1| / 2) sigma apart."""
    sigma = trap_radius(params).to_float()
    if sigma < _MIN_REPRESENTABLE:
        return CheckResult(
            lemma_id="hausdorff_gap",
            status="skipped",
            margin=None,
            points_checked=0,
            detail="trap radius below representable scale",
        )
    direction = "inverse" if F.a1 > 0 else "forward"  # expanding turn
    try:
        rr = poincare_map(F, sigma, direction=direction, tol=1e-12)
    except DynamicsError as exc:
        return CheckResult(
            lemma_id="hausdorff_gap",
            status="inconclusive",
            margin=None,
            points_checked=0,
            detail=f"return map failed at sigma: {exc}",
        )
    gap = abs(rr.y_out - sigma)
    bound = 0.5 * math.pi * params.abs_a1 * sigma
    margin = (gap - bound) / bound
    return CheckResult(
        lemma_id="hausdorff_gap",
        status="pass" if margin >= 0 else "fail",
        margin=margin,
        points_checked=1,
        detail=f"one {direction} turn from y = sigma: gap {gap:.6g} vs bound {bound:.6g}",
    )


def _check_transit_time(F, params, rng, samples, **_):
    """Measured one-turn times below the outermost cycle stay within the bound."""
    from .cycles import AnnulusError, ScanFailureError, scan_cycles

    sigma = max(trap_radius(params).to_float(), _MIN_REPRESENTABLE)
    t_bound = transit_time_bound(params)
    try:
        cs = scan_cycles(F, sigma, params.R, grid_points=64, tol=1e-8)
    except (AnnulusError, ScanFailureError) as exc:
        return CheckResult(
            lemma_id="transit_time",
            status="inconclusive",
            margin=None,
            points_checked=0,
            detail=f"cycle scan unusable: {exc}",
        )
    Y = cs.outermost
    if Y == 0.0:
        return CheckResult(
            lemma_id="transit_time",
            status="skipped",
            margin=None,
            points_checked=0,
            detail="no cycles: the return-time claim is vacuous here",
        )
    heights = np.geomspace(max(sigma, Y * 1e-6), Y, 6)
    worst = math.inf
    measured = 0
    for y in heights:
        try:
            rrf = poincare_map(F, float(y), tol=1e-8, escape_radius=10 * max(1.0, params.R))
        except DynamicsError:
            continue
        measured += 1
        m = (t_bound.log_magnitude - math.log(rrf.transit_time)) / abs(t_bound.log_magnitude)
        worst = min(worst, m)
    if measured == 0:
        return CheckResult(
            lemma_id="transit_time",
            status="inconclusive",
            margin=None,
            points_checked=0,
            detail="no height produced a forward return",
        )
    return CheckResult(
        lemma_id="transit_time",
        status="pass" if worst >= 0 else "fail",
        margin=worst,
        points_checked=measured,
        detail=f"log-space margin over {measured} heights up to the outermost cycle Y = {Y:.6g}",
    )


def _check_velocity_bound(F, params, rng, samples, **_):
    """|xdot| + |ydot| <= 3 (R+2)^n on the padded ball B_{R+2}."""
    mu, _ = velocity_bounds(params)
    rad = params.R + 2.0
    r = rad * np.sqrt(rng.uniform(0.0, 1.0, samples))
    phi = rng.uniform(0.0, 2.0 * math.pi, samples)
    x = r * np.cos(phi)
    y = r * np.sin(phi)
    v = np.abs(y - F.eval(x)) + np.abs(x)
    margins = (mu - v) / mu
    worst = float(margins.min())
    return CheckResult(
        lemma_id="velocity_bound",
        status="pass" if worst >= 0 else "fail",
        margin=worst,
        points_checked=samples,
        detail=f"speed bound mu = {mu:.6g} on the ball of radius {rad}",
    )


def _check_extension_margin(F, params, rng, samples, **_):
    """lambda stays below sigma by the full safety factor max(1000, 2C+2).

    Reported in raw log space: margin = (log sigma - log guard) - log lambda,
    which is astronomically positive for certified parameters.  When lambda
    is too small for even its log to be a float the margin is capped.
    """
    guard = max(1000.0, 2.0 * params.C + 2.0)
    log_sigma = trap_radius(params).log_magnitude
    rhs = log_sigma - math.log(guard)
    try:
        _, _, lam = analytic_widths(params)
        margin = rhs - lam.log_magnitude
    except BoundRangeError:
        # -log(lambda) = exp(E)/4 with E beyond float range: margin caps out
        E = _neg_log_epsilon_log(params, trap_radius(params))
        try:
            margin = math.exp(E) / 4.0 + rhs
        except OverflowError:
            margin = _MARGIN_CAP
        if margin > _MARGIN_CAP or math.isinf(margin):
            margin = _MARGIN_CAP
    return CheckResult(
        lemma_id="extension_margin",
        status="pass" if margin > 0 else "fail",
        margin=margin,
        points_checked=1,
        detail=f"log-space gap between lambda and sigma/{guard:.0f}",
    )


_CHECKS: dict[str, Callable[..., CheckResult]] = {
    "tail_bound": _check_tail_bound,
    "trap_ball": _check_trap_ball,
    "radial_sign": _check_radial_sign,
    "strip_transit": _check_strip_transit,
    "hausdorff_gap": _check_hausdorff_gap,
    "transit_time": _check_transit_time,
    "velocity_bound": _check_velocity_bound,
    "extension_margin": _check_extension_margin,
}

CHECK_IDS = tuple(_CHECKS)


def run_checks(
    F: CMonicPolynomial,
    R: float = 1.0,
    *,
    seed: int = 42,
    checks: tuple[str, ...] | None = None,
    samples: int = 2048,
    strip_orbits: int = 8,
) -> VerificationReport:
    """Run the named checks (all by default) for F on the ball of radius R.

    The same (F, R, seed) always produces the identical report: each check
    draws from its own generator seeded by (seed, fixed check index).
    """
    if not isinstance(F, CMonicPolynomial):
        raise TypeError("verification requires the bounded-coefficient form")
    if F.a1 == 0.0:
        raise ValueError("focus condition requires a1 != 0")
    params = SystemParams(n=F.n, C=F.C, a1=F.a1, R=float(R))
    if checks is None:
        selected = CHECK_IDS
    else:
        unknown = set(checks) - set(CHECK_IDS)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}; known: {list(CHECK_IDS)}")
        selected = tuple(checks)
    results = []
    for name in selected:
        idx = CHECK_IDS.index(name)
        rng = np.random.default_rng([seed, idx])
        results.append(
            _CHECKS[name](F, params, rng, samples, strip_orbits=strip_orbits)
        )
    return VerificationReport(
        polynomial=F.to_dict(), R=float(R), seed=seed, checks=tuple(results)
    )


def run_suite(
    count: int,
    *,
    seed: int = 42,
    n_values: tuple[int, ...] = (2, 4, 6),
    C: float = 4.0,
    R: float = 1.0,
    samples: int = 2048,
    strip_orbits: int = 8,
    checks: tuple[str, ...] | None = None,
) -> list[VerificationReport]:
    """Verify `count` random bounded-coefficient polynomials, reproducibly."""
    if count < 1:
        raise ValueError(f"suite size must be positive, got {count}")
    rng = np.random.default_rng(seed)
    reports = []
    for i in range(count):
        n = int(rng.choice(n_values))
        F = random_c_monic(rng, n, C)
        reports.append(
            run_checks(
                F,
                R,
                seed=seed + 1000 * (i + 1),
                samples=samples,
                strip_orbits=strip_orbits,
                checks=checks,
            )
        )
    return reports
