"""Plane integration and Poincare return maps for x' = y - F(x), y' = -x.

The integrator is a scalar Dormand-Prince 5(4) with FSAL, adaptive steps and
a per-step rotation guard, written directly on Python floats: the systems
here live at radii down to ~1e-280 where everything must stay relative, and
a 2-d specialised loop beats array machinery by a wide margin.

Events (section crossings, escape) are located by bisection against a fresh
embedded substep from the step start, which keeps section hits at machine
precision instead of interpolation precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .polynomial import Polynomial

__all__ = [
    "DynamicsError",
    "EscapeError",
    "NoReturnError",
    "StepFailureError",
    "EventSpec",
    "Trajectory",
    "IntegrationResult",
    "ReturnResult",
    "vector_field",
    "polar_derivatives",
    "integrate",
    "poincare_map",
]

_RADIUS_FLOOR = 1e-290  # below this the state scale is treated as degenerate
_MAX_STEP_ANGLE = math.pi / 2  # per-step rotation cap; keeps crossings unskippable


class DynamicsError(RuntimeError):
    """Base class for integration failures."""


class EscapeError(DynamicsError):
    """The orbit left the allowed radius before the event of interest."""

    def __init__(self, message: str, t: float, x: float, y: float):
        super().__init__(message)
        self.t = t
        self.x = x
        self.y = y


class NoReturnError(DynamicsError):
    """No section return was found within the allotted time."""


class StepFailureError(DynamicsError):
    """The step size underflowed or the step budget ran out."""


def vector_field(F: Polynomial, x: float, y: float) -> tuple[float, float]:
    """(xdot, ydot) = (y - F(x), -x)."""
    return y - F.eval(x), -x


def polar_derivatives(F: Polynomial, r: float, phi: float) -> tuple[float, float]:
    """(rdot, phidot) of the same field in polar coordinates.

    rdot = -cos(phi) * F(r cos phi) and phidot = -1 + sin(phi) F(r cos phi)/r.
    When F has zero constant term the division is removed algebraically
    (F(u)/r = cos(phi) * (F(u)/u)), which keeps full relative precision at
    radii near underflow.  r = 0 is degenerate and rejected.
    """
    if not (r > 0):
        raise ValueError(f"polar coordinates are degenerate at r = {r}")
    c = math.cos(phi)
    s = math.sin(phi)
    u = r * c
    coeffs = F.coeffs_ascending
    if coeffs[0] == 0.0:
        # q(u) = F(u)/u, a plain polynomial
        q = 0.0
        for a in reversed(coeffs[1:]):
            q = q * u + a
        rdot = -r * c * c * q
        phidot = -1.0 + s * c * q
    else:
        Fu = F.eval(u)
        rdot = -c * Fu
        phidot = -1.0 + s * Fu / r
    return rdot, phidot


@dataclass(frozen=True)
class EventSpec:
    """Zero-crossing detector g(x, y) = 0.

    direction +1 fires when g goes (strictly) negative -> nonnegative over a
    step, -1 the mirror image, 0 on any strict sign change.  A step that
    *starts* exactly on the zero set never fires, so integrations may begin
    on their own section.
    """

    g: Callable[[float, float], float]
    direction: int = 0
    terminal: bool = True


@dataclass
class Trajectory:
    """Accepted integration nodes with derivatives; cubic-Hermite queryable."""

    ts: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    dxs: np.ndarray
    dys: np.ndarray

    def __len__(self) -> int:
        return len(self.ts)

    def interpolate(self, t: float) -> tuple[float, float]:
        ts = self.ts
        if not (ts[0] <= t <= ts[-1]):
            raise ValueError(f"t = {t} outside trajectory range [{ts[0]}, {ts[-1]}]")
        i = int(np.searchsorted(ts, t, side="right")) - 1
        if i >= len(ts) - 1:
            i = len(ts) - 2
        if i < 0:
            i = 0
        h = ts[i + 1] - ts[i]
        if h == 0.0:
            return float(self.xs[i]), float(self.ys[i])
        s = (t - ts[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        x = (
            h00 * self.xs[i]
            + h10 * h * self.dxs[i]
            + h01 * self.xs[i + 1]
            + h11 * h * self.dxs[i + 1]
        )
        y = (
            h00 * self.ys[i]
            + h10 * h * self.dys[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.dys[i + 1]
        )
        return float(x), float(y)


@dataclass
class IntegrationResult:
    t: float
    x: float
    y: float
    reason: str  # "t_end" | "event"
    event_index: int | None
    steps: int
    rejected: int
    angle_swept: float
    trajectory: Trajectory | None


@dataclass
class ReturnResult:
    """One full turn of the return map on the positive y-axis."""

    y_in: float
    y_out: float
    transit_time: float
    direction: str  # "forward" | "inverse"
    angle_swept: float
    steps: int
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def displacement(self) -> float:
        return self.y_out - self.y_in

    @property
    def turns(self) -> int:
        """Completed full rotations; the return map always performs one."""
        return round(abs(self.angle_swept) / (2.0 * math.pi))


# Dormand-Prince 5(4) tableau
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _make_field(F: Polynomial, reverse: bool) -> Callable[[float, float], tuple[float, float]]:
    coeffs = tuple(reversed(F.coeffs_ascending))  # highest first for Horner

    if reverse:

        def f(x: float, y: float) -> tuple[float, float]:
            acc = 0.0
            for a in coeffs:
                acc = acc * x + a
            return acc - y, x

    else:

        def f(x: float, y: float) -> tuple[float, float]:
            acc = 0.0
            for a in coeffs:
                acc = acc * x + a
            return y - acc, -x

    return f


def _dp_step(f, x, y, h, k1x, k1y):
    """One embedded 5(4) step; returns (x5, y5, err_x, err_y, k7x, k7y)."""
    k2x, k2y = f(x + h * _A21 * k1x, y + h * _A21 * k1y)
    k3x, k3y = f(x + h * (_A31 * k1x + _A32 * k2x), y + h * (_A31 * k1y + _A32 * k2y))
    k4x, k4y = f(
        x + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x),
        y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y),
    )
    k5x, k5y = f(
        x + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x),
        y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y),
    )
    k6x, k6y = f(
        x + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x),
        y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y),
    )
    x5 = x + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
    y5 = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
    k7x, k7y = f(x5, y5)
    err_x = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
    err_y = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
    return x5, y5, err_x, err_y, k7x, k7y


def _refine_event(f, x0, y0, k1x, k1y, h, g, want_positive_end):
    """Bisect tau in (0, h] for the first sign change of g along the local step.

    Each probe is a fresh embedded substep of size tau from the step start, so
    the located point lies on the numerical solution to local order, not on an
    interpolant.  Returns (tau, x, y) at the crossing-side end.
    """
    lo = 0.0
    hi = h
    x_hi, y_hi = None, None
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        xm, ym, _, _, _, _ = _dp_step(f, x0, y0, mid, k1x, k1y)
        gm = g(xm, ym)
        on_end_side = (gm >= 0.0) if want_positive_end else (gm <= 0.0)
        if on_end_side:
            hi = mid
            x_hi, y_hi = xm, ym
        else:
            lo = mid
    if x_hi is None:
        x_hi, y_hi, _, _, _, _ = _dp_step(f, x0, y0, hi, k1x, k1y)
    return hi, x_hi, y_hi


def integrate(
    F: Polynomial,
    state0: tuple[float, float],
    t_end: float,
    *,
    tol: float = 1e-10,
    events: Sequence[EventSpec] = (),
    record: bool = True,
    max_steps: int = 2_000_000,
    reverse: bool = False,
) -> IntegrationResult:
    """Integrate from state0 for time t_end or until a terminal event fires.

    tol is a relative tolerance against the running state scale (with a tiny
    absolute floor), so orbits at radius 1e-12 are resolved as finely as
    orbits at radius 1.  Steps are additionally capped to sweep at most a
    quarter turn around the origin, which makes section crossings impossible
    to skip and keeps the accumulated angle well defined.
    """
    if not (t_end > 0 and math.isfinite(t_end)):
        raise ValueError(f"t_end must be positive and finite, got {t_end}")
    if not (0 < tol <= 1e-2):
        raise ValueError(f"tol must be in (0, 1e-2], got {tol}")
    x, y = float(state0[0]), float(state0[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite initial state {state0}")

    f = _make_field(F, reverse)
    k1x, k1y = f(x, y)

    # initial step from the local scale: aims low, the controller grows it
    d0 = max(abs(x), abs(y), _RADIUS_FLOOR)
    d1 = max(abs(k1x), abs(k1y), _RADIUS_FLOOR)
    h = min(0.01 * d0 / d1, t_end)

    t = 0.0
    angle = 0.0
    steps = 0
    rejected = 0
    ts = [t]
    xs = [x]
    ys = [y]
    dxs = [k1x]
    dys = [k1y]
    g_prev = [ev.g(x, y) for ev in events]

    reason = None
    event_index = None
    while True:
        if steps + rejected > max_steps:
            raise StepFailureError(
                f"step budget {max_steps} exhausted at t = {t} (state {x}, {y})"
            )
        if h <= 8.0 * math.ulp(abs(t) + 1.0) * 1e-6 and h < t_end:
            raise StepFailureError(f"step size underflow at t = {t} (h = {h})")

        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True

        x1, y1, err_x, err_y, k7x, k7y = _dp_step(f, x, y, h, k1x, k1y)
        scale = max(abs(x), abs(y), abs(x1), abs(y1), _RADIUS_FLOOR)
        err = max(abs(err_x), abs(err_y)) / scale

        if err > tol:
            rejected += 1
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            continue

        # rotation guard: reject steps sweeping more than a quarter turn
        r0 = math.hypot(x, y)
        r1 = math.hypot(x1, y1)
        dphi = 0.0
        if r0 > _RADIUS_FLOOR and r1 > _RADIUS_FLOOR:
            cross = x * y1 - y * x1
            dot = x * x1 + y * y1
            dphi = math.atan2(cross, dot)
            if abs(dphi) > _MAX_STEP_ANGLE:
                rejected += 1
                h *= 0.5
                continue

        # event scan on the accepted step
        hit = None
        for idx, ev in enumerate(events):
            g0 = g_prev[idx]
            g1 = ev.g(x1, y1)
            if ev.direction > 0:
                fired = g0 < 0.0 <= g1
            elif ev.direction < 0:
                fired = g0 > 0.0 >= g1
            else:
                fired = (g0 < 0.0 <= g1) or (g0 > 0.0 >= g1)
            if fired and (hit is None or ev.terminal):
                tau, xe, ye = _refine_event(f, x, y, k1x, k1y, h, ev.g, g0 < 0.0)
                if hit is None or tau < hit[1]:
                    hit = (idx, tau, xe, ye)
                if ev.terminal and hit[0] == idx:
                    break

        if hit is not None and events[hit[0]].terminal:
            idx, tau, xe, ye = hit
            t_hit = t + tau
            # angle up to the event point
            if r0 > _RADIUS_FLOOR:
                cross = x * ye - y * xe
                dot = x * xe + y * ye
                angle += math.atan2(cross, dot)
            dxe, dye = f(xe, ye)
            ts.append(t_hit)
            xs.append(xe)
            ys.append(ye)
            dxs.append(dxe)
            dys.append(dye)
            t, x, y = t_hit, xe, ye
            steps += 1
            reason = "event"
            event_index = idx
            break

        steps += 1
        t = t_end if last else t + h
        x, y = x1, y1
        k1x, k1y = k7x, k7y  # FSAL
        angle += dphi
        for idx, ev in enumerate(events):
            g_prev[idx] = ev.g(x, y)
        if record:
            ts.append(t)
            xs.append(x)
            ys.append(y)
            dxs.append(k1x)
            dys.append(k1y)

        if last:
            reason = "t_end"
            break

        if err > 0:
            h *= min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        else:
            h *= 5.0

    if record and reason == "event":
        pass  # event node already appended
    traj = None
    if record:
        traj = Trajectory(
            ts=np.asarray(ts),
            xs=np.asarray(xs),
            ys=np.asarray(ys),
            dxs=np.asarray(dxs),
            dys=np.asarray(dys),
        )
    return IntegrationResult(
        t=t,
        x=x,
        y=y,
        reason=reason,
        event_index=event_index,
        steps=steps,
        rejected=rejected,
        angle_swept=angle,
        trajectory=traj,
    )


def poincare_map(
    F: Polynomial,
    y0: float,
    *,
    direction: str = "forward",
    tol: float = 1e-10,
    escape_radius: float | None = None,
    max_time: float | None = None,
    record: bool = False,
    max_steps: int = 2_000_000,
) -> ReturnResult:
    """Follow (0, y0) on the positive y-axis through exactly one full turn.

    "forward" follows the flow (clockwise); "inverse" follows the reversed
    field, so the two maps are mutually inverse.  Raises EscapeError if the
    orbit leaves escape_radius (default 10 * max(1, y0)) and NoReturnError if
    no return happens within max_time.
    """
    if not (y0 > 0 and math.isfinite(y0)):
        raise ValueError(f"y0 must be a positive finite section height, got {y0}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    reverse = direction == "inverse"
    if escape_radius is None:
        escape_radius = 10.0 * max(1.0, y0)
    if max_time is None:
        max_time = 1e6

    # one full turn crosses x = 0 with x increasing (forward flow) or
    # decreasing (reversed flow); the negative y-axis is crossed with the
    # opposite slope and never fires.
    section = EventSpec(g=lambda x, y: x, direction=1 if not reverse else -1, terminal=True)
    esc2 = escape_radius * escape_radius
    escape = EventSpec(g=lambda x, y: x * x + y * y - esc2, direction=1, terminal=True)

    res = integrate(
        F,
        (0.0, y0),
        max_time,
        tol=tol,
        events=[section, escape],
        record=record,
        max_steps=max_steps,
        reverse=reverse,
    )
    if res.reason == "event" and res.event_index == 1:
        raise EscapeError(
            f"orbit from (0, {y0}) escaped radius {escape_radius} at t = {res.t}",
            res.t,
            res.x,
            res.y,
        )
    if res.reason != "event":
        raise NoReturnError(
            f"no return to the section within t = {max_time} starting from (0, {y0})"
        )
    if not (res.y > 0):
        raise NoReturnError(
            f"section hit at non-transversal point (x, y) = ({res.x}, {res.y})"
        )
    expected = -2.0 * math.pi if not reverse else 2.0 * math.pi
    if abs(res.angle_swept - expected) > 0.5:
        raise NoReturnError(
            f"return fired after sweeping {res.angle_swept:.4f} rad instead of "
            f"{expected:.4f}; the orbit did not make a clean single turn"
        )
    return ReturnResult(
        y_in=y0,
        y_out=res.y,
        transit_time=res.t,
        direction=direction,
        angle_swept=res.angle_swept,
        steps=res.steps,
        trajectory=res.trajectory,
    )
