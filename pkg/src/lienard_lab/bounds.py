"""Every explicit constant of the limit-cycle counting chain, overflow-safe.

The chain runs: trap radius sigma -> strip widths (omega, alpha) -> velocity
bound (mu, L) -> return-time bound T -> analytic-extension widths
(epsilon, delta, lambda) -> index bound b -> counting formula -> final
double-exponential bound.  Each link is an exact closed form; the work here
is evaluating them in log space so that quantities like exp(-4.5e17) survive.

Certified values only: these are the proved bounds, never empirical maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .logspace import LogLogValue, LogValue

__all__ = [
    "SystemParams",
    "BoundReport",
    "ConsistencyError",
    "BoundRangeError",
    "trap_radius",
    "strip_widths",
    "velocity_bound_values",
    "velocity_bounds",
    "velocity_bounds_log",
    "transit_time_bound",
    "analytic_widths",
    "index_bound",
    "cycle_count_bound",
    "final_bound",
    "compute_bound_report",
    "LEMMA_IDS",
]

# Proof constants, named once.  Comments say which link each scales.
TRAP_TURN_COST = 8.0 * math.pi  # exponent scale of the trap radius: one guaranteed full turn costs e^{8*pi/(|a1|-2)} of radius
ANALYTIC_WIDTH_FACTOR = 300.0  # numerator factor of -log(epsilon), the analytic-extension width
TRANSIT_TIME_FACTOR = 25.0  # factor of the certified return-time bound 25 C^2 n^2 R^n / sigma
VELOCITY_FACTOR = 3.0  # mu = 3 (R+2)^n dominates |xdot|+|ydot| on the padded ball
FINAL_CLOSED_FACTOR = 38400.0  # closed-form inner-exponent factor (600 * 8^2 from substituting sigma)
FINAL_DOUBLE_TURN_COST = 16.0 * math.pi  # trap exponent doubled: sigma appears squared in the final form
FINAL_CHAIN_FACTOR = 600.0  # chained-form factor: 2 x 300 from folding the index bound into the exponent

# -log(epsilon) beyond this cannot be stored in a float; see analytic_widths.
_MAX_REPRESENTABLE_NEG_LOG = 705.0

# Descriptive identifier per chain link; shared with the verifier and CLI.
LEMMA_IDS = {
    "sigma": "trap_radius",
    "omega": "strip_widths",
    "alpha": "strip_widths",
    "mu": "velocity_bound",
    "L_lip": "velocity_bound",
    "t_max_bound": "transit_time_bound",
    "delta": "analytic_widths",
    "lambda": "analytic_widths",
    "epsilon": "analytic_widths",
    "bernstein": "index_bound",
    "final_bound": "final_bound",
}


class ConsistencyError(RuntimeError):
    """An internally re-derived identity failed — an implementation bug."""


class BoundRangeError(OverflowError):
    """A log-space quantity left float range (|a1| extremely close to 2)."""


@dataclass(frozen=True)
class SystemParams:
    """The four parameters (n, C, a1, R) of the final bound.

    n even >= 2 (degree), C >= 4 (coefficient bound), 0 < |a1| < 2 (focus
    condition), R > 0 (radius inside which cycles are counted).
    """

    n: int
    C: float
    a1: float
    R: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be an even integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.C) and self.C >= 4):
            raise ValueError(f"C must be finite and >= 4 in bound computations, got {self.C}")
        if not (math.isfinite(self.a1) and 0 < abs(self.a1) < 2):
            raise ValueError(f"a1 must satisfy 0 < |a1| < 2, got {self.a1}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValueError(f"R must be finite and > 0, got {self.R}")

    @property
    def abs_a1(self) -> float:
        return abs(self.a1)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "C": self.C, "a1": self.a1, "R": self.R}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SystemParams":
        return cls(n=int(d["n"]), C=float(d["C"]), a1=float(d["a1"]), R=float(d["R"]))


def trap_radius(p: SystemParams) -> LogValue:
    """sigma = |a1| (2-|a1|) / (8C) * e^{8*pi / (|a1|-2)}.

    Inside the ball of this radius the return map is defined: orbits complete
    a full turn before their radius can change by the trapped factor.
    """
    a = p.abs_a1
    log_sigma = (
        math.log(a) + math.log(2.0 - a) - math.log(8.0 * p.C) + TRAP_TURN_COST / (a - 2.0)
    )
    return LogValue(log_sigma)


def _resolve_sigma(p: SystemParams, sigma_lv: LogValue | None) -> LogValue:
    return trap_radius(p) if sigma_lv is None else sigma_lv


def strip_widths(p: SystemParams, sigma_lv: LogValue | None = None) -> tuple[LogValue, LogValue]:
    """(omega, alpha): omega = sigma/(3C), alpha = sigma/(6 C^2 n^2 R^{n-1}).

    omega is the guaranteed |x| inside the slow strip; alpha is the strip
    half-width around y = F(x) that orbits cross in time <= 1.
    """
    sig = _resolve_sigma(p, sigma_lv)
    omega = LogValue(sig.log_magnitude - math.log(3.0 * p.C))
    alpha = LogValue(
        sig.log_magnitude
        - math.log(6.0 * p.C**2 * p.n**2)
        - (p.n - 1) * math.log(p.R)
    )
    return omega, alpha


def velocity_bound_values(n: int, R: float) -> tuple[float, float]:
    """(mu, L) as plain reals: mu = 3 (R+2)^n, L = 2 mu.

    mu dominates |xdot| + |ydot| on the ball of radius R+2; L is the Lipschitz
    scale used by the analytic-extension hypothesis.
    """
    base = (R + 2.0) ** n
    mu = VELOCITY_FACTOR * base
    if not math.isfinite(mu):
        raise OverflowError(
            f"3*(R+2)^n overflows for R={R}, n={n}; use velocity_bounds_log"
        )
    return mu, 2.0 * mu


def velocity_bounds(p: SystemParams) -> tuple[float, float]:
    return velocity_bound_values(p.n, p.R)


def velocity_bounds_log(p: SystemParams) -> tuple[LogValue, LogValue]:
    """Log-space twin of velocity_bounds for parameters where (R+2)^n overflows."""
    log_mu = math.log(VELOCITY_FACTOR) + p.n * math.log(p.R + 2.0)
    return LogValue(log_mu), LogValue(log_mu + math.log(2.0))


def transit_time_bound(p: SystemParams, sigma_lv: LogValue | None = None) -> LogValue:
    """25 C^2 n^2 R^n / sigma — certified cap on the one-turn return time.

    The same value also caps the padded time T = T_max + 1 used by the
    analytic-extension hypothesis.
    """
    sig = _resolve_sigma(p, sigma_lv)
    log_t = (
        math.log(TRANSIT_TIME_FACTOR)
        + 2.0 * math.log(p.C)
        + 2.0 * math.log(p.n)
        + p.n * math.log(p.R)
        - sig.log_magnitude
    )
    return LogValue(log_t)


def _neg_log_epsilon_log(p: SystemParams, sig: LogValue) -> float:
    """log(-log(epsilon)) = log(300 C^2 n^2 R^n (R+2)^n) - log(sigma)."""
    return (
        math.log(ANALYTIC_WIDTH_FACTOR)
        + 2.0 * math.log(p.C)
        + 2.0 * math.log(p.n)
        + p.n * math.log(p.R)
        + p.n * math.log(p.R + 2.0)
        - sig.log_magnitude
    )


def analytic_widths(
    p: SystemParams, sigma_lv: LogValue | None = None
) -> tuple[LogValue, LogValue, LogValue]:
    """(epsilon, delta, lambda): the nested analytic-extension widths.

    log(epsilon) = -300 C^2 n^2 R^n (R+2)^n / sigma; delta = sqrt(epsilon),
    lambda = sqrt(delta), both exact in log space.  Construction re-checks
    delta <= e^{-L*T} (it holds identically: 150 = 6 * 25) and raises
    ConsistencyError on failure, which would mean a transcription bug.

    Raises BoundRangeError when -log(epsilon) itself exceeds float range
    (|a1| closer to 2 than ~1.96 at moderate C, n, R); the verifier's
    log-space checks handle that regime without materializing these.
    """
    sig = _resolve_sigma(p, sigma_lv)
    neg_log_eps_log = _neg_log_epsilon_log(p, sig)
    if neg_log_eps_log > _MAX_REPRESENTABLE_NEG_LOG:
        raise BoundRangeError(
            f"-log(epsilon) = exp({neg_log_eps_log:.3f}) exceeds float range; "
            "epsilon cannot be carried even in log form for these parameters"
        )
    log_eps = -math.exp(neg_log_eps_log)
    epsilon = LogValue(log_eps)
    delta = epsilon**0.5
    lam = delta**0.5

    # delta <= e^{-L*T}: compare log(-log(delta)) with log(L) + log(T).
    log_L = velocity_bounds_log(p)[1].log_magnitude
    log_T = transit_time_bound(p, sig).log_magnitude
    lhs = math.log(-delta.log_magnitude)
    rhs = log_L + log_T
    if lhs > rhs + 1e-12 * abs(rhs):
        raise ConsistencyError(
            f"delta <= e^(-L*T) failed: log(-log delta) = {lhs!r} vs log(L*T) = {rhs!r}"
        )
    return epsilon, delta, lam


def index_bound(p: SystemParams, sigma_lv: LogValue | None = None) -> LogValue:
    """(R+2)/(|a1| sigma) — the loosest, final link of the index chain.

    Dominates log((|D'|+2)/gap) for the section segment's geometry, which is
    the factor the counting formula multiplies by.
    """
    sig = _resolve_sigma(p, sigma_lv)
    return LogValue(math.log(p.R + 2.0) - math.log(p.abs_a1) - sig.log_magnitude)


def cycle_count_bound(D_len: float, eps: LogValue, b: LogValue) -> LogLogValue:
    """exp(2 D_len / epsilon) * b as a LogLogValue.

    loglog = log(2 D_len) - log(epsilon) + log(1 + log(b) / (2 D_len / epsilon)),
    the honest log-log of the counting formula's value.  The correction term
    is clamped to zero when its relative contribution is below 1e-15 (it is
    utterly negligible whenever 2 D_len / epsilon >> log b).
    """
    if D_len < 0:
        raise ValueError(f"segment length must be nonnegative, got {D_len}")
    if D_len == 0:
        raise ValueError("degenerate segment (D_len = 0): no cycles to count")
    if eps.zero_flag:
        raise ValueError("epsilon must be positive")
    if b.zero_flag:
        raise ValueError("index factor must be positive")

    main = math.log(2.0 * D_len) - eps.log_magnitude
    # correction argument: log(b) * epsilon / (2 D_len), assembled via exp of logs
    scale = eps.log_magnitude - math.log(2.0 * D_len)
    corr_arg = b.log_magnitude * math.exp(scale) if scale > -745.0 else 0.0
    if corr_arg <= -1.0:
        raise ValueError("count bound degenerates to <= 1; no log-log form exists")
    corr = 0.0 if abs(corr_arg) < 1e-15 else math.log1p(corr_arg)
    return LogLogValue(main + corr)


def final_bound(p: SystemParams, sigma_lv: LogValue | None = None) -> LogLogValue:
    """The headline bound on the number of limit cycles inside B_R.

    Returned magnitude m is the log of the bound's inner exponent
    A = 38400 C^4 n^2 R^{n+1} (R+2)^{n+1} / (|a1|^3 (2-|a1|)^2) * e^{16 pi/(2-|a1|)},
    i.e. the certified count bound equals exp(exp(A)) = exp(exp(exp(m))).
    m ~ 71.05 at (n=2, C=4, a1=1, R=1).

    The closed form is re-derived through the chained proof form
    600 C^2 n^2 R^{n+1} (R+2)^{n+1} / (|a1| sigma^2) and the two must agree to
    1e-9 relative; disagreement raises ConsistencyError.  With an overridden
    (uncertified) sigma only the chained form is meaningful and is returned
    without the closed-form cross-check.
    """
    a = p.abs_a1
    shared = (
        2.0 * math.log(p.n)
        + (p.n + 1) * (math.log(p.R) + math.log(p.R + 2.0))
    )
    sig = _resolve_sigma(p, sigma_lv)
    chained = (
        math.log(FINAL_CHAIN_FACTOR)
        + 2.0 * math.log(p.C)
        + shared
        - math.log(a)
        - 2.0 * sig.log_magnitude
    )
    if sigma_lv is not None:
        return LogLogValue(chained)

    closed = (
        math.log(FINAL_CLOSED_FACTOR)
        + 4.0 * math.log(p.C)
        + shared
        - 3.0 * math.log(a)
        - 2.0 * math.log(2.0 - a)
        + FINAL_DOUBLE_TURN_COST / (2.0 - a)
    )
    if abs(closed - chained) > 1e-9 * abs(closed):
        raise ConsistencyError(
            f"final bound closed form {closed!r} disagrees with chained form {chained!r}"
        )
    return LogLogValue(closed)


@dataclass(frozen=True)
class BoundReport:
    """Every intermediate quantity of the chain plus the final bound.

    ``certified`` is False when sigma was overridden for experimentation; the
    downstream quantities are then recomputed from the override and none of
    them is a proved bound.
    """

    params: SystemParams
    sigma: LogValue
    omega: LogValue
    alpha: LogValue
    mu: float
    L_lip: float
    t_max_bound: LogValue
    delta: LogValue
    lambda_: LogValue
    epsilon: LogValue
    bernstein: LogValue
    final_bound: LogLogValue
    certified: bool = True
    sigma_override: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "params": self.params.to_dict(),
            "certified": self.certified,
            "sigma_override": self.sigma_override,
            "sigma": self.sigma.to_dict(),
            "omega": self.omega.to_dict(),
            "alpha": self.alpha.to_dict(),
            "mu": self.mu,
            "L_lip": self.L_lip,
            "t_max_bound": self.t_max_bound.to_dict(),
            "delta": self.delta.to_dict(),
            "lambda": self.lambda_.to_dict(),
            "epsilon": self.epsilon.to_dict(),
            "bernstein": self.bernstein.to_dict(),
            "final_bound": self.final_bound.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BoundReport":
        return cls(
            params=SystemParams.from_dict(d["params"]),
            sigma=LogValue.from_dict(d["sigma"]),
            omega=LogValue.from_dict(d["omega"]),
            alpha=LogValue.from_dict(d["alpha"]),
            mu=float(d["mu"]),
            L_lip=float(d["L_lip"]),
            t_max_bound=LogValue.from_dict(d["t_max_bound"]),
            delta=LogValue.from_dict(d["delta"]),
            lambda_=LogValue.from_dict(d["lambda"]),
            epsilon=LogValue.from_dict(d["epsilon"]),
            bernstein=LogValue.from_dict(d["bernstein"]),
            final_bound=LogLogValue.from_dict(d["final_bound"]),
            certified=bool(d.get("certified", True)),
            sigma_override=d.get("sigma_override"),
        )


def compute_bound_report(
    p: SystemParams, sigma_override: float | None = None
) -> BoundReport:
    """Assemble the full chain; re-derives and asserts the internal identities.

    With ``sigma_override`` the trap radius is replaced by the given value,
    every downstream quantity is recomputed from it, and the report is marked
    uncertified (useful when the certified sigma is too small to visualize).
    """
    if sigma_override is not None:
        if not (math.isfinite(sigma_override) and sigma_override > 0):
            raise ValueError(f"sigma override must be positive, got {sigma_override}")
        sig = LogValue.of(sigma_override)
        certified = False
    else:
        sig = trap_radius(p)
        certified = True
        # closing identity of the trap-radius construction:
        # sigma * e^{8 pi/(2-|a1|)} = |a1|(2-|a1|)/(8C) <= (2-|a1|)/(4C)
        a = p.abs_a1
        lhs = sig.log_magnitude + TRAP_TURN_COST / (2.0 - a)
        rhs = math.log(a) + math.log(2.0 - a) - math.log(8.0 * p.C)
        if abs(lhs - rhs) > 1e-12 * max(abs(rhs), 1.0):
            raise ConsistencyError(f"trap-radius identity failed: {lhs!r} vs {rhs!r}")
        cap = math.log(2.0 - a) - math.log(4.0 * p.C)
        if lhs > cap + 1e-12 * max(abs(cap), 1.0):
            raise ConsistencyError("trap radius exceeds its certified cap")

    omega, alpha = strip_widths(p, sig)
    mu, L = velocity_bounds(p)
    assert mu >= 1.0, "velocity bound below 1 is impossible for R > 0, n >= 2"
    t_max = transit_time_bound(p, sig)
    epsilon, delta, lam = analytic_widths(p, sig)

    # the square roots must halve logs exactly
    if lam.log_magnitude * 2.0 != delta.log_magnitude or delta.log_magnitude * 2.0 != epsilon.log_magnitude:
        raise ConsistencyError("log halving of the width chain is not exact")

    bern = index_bound(p, sig)
    final = final_bound(p, sigma_lv=None if certified else sig)

    return BoundReport(
        params=p,
        sigma=sig,
        omega=omega,
        alpha=alpha,
        mu=mu,
        L_lip=L,
        t_max_bound=t_max,
        delta=delta,
        lambda_=lam,
        epsilon=epsilon,
        bernstein=bern,
        final_bound=final,
        certified=certified,
        sigma_override=sigma_override,
    )
