"""Bound chain against 50-digit reference values and its internal identities.

Reference values were computed with mpmath at 50 significant digits via
tests/oracles.py::oracle_bound_chain and frozen here.
"""

import math

import pytest

from lienard_lab.bounds import (
    BoundRangeError,
    BoundReport,
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
from lienard_lab.logspace import LogValue
from lienard_lab.serialize import canonical_json

# frozen 50-digit chain at (n=2, C=4, a1=1, R=1)
SPOT = SystemParams(n=2, C=4.0, a1=1.0, R=1.0)
LOG_SIGMA = -28.598477131518074
LOG_OMEGA = -31.083383781306072
LOG_ALPHA = -34.5491196841058
LOG_T_MAX = 35.97623603974594
LOG_EPS = -4.546786346621061e17
LOG_BERN = 29.69708942018618
LOGLOG_FINAL = 71.0486038676163


def test_trap_radius_spot_value():
    assert trap_radius(SPOT).log_magnitude == pytest.approx(LOG_SIGMA, rel=1e-14)
    assert trap_radius(SPOT).to_float() == pytest.approx(3.8004864716904089e-13, rel=1e-12)


def test_trap_radius_closing_identity():
    """sigma * e^{8 pi/(2-|a1|)} recovers |a1|(2-|a1|)/(8C) and stays below the cap."""
    for a1 in (1.0, -1.0, 0.3, 1.9, -0.11):
        p = SystemParams(n=2, C=4.0, a1=a1, R=1.0)
        sig = trap_radius(p)
        a = abs(a1)
        lhs = sig.log_magnitude + 8.0 * math.pi / (2.0 - a)
        rhs = math.log(a * (2.0 - a) / (8.0 * p.C))
        assert lhs == pytest.approx(rhs, rel=1e-12)
        cap = math.log((2.0 - a) / (4.0 * p.C))
        assert lhs <= cap + 1e-12 * abs(cap)


def test_strip_widths_spot_values():
    omega, alpha = strip_widths(SPOT)
    assert omega.log_magnitude == pytest.approx(LOG_OMEGA, rel=1e-14)
    assert alpha.log_magnitude == pytest.approx(LOG_ALPHA, rel=1e-14)
    assert omega.to_float() == pytest.approx(3.1670720597420074e-14, rel=1e-12)
    assert alpha.to_float() == pytest.approx(9.8971001866937731e-16, rel=1e-12)


def test_velocity_bounds_examples():
    assert velocity_bounds(SPOT) == (27.0, 54.0)
    assert velocity_bound_values(2, 0.0) == (12.0, 24.0)
    log_mu, log_L = velocity_bounds_log(SPOT)
    assert log_mu.to_float() == pytest.approx(27.0, rel=1e-14)
    assert log_L.to_float() == pytest.approx(54.0, rel=1e-14)


def test_velocity_bounds_overflow_path():
    with pytest.raises(OverflowError):
        velocity_bound_values(100000, 1e5)
    p = SystemParams(n=100000, C=4.0, a1=1.0, R=1e5)
    log_mu, _ = velocity_bounds_log(p)
    assert log_mu.log_magnitude == pytest.approx(
        math.log(3.0) + 100000 * math.log(1e5 + 2.0), rel=1e-14
    )


def test_transit_time_spot_value():
    t = transit_time_bound(SPOT)
    assert t.log_magnitude == pytest.approx(LOG_T_MAX, rel=1e-14)
    assert t.to_float() == pytest.approx(4209987357982463.8, rel=1e-12)


def test_analytic_widths_spot_and_exact_halving():
    eps, delta, lam = analytic_widths(SPOT)
    assert eps.log_magnitude == pytest.approx(LOG_EPS, rel=1e-13)
    assert delta.log_magnitude * 2.0 == eps.log_magnitude
    assert lam.log_magnitude * 2.0 == delta.log_magnitude


def test_delta_equals_exp_minus_LT():
    """log(-log delta) must coincide with log(L) + log(T): 150 = 6 * 25."""
    for a1, n, R in ((1.0, 2, 1.0), (-0.5, 4, 2.0), (1.9, 2, 1.0), (0.25, 6, 0.5)):
        p = SystemParams(n=n, C=4.0, a1=a1, R=R)
        _, delta, _ = analytic_widths(p)
        log_L = velocity_bounds_log(p)[1].log_magnitude
        log_T = transit_time_bound(p).log_magnitude
        lhs = math.log(-delta.log_magnitude)
        assert lhs == pytest.approx(log_L + log_T, rel=1e-12)
        assert lhs <= log_L + log_T + 1e-12 * abs(log_T)


def test_analytic_widths_range_error_near_focus_limit():
    p = SystemParams(n=2, C=4.0, a1=1.999, R=1.0)
    with pytest.raises(BoundRangeError):
        analytic_widths(p)


def test_index_bound_spot_value():
    b = index_bound(SPOT)
    assert b.log_magnitude == pytest.approx(LOG_BERN, rel=1e-14)
    assert b.to_float() == pytest.approx(7893726296217.12, rel=1e-12)


def test_cycle_count_bound_unit_examples():
    # 2 D/eps = 2, b = 1: count bound e^2, loglog = log 2
    r = cycle_count_bound(1.0, LogValue.one(), LogValue.one())
    assert r.loglog_magnitude == pytest.approx(math.log(2.0), rel=1e-15)
    # b = e contributes exactly +1 to the exponent: loglog = log 3
    r2 = cycle_count_bound(1.0, LogValue.one(), LogValue.of(math.e))
    assert r2.loglog_magnitude == pytest.approx(math.log(3.0), rel=1e-14)


def test_cycle_count_bound_paper_scale():
    eps, _, _ = analytic_widths(SPOT)
    b = index_bound(SPOT)
    r = cycle_count_bound(1.0, eps, b)
    # the correction term is ~1e-17 relative: the count's loglog is -log eps + log 2
    assert r.loglog_magnitude == pytest.approx(math.log(2.0) - LOG_EPS, rel=1e-13)


def test_cycle_count_bound_degenerate_inputs():
    with pytest.raises(ValueError):
        cycle_count_bound(0.0, LogValue.one(), LogValue.one())
    with pytest.raises(ValueError):
        cycle_count_bound(-1.0, LogValue.one(), LogValue.one())
    with pytest.raises(ValueError):
        cycle_count_bound(1.0, LogValue.zero(), LogValue.one())
    with pytest.raises(ValueError):
        cycle_count_bound(1.0, LogValue.one(), LogValue.zero())


def test_final_bound_spot_value():
    assert final_bound(SPOT).loglog_magnitude == pytest.approx(LOGLOG_FINAL, rel=1e-13)


def test_final_bound_closed_equals_chained():
    """38400 = 600 * 64: the closed form must re-derive through sigma^2."""
    for a1, n, R, C in ((1.0, 2, 1.0, 4.0), (-1.3, 4, 2.0, 5.0), (0.2, 6, 0.7, 4.0)):
        p = SystemParams(n=n, C=C, a1=a1, R=R)
        closed = final_bound(p).loglog_magnitude
        sig = trap_radius(p)
        chained = (
            math.log(600.0)
            + 2 * math.log(C)
            + 2 * math.log(n)
            + (n + 1) * (math.log(R) + math.log(R + 2.0))
            - math.log(abs(a1))
            - 2 * sig.log_magnitude
        )
        assert closed == pytest.approx(chained, rel=1e-12)


def test_system_params_validation():
    with pytest.raises(ValueError, match="even"):
        SystemParams(n=3, C=4.0, a1=1.0, R=1.0)
    with pytest.raises(ValueError):
        SystemParams(n=2, C=3.0, a1=1.0, R=1.0)
    with pytest.raises(ValueError):
        SystemParams(n=2, C=4.0, a1=0.0, R=1.0)
    with pytest.raises(ValueError):
        SystemParams(n=2, C=4.0, a1=2.0, R=1.0)
    with pytest.raises(ValueError):
        SystemParams(n=2, C=4.0, a1=1.0, R=0.0)
    with pytest.raises(ValueError):
        SystemParams(n=2.0, C=4.0, a1=1.0, R=1.0)  # n must be an int, not a float


def test_report_round_trip_and_canonical_bytes():
    rep = compute_bound_report(SPOT)
    d = rep.to_dict()
    assert d["schema_version"] == 1
    assert "lambda" in d and "lambda_" not in d
    assert BoundReport.from_dict(d) == rep
    assert canonical_json(d) == canonical_json(compute_bound_report(SPOT).to_dict())


def test_sigma_override_marks_uncertified():
    rep = compute_bound_report(SPOT, sigma_override=1e-3)
    assert not rep.certified
    assert rep.sigma.to_float() == pytest.approx(1e-3, rel=1e-15)
    # delta = e^{-LT} holds for any sigma since both sides scale identically
    lhs = math.log(-rep.delta.log_magnitude)
    rhs = math.log(rep.L_lip) + rep.t_max_bound.log_magnitude
    assert lhs == pytest.approx(rhs, rel=1e-12)
    # the final bound shrinks dramatically with the larger radius
    assert rep.final_bound.loglog_magnitude < LOGLOG_FINAL
    with pytest.raises(ValueError):
        compute_bound_report(SPOT, sigma_override=-1.0)


def test_report_all_log_quantities_are_consistent():
    rep = compute_bound_report(SPOT)
    assert rep.omega.log_magnitude == pytest.approx(
        rep.sigma.log_magnitude - math.log(12.0), rel=1e-14
    )
    assert rep.L_lip == 2.0 * rep.mu
    assert rep.epsilon < rep.delta < rep.lambda_ < rep.sigma
