"""Log- and log-log-space arithmetic: exactness, ordering, serialization."""

import math

import pytest
from hypothesis import given, strategies as st

from lienard_lab.logspace import LogLogValue, LogValue


def test_of_and_to_float_round_trip():
    # exp(log(v)) loses up to ~|log v| * eps of relative accuracy at the
    # extremes of the double range, so the tolerance scales accordingly.
    for v in (1.0, 2.5, 1e-300, 1e300, 3.8004864716904176e-13):
        assert LogValue.of(v).to_float() == pytest.approx(v, rel=1e-13)


def test_zero_is_normalized_and_absorbing():
    z = LogValue.zero()
    assert z.zero_flag and z.log_magnitude == 0.0
    assert LogValue.of(0.0) == z
    assert (z * LogValue.of(5.0)) == z
    assert z.to_float() == 0.0


def test_nonfinite_log_rejected():
    with pytest.raises(ValueError):
        LogValue(math.inf)
    with pytest.raises(ValueError):
        LogValue(math.nan)
    with pytest.raises(ValueError):
        LogValue.of(-1.0)


def test_mul_div_are_log_exact():
    a = LogValue.from_log(-100.0)
    b = LogValue.from_log(40.0)
    assert (a * b).log_magnitude == -60.0
    assert (a / b).log_magnitude == -140.0
    with pytest.raises(ZeroDivisionError):
        a / LogValue.zero()


def test_pow_rules():
    a = LogValue.from_log(-3.0)
    assert (a**2).log_magnitude == -6.0
    assert (a**0.5).log_magnitude == -1.5
    assert (LogValue.zero() ** 0) == LogValue.one()
    assert (LogValue.zero() ** 3) == LogValue.zero()
    with pytest.raises(ZeroDivisionError):
        LogValue.zero() ** -1


def test_add_is_logsumexp():
    a = LogValue.of(3.0)
    b = LogValue.of(4.0)
    assert (a + b).to_float() == pytest.approx(7.0, rel=1e-15)
    # adding something 1e300 times smaller leaves the log unchanged
    tiny = LogValue.from_log(a.log_magnitude - 700.0)
    assert (a + tiny).log_magnitude == a.log_magnitude
    assert (LogValue.zero() + b) == b


def test_ordering_with_zero_and_deep_underflow():
    vals = [LogValue.zero(), LogValue.from_log(-1e18), LogValue.from_log(-5.0), LogValue.one()]
    assert vals == sorted(vals)
    assert LogValue.zero() < LogValue.from_log(-4.6e17)
    assert not (LogValue.zero() < LogValue.zero())


def test_to_float_saturates():
    assert LogValue.from_log(-800.0).to_float() == 0.0
    assert LogValue.from_log(800.0).to_float() == math.inf


def test_human_switches_representation():
    assert LogValue.of(2.0).human() == "2"
    assert "exp(" in LogValue.from_log(-4.5e17).human()


def test_dict_round_trip():
    for v in (LogValue.zero(), LogValue.from_log(-4.546786346621061e17), LogValue.of(2.0)):
        assert LogValue.from_dict(v.to_dict()) == v
    # pydantic emits the default zero flag explicitly
    assert LogValue.from_dict({"log": -1.0, "zero": False}) == LogValue.from_log(-1.0)


def test_loglog_construction_and_ordering():
    q = LogLogValue.from_value(100.0)
    assert q.loglog_magnitude == pytest.approx(math.log(math.log(100.0)))
    with pytest.raises(ValueError):
        LogLogValue.from_value(1.0)
    with pytest.raises(ValueError):
        LogLogValue.from_log(0.0)
    a = LogLogValue(71.05)
    b = LogLogValue(4.5e17)
    assert a < b
    assert "exp(exp(" in b.human()


def test_loglog_log_value_bridge():
    q = LogLogValue(math.log(5.0))  # value e^5
    assert q.log_value().log_magnitude == pytest.approx(5.0, rel=1e-15)
    with pytest.raises(OverflowError):
        LogLogValue(4.5e17).log_value()


def test_loglog_dict_round_trip():
    q = LogLogValue(71.048603867616292)
    assert LogLogValue.from_dict(q.to_dict()) == q


_logs = st.floats(min_value=-1e15, max_value=700.0, allow_nan=False)


@given(_logs, _logs)
def test_mul_commutes(la, lb):
    a, b = LogValue.from_log(la), LogValue.from_log(lb)
    assert (a * b).log_magnitude == (b * a).log_magnitude


@given(_logs, _logs)
def test_add_commutes_and_dominates(la, lb):
    a, b = LogValue.from_log(la), LogValue.from_log(lb)
    s1, s2 = a + b, b + a
    assert s1.log_magnitude == s2.log_magnitude
    assert s1 >= a and s1 >= b


@given(_logs, _logs)
def test_ordering_matches_logs(la, lb):
    a, b = LogValue.from_log(la), LogValue.from_log(lb)
    assert (a < b) == (la < lb)
    assert (a == b) == (la == lb)


@given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False))
def test_of_matches_math_log(v):
    assert LogValue.of(v).log_magnitude == math.log(v)
