"""Arithmetic on quantities stored as (iterated) logarithms.

The bound chain manufactures positive reals far outside hardware-float range:
the analytic-extension width is exp(-4.5e17) at typical parameters and the
final cycle-count bound is a double exponential.  ``LogValue`` carries
``log(q)`` for a nonnegative real ``q`` and supports exactly the operations
the bound formulas need (multiply, divide, power, total ordering) without
ever materializing ``q``.  ``LogLogValue`` carries one more log level for the
counting formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

__all__ = ["LogValue", "LogLogValue"]

# exp() overflows above ~709.78 and underflows below ~-745; outside a slightly
# narrower window we refuse to pretty-print a materialized value.
_PRINTABLE_LOG = 690.0


@dataclass(frozen=True, slots=True)
class LogValue:
    """A nonnegative real stored as its natural log.

    ``log_magnitude`` is log(q) for q > 0; ``zero_flag`` marks an exact zero
    (in which case ``log_magnitude`` is ignored and normalized to 0.0).
    Multiplication adds logs exactly, powers scale them exactly, and the
    ordering is total: 0 sorts below every positive quantity.
    """

    log_magnitude: float
    zero_flag: bool = False

    def __post_init__(self) -> None:
        if self.zero_flag:
            object.__setattr__(self, "log_magnitude", 0.0)
        elif not math.isfinite(self.log_magnitude):
            raise ValueError(f"non-finite log magnitude: {self.log_magnitude}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def of(cls, value: float) -> "LogValue":
        """Build from a plain nonnegative real."""
        if value < 0:
            raise ValueError(f"LogValue requires a nonnegative real, got {value}")
        if value == 0:
            return cls(0.0, zero_flag=True)
        return cls(math.log(value))

    @classmethod
    def from_log(cls, log_magnitude: float) -> "LogValue":
        return cls(log_magnitude)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0.0, zero_flag=True)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(0.0)

    # -- arithmetic ---------------------------------------------------------

    def __mul__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        if self.zero_flag or other.zero_flag:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.zero_flag:
            raise ZeroDivisionError("division by LogValue zero")
        if self.zero_flag:
            return LogValue.zero()
        return LogValue(self.log_magnitude - other.log_magnitude)

    def __pow__(self, exponent: float) -> "LogValue":
        if self.zero_flag:
            if exponent > 0:
                return LogValue.zero()
            if exponent == 0:
                return LogValue.one()
            raise ZeroDivisionError("0 raised to a negative power")
        return LogValue(self.log_magnitude * exponent)

    def __add__(self, other: "LogValue") -> "LogValue":
        """log-sum-exp addition; exact when either side is zero."""
        if not isinstance(other, LogValue):
            return NotImplemented
        if self.zero_flag:
            return other
        if other.zero_flag:
            return self
        hi, lo = self.log_magnitude, other.log_magnitude
        if hi < lo:
            hi, lo = lo, hi
        return LogValue(hi + math.log1p(math.exp(lo - hi)))

    # -- ordering -----------------------------------------------------------

    def _key(self) -> tuple[int, float]:
        return (0, 0.0) if self.zero_flag else (1, self.log_magnitude)

    def __lt__(self, other: "LogValue") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "LogValue") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "LogValue") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "LogValue") -> bool:
        return self._key() >= other._key()

    # -- materialization / display ------------------------------------------

    def to_float(self) -> float:
        """Best-effort float: 0.0 for zero, inf on overflow, 0.0 on underflow."""
        if self.zero_flag:
            return 0.0
        try:
            return math.exp(self.log_magnitude)
        except OverflowError:
            return math.inf

    def human(self) -> str:
        """Short display string; never materializes out-of-range quantities."""
        if self.zero_flag:
            return "0"
        if abs(self.log_magnitude) < _PRINTABLE_LOG:
            return f"{math.exp(self.log_magnitude):.6g}"
        return f"exp({self.log_magnitude:.6g})"

    def __str__(self) -> str:
        return self.human()

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        if self.zero_flag:
            return {"log": None, "zero": True}
        return {"log": self.log_magnitude}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LogValue":
        if d.get("zero"):
            return cls.zero()
        return cls(float(d["log"]))


@dataclass(frozen=True, slots=True)
class LogLogValue:
    """A quantity stored as the log of its log: q = exp(exp(loglog_magnitude)).

    Used for count bounds of the shape exp(huge): their log is itself out of
    float range, so one more log level is stored.  Ordering compares the
    stored magnitudes, which is the ordering of the represented quantities.
    """

    loglog_magnitude: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.loglog_magnitude):
            raise ValueError(f"non-finite loglog magnitude: {self.loglog_magnitude}")

    @classmethod
    def from_log(cls, log_magnitude: float) -> "LogLogValue":
        """Build from log(q); requires log(q) > 0 (i.e. q > 1)."""
        if log_magnitude <= 0:
            raise ValueError(f"log-log form needs log(q) > 0, got {log_magnitude}")
        return cls(math.log(log_magnitude))

    @classmethod
    def from_value(cls, value: float) -> "LogLogValue":
        if value <= 1.0:
            raise ValueError(f"log-log form needs q > 1, got {value}")
        return cls(math.log(math.log(value)))

    def log_value(self) -> LogValue:
        """The log of the represented quantity, as a LogValue (may overflow)."""
        try:
            return LogValue(math.exp(self.loglog_magnitude))
        except OverflowError as exc:
            raise OverflowError(
                "log of this quantity exceeds float range; keep it in log-log form"
            ) from exc

    def __lt__(self, other: "LogLogValue") -> bool:
        return self.loglog_magnitude < other.loglog_magnitude

    def __le__(self, other: "LogLogValue") -> bool:
        return self.loglog_magnitude <= other.loglog_magnitude

    def __gt__(self, other: "LogLogValue") -> bool:
        return self.loglog_magnitude > other.loglog_magnitude

    def __ge__(self, other: "LogLogValue") -> bool:
        return self.loglog_magnitude >= other.loglog_magnitude

    def human(self) -> str:
        return f"exp(exp({self.loglog_magnitude:.6g}))"

    def __str__(self) -> str:
        return self.human()

    def to_dict(self) -> dict[str, Any]:
        return {"loglog": self.loglog_magnitude}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LogLogValue":
        return cls(float(d["loglog"]))
