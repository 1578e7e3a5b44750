"""Probabilities carried as natural logarithms.

Visit probabilities decay like exp(-pi sqrt(2n/3)) while partition counts grow
at the reciprocal rate, so numerators and denominators of the transition laws
overflow doubles long before their ratios stop being ordinary probabilities.
LogProb is the currency used for every probability that crosses a module
boundary: products, ratios and log-sum-exp additions stay closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["LogProb"]


@dataclass(frozen=True)
class LogProb:
    """A non-negative quantity stored as its natural log (with an exact zero)."""

    log_value: float = 0.0
    is_zero: bool = False

    @staticmethod
    def zero() -> "LogProb":
        return LogProb(-math.inf, True)

    @staticmethod
    def one() -> "LogProb":
        return LogProb(0.0)

    @staticmethod
    def from_value(x: float) -> "LogProb":
        if x < 0:
            raise ValueError("LogProb cannot represent negative values")
        if x == 0:
            return LogProb.zero()
        return LogProb(math.log(x))

    @staticmethod
    def from_log(lx: float) -> "LogProb":
        if lx == -math.inf:
            return LogProb.zero()
        return LogProb(lx)

    @property
    def value(self) -> float:
        """exp(log_value); may underflow to 0.0 for display purposes."""
        if self.is_zero:
            return 0.0
        return math.exp(self.log_value)

    def __mul__(self, other: "LogProb") -> "LogProb":
        if self.is_zero or other.is_zero:
            return LogProb.zero()
        return LogProb(self.log_value + other.log_value)

    def __truediv__(self, other: "LogProb") -> "LogProb":
        if other.is_zero:
            raise ZeroDivisionError("division by zero LogProb")
        if self.is_zero:
            return LogProb.zero()
        return LogProb(self.log_value - other.log_value)

    def __add__(self, other: "LogProb") -> "LogProb":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi = max(self.log_value, other.log_value)
        lo = min(self.log_value, other.log_value)
        return LogProb(hi + math.log1p(math.exp(lo - hi)))

    def __pow__(self, k: float) -> "LogProb":
        if self.is_zero:
            return LogProb.zero() if k > 0 else LogProb.one()
        return LogProb(k * self.log_value)

    # comparisons are by value, which is monotone in the log
    def __lt__(self, other: "LogProb") -> bool:
        if self.is_zero:
            return not other.is_zero
        if other.is_zero:
            return False
        return self.log_value < other.log_value

    def __le__(self, other: "LogProb") -> bool:
        return self < other or self == other

    def __float__(self) -> float:
        return self.value
