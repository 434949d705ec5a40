"""Nonnegative extended reals with measure-theoretic arithmetic.

``ExtReal`` is the common codomain of kernels, series values and bound
curves: a finite nonnegative float or the distinguished value infinity.
Arithmetic saturates at infinity and follows the measure-theoretic
convention ``0 * inf == 0`` (raw IEEE floats give ``nan`` there, which is
exactly what this class exists to rule out).

Grid-valued quantities elsewhere in the package are plain float64 arrays
in which ``np.inf`` encodes infinity; this class is the scalar boundary
type where the conventions have to be enforced explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

__all__ = ["ExtReal", "INF"]

_Number = Union[int, float, "ExtReal"]


@dataclass(frozen=True, slots=True)
class ExtReal:
    """A nonnegative real number or infinity. Never NaN, never negative."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        if v < 0.0:
            raise ValueError(f"ExtReal cannot hold negative value {v!r}")
        object.__setattr__(self, "value", v)

    # -- predicates ------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    # -- conversions -----------------------------------------------------

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return "ExtReal(inf)" if self.is_infinite else f"ExtReal({self.value!r})"

    @staticmethod
    def _coerce(x: _Number) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        return ExtReal(float(x))

    # -- arithmetic (saturating, 0*inf == 0) -------------------------------

    def __add__(self, other: _Number) -> "ExtReal":
        other = self._coerce(other)
        return ExtReal(self.value + other.value)

    __radd__ = __add__

    def __mul__(self, other: _Number) -> "ExtReal":
        other = self._coerce(other)
        a, b = self.value, other.value
        # the measure-theoretic convention: 0 * inf = 0
        if a == 0.0 or b == 0.0:
            return ExtReal(0.0)
        return ExtReal(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: _Number) -> "ExtReal":
        other = self._coerce(other)
        a, b = self.value, other.value
        if b == 0.0:
            if a == 0.0:
                raise ZeroDivisionError("0/0 is undefined for ExtReal")
            return ExtReal(math.inf)
        if math.isinf(a) and math.isinf(b):
            raise ZeroDivisionError("inf/inf is undefined for ExtReal")
        if math.isinf(b):
            return ExtReal(0.0)
        return ExtReal(a / b)

    def __pow__(self, exponent: float) -> "ExtReal":
        e = float(exponent)
        if self.is_infinite:
            if e == 0.0:
                return ExtReal(1.0)
            return ExtReal(math.inf) if e > 0 else ExtReal(0.0)
        if self.value == 0.0 and e < 0:
            return ExtReal(math.inf)
        return ExtReal(self.value**e)

    def root(self, p: float) -> "ExtReal":
        """p-th root; the root of infinity is infinity."""
        if p <= 0:
            raise ValueError("root order must be positive")
        return self ** (1.0 / p)

    # -- order -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, ExtReal)):
            return self.value == float(self._coerce(other).value)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __lt__(self, other: _Number) -> bool:
        return self.value < self._coerce(other).value

    def __le__(self, other: _Number) -> bool:
        return self.value <= self._coerce(other).value

    def __gt__(self, other: _Number) -> bool:
        return self.value > self._coerce(other).value

    def __ge__(self, other: _Number) -> bool:
        return self.value >= self._coerce(other).value


INF = ExtReal(math.inf)
