"""Ordered integration domains and their quadrature grids.

Three concrete domain variants are supported:

* ``Interval1D`` -- a non-degenerate real interval with the ordinary order;
* ``ProductBox`` -- a Cartesian product of intervals with the componentwise
  order;
* ``VoidSet`` -- an abstract set on which every pair of points is related
  (the Fredholm case); its points are supplied by a discrete measure.

``lower_set(domain, t)`` returns the set of points below ``t``, which is the
integration region of every Volterra-type operator in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

__all__ = [
    "Interval1D",
    "ProductBox",
    "VoidSet",
    "DomainSpec",
    "OutsideDomainError",
    "leq",
    "contains",
    "lower_set",
    "QuadratureGrid",
]


class OutsideDomainError(ValueError):
    """A point does not belong to the domain it was used with."""


@dataclass(frozen=True)
class Interval1D:
    """Non-degenerate interval [lo, hi] with the ordinary order."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class ProductBox:
    """Product of intervals with the componentwise (partial) order."""

    factors: Tuple[Interval1D, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) < 1:
            raise ValueError("ProductBox needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def ndim(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class VoidSet:
    """A set with the void preorder: every point is below every other."""

    label: str = "void"


DomainSpec = Union[Interval1D, ProductBox, VoidSet]


def leq(domain: DomainSpec, s, t) -> bool:
    """Whether ``s <= t`` in the domain's preorder."""
    if isinstance(domain, Interval1D):
        return float(s) <= float(t)
    if isinstance(domain, ProductBox):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if s.shape != (domain.ndim,) or t.shape != (domain.ndim,):
            raise ValueError("point dimension does not match the box")
        return bool(np.all(s <= t))
    if isinstance(domain, VoidSet):
        return True
    raise TypeError(f"not a domain: {domain!r}")


def contains(domain: DomainSpec, t) -> bool:
    if isinstance(domain, Interval1D):
        return domain.lo <= float(t) <= domain.hi
    if isinstance(domain, ProductBox):
        t = np.asarray(t, dtype=float)
        if t.shape != (domain.ndim,):
            return False
        return all(f.lo <= x <= f.hi for f, x in zip(domain.factors, t))
    if isinstance(domain, VoidSet):
        return True
    raise TypeError(f"not a domain: {domain!r}")


def lower_set(domain: DomainSpec, t) -> DomainSpec:
    """The set of points ``s`` with ``s <= t``.

    For intervals this is ``[lo, t]``, for boxes the sub-box
    ``[lo_1, t_1] x ... x [lo_m, t_m]``, and for a void-ordered set the
    whole set.

    Raises
    ------
    OutsideDomainError
        If ``t`` does not lie in the domain.
    """
    if not contains(domain, t):
        raise OutsideDomainError(f"point {t!r} outside domain {domain!r}")
    if isinstance(domain, Interval1D):
        return Interval1D(domain.lo, float(t))
    if isinstance(domain, ProductBox):
        t = np.asarray(t, dtype=float)
        return ProductBox(
            tuple(Interval1D(f.lo, x) for f, x in zip(domain.factors, t))
        )
    return domain


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform dyadic grid on an interval or box.

    ``axes`` holds one strictly increasing node array per axis, endpoints
    included; ``level`` is the dyadic refinement index (2**level panels per
    axis).
    """

    axes: Tuple[np.ndarray, ...]
    level: int
    scheme: str = "composite-gl"

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        for a in axes:
            if a.ndim != 1 or not np.all(np.diff(a) > 0):
                raise ValueError("grid nodes must be strictly increasing per axis")
        object.__setattr__(self, "axes", axes)

    @property
    def nodes(self) -> np.ndarray:
        """Node array of a one-dimensional grid."""
        if len(self.axes) != 1:
            raise ValueError("grid is not one-dimensional")
        return self.axes[0]

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @staticmethod
    def for_interval(interval: Interval1D, level: int) -> "QuadratureGrid":
        if level < 1:
            raise ValueError("grid level must be >= 1")
        n = 2**level
        nodes = np.linspace(interval.lo, interval.hi, n + 1)
        return QuadratureGrid(axes=(nodes,), level=level)

    @staticmethod
    def for_box(box: ProductBox, level: int) -> "QuadratureGrid":
        if level < 1:
            raise ValueError("grid level must be >= 1")
        n = 2**level
        axes = tuple(np.linspace(f.lo, f.hi, n + 1) for f in box.factors)
        return QuadratureGrid(axes=axes, level=level)

    @staticmethod
    def for_points(points: Sequence[float]) -> "QuadratureGrid":
        """Grid over explicitly given nodes (e.g. atoms of a discrete measure)."""
        nodes = np.sort(np.asarray(list(points), dtype=float))
        return QuadratureGrid(axes=(nodes,), level=0, scheme="points")

    def refine(self) -> "QuadratureGrid":
        """Grid with every panel split in two (nodes are preserved)."""
        new_axes = []
        for a in self.axes:
            mid = 0.5 * (a[:-1] + a[1:])
            merged = np.empty(2 * a.size - 1)
            merged[0::2] = a
            merged[1::2] = mid
            new_axes.append(merged)
        return QuadratureGrid(axes=tuple(new_axes), level=self.level + 1,
                              scheme=self.scheme)
