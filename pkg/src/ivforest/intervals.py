"""Closed bounded intervals: dual bound/center-radius views, Minkowski
arithmetic, and the metrics used everywhere else in the package.

All metrics are computed in center/radius coordinates. An interval with
lower == upper (zero radius) is a first-class value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionError, EmptySampleError, ConfigError, InvalidIntervalError


@dataclass(frozen=True)
class Interval:
    """Closed bounded interval [lower, upper] with lower <= upper."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidIntervalError(
                f"interval bounds must be finite, got [{self.lower}, {self.upper}]"
            )
        if self.lower > self.upper:
            raise InvalidIntervalError(
                f"interval lower bound {self.lower} exceeds upper bound {self.upper}"
            )

    @property
    def center(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> float:
        return 0.5 * (self.upper - self.lower)

    def __add__(self, other: "Interval") -> "Interval":
        return minkowski_add(self, other)

    def __rmul__(self, lam: float) -> "Interval":
        return scalar_mul(lam, self)

    def __iter__(self):
        yield self.lower
        yield self.upper


@dataclass(frozen=True)
class HyperInterval:
    """Ordered tuple of intervals, one per predictor dimension."""

    components: tuple[Interval, ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise DimensionError("a hyper interval needs at least one component")
        object.__setattr__(self, "components", tuple(self.components))

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Interval:
        return self.components[i]


@dataclass(frozen=True)
class WWeight:
    """Radius weight for the weighted interval distance.

    ``c_weight`` is the constant a symmetric non-degenerate weighting measure
    on [0, 1] induces on the squared radius difference; it lies in (0, 1],
    and 1 recovers the plain delta distance.
    """

    c_weight: float

    def __post_init__(self):
        if not (0.0 < self.c_weight <= 1.0) or not math.isfinite(self.c_weight):
            raise ConfigError(f"c_weight must lie in (0, 1], got {self.c_weight}")


def make_interval(lower: float, upper: float) -> Interval:
    """Build an interval from bounds; raises InvalidIntervalError if inverted."""
    return Interval(float(lower), float(upper))


def from_center_radius(c: float, r: float) -> Interval:
    """Build an interval from its center and (nonnegative) radius."""
    c = float(c)
    r = float(r)
    if not (math.isfinite(c) and math.isfinite(r)):
        raise InvalidIntervalError(f"center/radius must be finite, got ({c}, {r})")
    if r < 0.0:
        raise InvalidIntervalError(f"radius must be nonnegative, got {r}")
    return Interval(c - r, c + r)


def minkowski_add(a: Interval, b: Interval) -> Interval:
    """Elementwise set sum: bounds add."""
    return Interval(a.lower + b.lower, a.upper + b.upper)


def scalar_mul(lam: float, a: Interval) -> Interval:
    """Scale an interval; a negative factor swaps the bounds."""
    lam = float(lam)
    if lam >= 0.0:
        return Interval(lam * a.lower, lam * a.upper)
    return Interval(lam * a.upper, lam * a.lower)


def hausdorff(a: Interval, b: Interval) -> float:
    """Hausdorff distance; equals |delta center| + |delta radius|."""
    return abs(a.center - b.center) + abs(a.radius - b.radius)


def delta_distance(a: Interval, b: Interval) -> float:
    """L2 distance on intervals: sqrt(dc^2 + dr^2)."""
    return math.hypot(a.center - b.center, a.radius - b.radius)


def w_distance(a: Interval, b: Interval, w: WWeight) -> float:
    """Weighted L2 distance: sqrt(dc^2 + c_weight * dr^2)."""
    dc = a.center - b.center
    dr = a.radius - b.radius
    return math.sqrt(dc * dc + w.c_weight * dr * dr)


def hyper_distance(x: HyperInterval, y: HyperInterval) -> float:
    """Root of summed squared center and radius differences over all components."""
    if len(x) != len(y):
        raise DimensionError(f"hyper intervals have lengths {len(x)} and {len(y)}")
    total = 0.0
    for a, b in zip(x.components, y.components):
        dc = a.center - b.center
        dr = a.radius - b.radius
        total += dc * dc + dr * dr
    return math.sqrt(total)


def aumann_mean(sample: list[Interval]) -> Interval:
    """Interval whose bounds are the means of the sample bounds."""
    if len(sample) == 0:
        raise EmptySampleError("aumann_mean of an empty sample")
    n = len(sample)
    return Interval(
        sum(iv.lower for iv in sample) / n,
        sum(iv.upper for iv in sample) / n,
    )
