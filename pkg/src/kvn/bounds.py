"""Certified two-sided bounds for suprema without a closed form."""

from dataclasses import dataclass, field
import math


@dataclass(frozen=True)
class Interval:
    """A closed interval ``[lo, hi]`` certified to contain a supremum.

    ``lo`` is a value attained by an explicit point of the feasible set;
    ``hi`` is backed by a dual certificate (or a crude limit when noted in
    ``method``).
    """

    lo: float
    hi: float
    method: str = ""
    resolution: dict = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (self.lo <= self.hi or math.isclose(self.lo, self.hi, rel_tol=1e-12, abs_tol=1e-300)):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, value, rtol=0.0, atol=0.0):
        slack = atol + rtol * max(abs(self.hi), abs(value))
        return self.lo - slack <= value <= self.hi + slack

    def overlaps(self, other, rtol=0.0, atol=0.0):
        other = as_interval(other)
        slack = atol + rtol * max(abs(self.hi), abs(other.hi))
        return self.lo - slack <= other.hi and other.lo - slack <= self.hi

    def to_json(self):
        out = {"lower": self.lo, "upper": self.hi}
        if self.method:
            out["method"] = self.method
        if self.resolution:
            out["resolution"] = dict(self.resolution)
        return out

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def as_interval(value):
    if isinstance(value, Interval):
        return value
    v = float(value)
    return Interval(v, v, "exact")


def lower(value):
    return value.lo if isinstance(value, Interval) else float(value)


def upper(value):
    return value.hi if isinstance(value, Interval) else float(value)


def agree(a, b, rtol=1e-6, atol=1e-12):
    """Equality for exact values, overlap for intervals."""
    if isinstance(a, Interval) or isinstance(b, Interval):
        return as_interval(a).overlaps(b, rtol=rtol, atol=atol)
    return abs(float(a) - float(b)) <= atol + rtol * max(abs(float(a)), abs(float(b)))


def to_json(value):
    return value.to_json() if isinstance(value, Interval) else float(value)
