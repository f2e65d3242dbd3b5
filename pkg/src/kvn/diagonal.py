"""Diagonal positive operators from l1 sequences supported on ``N`` into l-infinity.

``<Ax|y> = sum_{n in N} s(n) x(n) conj(y(n))`` for finitely supported ``x``
with ``supp x`` inside ``N``.  ``N`` and ``s`` are described by an explicit
prefix plus a tail rule valid for every index past the prefix, which keeps
the three asymptotic questions decidable:

extendable
    ``|Ax|_inf^2 = sup (s |x|)^2 <= (sup s) * sum s |x|^2``, sharp on unit
    vectors, so ``M_min = sup s`` (always finite here).
compact extension
    ``{Ax : <Ax|x> <= 1}`` sits in the box ``prod {|phi_n| <= sqrt(s(n))}``
    and contains its corner sequences; a box is totally bounded in
    l-infinity iff its side lengths tend to 0, i.e. ``s(n) -> 0``.
closed range
    ``<Ax|x> <= M' |Ax|^2`` on unit vectors forces ``s >= 1/M'`` on the
    positive support; equal-mass vectors on ``m`` positive indices give
    ratio ``sum 1/s`` which is unbounded for an infinite positive support.
    Finite positive support is also sufficient.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import InvalidInput
from .extension import PartialPositiveOperator
from .normed import L1, NormedSpace

TAIL_KINDS = ("zero", "constant", "decay")


def _number(v):
    if isinstance(v, str):
        try:
            v = Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad rational {v!r}") from exc
    v = float(v)
    if not math.isfinite(v) or v < 0:
        raise InvalidInput(f"sequence values must be finite and nonnegative, got {v}")
    return v


@dataclass(frozen=True)
class Tail:
    """Rule for indices past the prefix.

    kind : "zero" | "constant" | "decay"
        ``s(n) = 0``, ``c`` or ``c / (n + 1)``.
    support : "all" | "empty"
        Whether every index past the prefix lies in ``N``.
    """

    kind: str = "zero"
    c: float = 0.0
    support: str = "all"

    def __post_init__(self):
        if self.kind not in TAIL_KINDS:
            raise InvalidInput(f"unknown tail kind {self.kind!r}")
        if self.support not in ("all", "empty"):
            raise InvalidInput(f"unknown tail support {self.support!r}")
        object.__setattr__(self, "c", _number(self.c))

    def value(self, n):
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.c
        return self.c / (n + 1)


@dataclass(frozen=True)
class DiagonalOperator:
    prefix_indices: tuple
    prefix_values: tuple
    tail: Tail = Tail()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.prefix_indices)
        vals = tuple(_number(v) for v in self.prefix_values)
        if len(idx) != len(vals):
            raise InvalidInput("prefix_indices and prefix_values differ in length")
        if any(i < 0 for i in idx) or len(set(idx)) != len(idx):
            raise InvalidInput("prefix indices must be distinct and nonnegative")
        order = np.argsort(idx, kind="stable")
        object.__setattr__(self, "prefix_indices", tuple(idx[i] for i in order))
        object.__setattr__(self, "prefix_values", tuple(vals[i] for i in order))

    @property
    def tail_start(self):
        """First index governed by the tail rule."""
        return max(self.prefix_indices) + 1 if self.prefix_indices else 0

    @property
    def infinite_support(self):
        return self.tail.support == "all"

    def in_domain(self, n):
        return n in self.prefix_indices or (n >= self.tail_start and self.infinite_support)

    def s(self, n):
        """``s(n)`` for ``n`` in ``N`` (0 off ``N``)."""
        if n in self.prefix_indices:
            return self.prefix_values[self.prefix_indices.index(n)]
        if n >= self.tail_start and self.infinite_support:
            return self.tail.value(n)
        return 0.0

    def support_below(self, n):
        """Indices of ``N`` in ``[0, n)`` with their values."""
        idx = [i for i in self.prefix_indices if i < n]
        if self.infinite_support:
            idx += list(range(self.tail_start, n))
        return idx, [self.s(i) for i in idx]

    @classmethod
    def from_json(cls, obj):
        t = dict(obj.get("tail", {"kind": "zero"}))
        tail = Tail(t.get("kind", "zero"), t.get("c", 0.0), t.get("support", "all"))
        return cls(tuple(obj.get("prefix_indices", ())), tuple(obj.get("prefix_values", ())), tail)

    def to_json(self):
        return {"prefix_indices": list(self.prefix_indices), "prefix_values": list(self.prefix_values),
                "tail": {"kind": self.tail.kind, "c": self.tail.c, "support": self.tail.support}}


def _tail_sup(d):
    if not d.infinite_support or d.tail.kind == "zero":
        return 0.0
    if d.tail.kind == "constant":
        return d.tail.c
    return d.tail.c / (d.tail_start + 1)


def is_extendable(d):
    """``(True, sup s)``; every supported tail rule has a finite supremum."""
    return True, max([_tail_sup(d), *d.prefix_values, 0.0])


def _tail_tends_to_zero(d):
    return (not d.infinite_support) or d.tail.kind in ("zero", "decay") or d.tail.c == 0


def is_compact_extension(d):
    """``s(n) -> 0`` along ``N`` (vacuous for finite ``N``)."""
    return _tail_tends_to_zero(d)


def has_closed_range_extension(d):
    """``{n in N : s(n) > 0}`` is finite."""
    return (not d.infinite_support) or d.tail.kind == "zero" or d.tail.c == 0


def truncate(d, n):
    """The first ``n`` coordinates as an operator on weighted-l1 ``C^n``."""
    if n < 1:
        raise InvalidInput("truncation size must be at least 1")
    idx, vals = d.support_below(n)
    D = np.zeros((n, len(idx)), complex)
    B = np.zeros((n, len(idx)), complex)
    for col, (i, v) in enumerate(zip(idx, vals)):
        D[i, col] = 1
        B[i, col] = v
    return PartialPositiveOperator(NormedSpace(n, L1), D, B)


# ---------------------------------------------------------------- oracles

def truncated_mprime(d, n):
    """Exact ``sup <Ax|x> / |Ax|_inf^2`` on the ``n``-truncation: ``sum 1/s`` over positive ``s``.

    With ``t_j = s_j |x_j| <= |Ax|_inf = 1`` the ratio is ``sum t_j^2 / s_j``,
    maximized by ``t = 1``.
    """
    _, vals = d.support_below(n)
    return float(sum(1.0 / v for v in vals if v > 0))


def _disc_cover(r, eps):
    # squares of side eps*sqrt(2) inscribed in eps-discs tile a disc of radius r
    if r <= eps:
        return 1
    return math.ceil(2 * r / (eps * math.sqrt(2))) ** 2


def epsilon_net_size(d, n, eps):
    """Size of an l-infinity ``eps``-net of the box containing ``{Ax : <Ax|x> <= 1}`` (n-truncation)."""
    _, vals = d.support_below(n)
    count = 1
    for v in vals:
        count *= _disc_cover(math.sqrt(v), eps)
    return count


def net_stabilizes(d, eps, sizes=(4, 8, 16, 32, 64)):
    """``True`` iff the net size stops growing over the last two truncation sizes."""
    counts = [epsilon_net_size(d, n, eps) for n in sizes]
    return counts[-1] == counts[-2] == counts[-3], counts


def separated_family(d, m, level=None):
    """Up to ``m`` functionals ``A (e_n / sqrt(s(n)))`` in the unit set, with their pairwise distance.

    When ``s`` stays above ``level`` the functionals are pairwise at
    l-infinity distance at least ``sqrt(level)``, so no finite net exists.
    """
    idx = []
    n = 0
    limit = (d.tail_start + m) * 4 + 16
    while len(idx) < m and n < limit:
        if d.in_domain(n) and d.s(n) > 0 and (level is None or d.s(n) >= level):
            idx.append(n)
        n += 1
    size = (max(idx) + 1) if idx else 1
    phis = np.zeros((len(idx), size))
    for row, i in enumerate(idx):
        phis[row, i] = math.sqrt(d.s(i))   # A(e_i / sqrt(s_i)) has <Ax|x> = 1
    if len(idx) < 2:
        return phis, float("inf")
    dist = min(np.max(np.abs(phis[a] - phis[b])) for a in range(len(idx)) for b in range(a))
    return phis, float(dist)
