"""Integer partitions, Young's lattice and the row(mu) / derow rules.

A partition is stored canonically as its multiplicity map (sorted
``(part, count)`` pairs); the parts list is a derived view.  Both rules are
aggregated by distinct part value: choosing any of the r_k rows of length k
gives the same neighbouring diagram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BadMu, CapExceeded, EmptyPartition, NoSuchRowLength
from .poset import Direction, FinitePoset, TransitionRule, build_finite_poset

ENUMERATION_CAP = 60


@dataclass(frozen=True, order=False)
class Partition:
    """Integer partition keyed by its multiplicities ``((part, count), ...)``."""

    multiplicities: tuple[tuple[int, int], ...]

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> "Partition":
        counts: dict[int, int] = {}
        for p in parts:
            p = int(p)
            if p < 1:
                raise ValueError(f"parts must be positive, got {p}")
            counts[p] = counts.get(p, 0) + 1
        return cls(tuple(sorted(counts.items(), reverse=True)))

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> "Partition":
        return cls(tuple(sorted(((k, c) for k, c in counts.items() if c > 0), reverse=True)))

    @cached_property
    def parts(self) -> tuple[int, ...]:
        return tuple(k for k, c in self.multiplicities for _ in range(c))

    @cached_property
    def size(self) -> int:
        return sum(k * c for k, c in self.multiplicities)

    @cached_property
    def num_parts(self) -> int:
        return sum(c for _, c in self.multiplicities)

    def r(self, k: int) -> int:
        """Number of parts equal to ``k``."""
        return dict(self.multiplicities).get(k, 0)

    @property
    def counts(self) -> dict[int, int]:
        return dict(self.multiplicities)

    def __len__(self) -> int:
        return self.num_parts

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))

    def __repr__(self) -> str:
        return f"Partition({self.parts})"

    def covers(self, other: "Partition") -> bool:
        """True iff ``other`` is obtained from ``self`` by removing one square."""
        if self.size != other.size + 1:
            return False
        a, b = self.parts, other.parts
        if len(b) > len(a):
            return False
        b = b + (0,) * (len(a) - len(b))
        return all(x >= y for x, y in zip(a, b))


def P(*parts: int) -> Partition:
    """Shorthand constructor: ``P(3, 1)``."""
    return Partition.from_parts(parts)


@lru_cache(maxsize=None)
def _partitions(n: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(n: int, cap: int = ENUMERATION_CAP) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    return [Partition.from_parts(p) for p in _partitions(n, n)]


@dataclass(frozen=True)
class Corner:
    column: int
    row: int


def _check_kappa(lam: Partition, kappa: int):
    if lam.r(kappa) == 0:
        raise NoSuchRowLength(f"{lam!r} has no row of length {kappa}")


def outer_corner(lam: Partition, kappa: int) -> Corner:
    """omega(kappa) = (kappa, max{i : lambda_i = kappa}), rows counted from 1."""
    _check_kappa(lam, kappa)
    at_least = sum(c for k, c in lam.multiplicities if k >= kappa)
    return Corner(kappa, at_least)


def inner_corner(lam: Partition, kappa: int) -> Corner:
    """iota(kappa) = (kappa, max{i : lambda_i > kappa}), or (lambda_1, 0) for the longest row."""
    _check_kappa(lam, kappa)
    longer = sum(c for k, c in lam.multiplicities if k > kappa)
    return Corner(kappa, longer)


def _shift_one(lam: Partition, kappa: int, delta: int) -> Partition:
    counts = lam.counts
    counts[kappa] -= 1
    if kappa + delta > 0:
        counts[kappa + delta] = counts.get(kappa + delta, 0) + 1
    return Partition.from_counts(counts)


def derow_rule(lam: Partition) -> list[tuple[Partition, float]]:
    """Remove the outer corner of a uniformly chosen row."""
    if lam.size == 0:
        raise EmptyPartition("derow is undefined on the empty partition")
    N = lam.num_parts
    return [(_shift_one(lam, k, -1), float(Fraction(c, N))) for k, c in lam.multiplicities]


def _check_mu(mu: float):
    if not (0.0 < mu < 1.0):
        raise BadMu(f"mu must lie in (0, 1), got {mu!r}")


def row_rule(lam: Partition, mu: float) -> list[tuple[Partition, float]]:
    """With probability mu start a new row of length 1; otherwise add a
    square at the inner corner of a uniformly chosen row."""
    _check_mu(mu)
    if lam.size == 0:
        raise EmptyPartition("row(mu) is undefined on the empty partition")
    N = lam.num_parts
    out = [(_shift_new_row(lam), float(mu))]
    out += [(_shift_one(lam, k, +1), (1.0 - mu) * c / N) for k, c in lam.multiplicities]
    return out


def _shift_new_row(lam: Partition) -> Partition:
    counts = lam.counts
    counts[1] = counts.get(1, 0) + 1
    return Partition.from_counts(counts)


def _shape_factor(lam: Partition) -> int:
    """N(lambda)! / prod_k r_k(lambda)!"""
    out = math.factorial(lam.num_parts)
    for _, c in lam.multiplicities:
        out //= math.factorial(c)
    return out


def row_chain_formula(lam: Partition, mu: float) -> float:
    """Law of the row(mu) up chain started at (1), evaluated at ``lam``."""
    _check_mu(mu)
    if lam.size == 0:
        raise EmptyPartition("the row(mu) chain starts at level 1")
    N = lam.num_parts
    return (1.0 - mu) ** (lam.size - N) * mu ** (N - 1) * float(_shape_factor(lam))


def stationary_ud_formula(lam: Partition, mu: float) -> float:
    """Closed-form stationary mass of ``lam`` in derow-row(mu) on two adjacent levels.

    Each of the two levels carries total mass 1/2.
    """
    return 0.5 * row_chain_formula(lam, mu)


def young_poset(n_max: int, n_min: int = 1, cap: int = ENUMERATION_CAP) -> FinitePoset:
    """Young's lattice truncated to sizes ``n_min..n_max``."""
    if n_min < 0 or n_max < n_min:
        raise ValueError("need 0 <= n_min <= n_max")
    levels = [partitions_of(n, cap) for n in range(n_min, n_max + 1)]
    covers = []
    for level in levels[:-1]:
        for lam in level:
            if lam.size == 0:
                covers.append((lam, P(1)))
                continue
            covers.append((lam, _shift_new_row(lam)))
            covers.extend((lam, _shift_one(lam, k, +1)) for k, _ in lam.multiplicities)
    return build_finite_poset(levels, covers, min_rank=n_min)


def row_up_rule(poset: FinitePoset, mu: float) -> TransitionRule:
    _check_mu(mu)
    return TransitionRule.from_function(poset, Direction.UP, lambda lam: row_rule(lam, mu))


def derow_down_rule(poset: FinitePoset) -> TransitionRule:
    return TransitionRule.from_function(poset, Direction.DOWN, derow_rule)


def young_rules(n_max: int, mu: float, n_min: int = 1):
    """``(poset, row(mu), derow)`` on Young's lattice levels ``n_min..n_max``."""
    poset = young_poset(n_max, n_min)
    return poset, row_up_rule(poset, mu), derow_down_rule(poset)


@dataclass
class ScaledShape:
    """Rescaled diagram boundary sampled on an x-grid.

    Row lengths are divided by ``a_n`` and column heights multiplied by
    ``a_n / n``, so the full step function has area 1.
    """

    x: np.ndarray
    y: np.ndarray
    a_n: float
    area: float


def boundary(rows: Sequence[int] | np.ndarray, n: int, a_n: float, grid) -> np.ndarray:
    """y(x) = (a_n / n) * #{i : row_i > a_n x} for each x in ``grid``.

    ``rows`` need not be sorted.
    """
    rows = np.sort(np.asarray(rows, dtype=float))
    thresholds = a_n * np.asarray(grid, dtype=float)
    longer = len(rows) - np.searchsorted(rows, thresholds, side="right")
    return (a_n / n) * longer


def scaled_shape(lam: Partition, a_n: float, grid) -> ScaledShape:
    if a_n <= 0:
        raise ValueError("a_n must be positive")
    n = lam.size
    if n < 1:
        raise EmptyPartition("cannot scale the empty diagram")
    x = np.asarray(grid, dtype=float)
    y = boundary(lam.parts, n, a_n, x)
    area = sum((k / a_n) * c * (a_n / n) for k, c in lam.multiplicities)
    return ScaledShape(x=x, y=y, a_n=float(a_n), area=area)
