"""The lattice N^d of nonnegative integer d-tuples, truncated at a max rank.

Level n holds the weak compositions of n into d parts in lexicographic
order.  Rules are plain functions of a point; the ``*_rule`` helpers wrap
them as :class:`TransitionRule` objects on a truncated poset.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .engine import LevelDistribution, propagate
from .errors import CapExceeded, ZeroComponent
from .poset import Direction, FinitePoset, TransitionRule, build_finite_poset

LEVEL_CAP = 1_000_000
EXACT_MULTINOMIAL_MAX = 20


def compositions(n: int, d: int) -> list[tuple[int, ...]]:
    """Weak compositions of ``n`` into ``d`` parts, lexicographically."""
    if d == 1:
        return [(n,)]
    return [(k,) + rest for k in range(n + 1) for rest in compositions(n - k, d - 1)]


def level_size(d: int, n: int) -> int:
    return math.comb(d + n - 1, d - 1)


def up_neighbour(x: tuple[int, ...], i: int) -> tuple[int, ...]:
    return x[:i] + (x[i] + 1,) + x[i + 1 :]


def down_neighbour(x: tuple[int, ...], i: int) -> tuple[int, ...]:
    return x[:i] + (x[i] - 1,) + x[i + 1 :]


@lru_cache(maxsize=32)
def nd_poset(d: int, n_max: int, cap: int = LEVEL_CAP) -> FinitePoset:
    if d < 1 or n_max < 0:
        raise ValueError("need d >= 1 and n_max >= 0")
    if level_size(d, n_max) > cap:
        raise CapExceeded(f"level {n_max} of N^{d} has {level_size(d, n_max)} points")
    levels = [compositions(n, d) for n in range(n_max + 1)]
    covers = [(x, up_neighbour(x, i)) for level in levels[:-1] for x in level for i in range(d)]
    return build_finite_poset(levels, covers)


def as_simplex_point(nu: Sequence[float], strict: bool = False) -> tuple[float, ...]:
    nu = tuple(float(v) for v in nu)
    if any(v < 0 or v > 1 for v in nu) or abs(sum(nu) - 1.0) > 1e-12:
        raise ValueError(f"{nu} is not a point of the simplex")
    if strict and any(v == 0 for v in nu):
        raise ZeroComponent(f"{nu} has a zero component")
    return nu


def const_up_row(x, nu):
    """U(x -> x^(i)) = nu_i."""
    return [(up_neighbour(x, i), p) for i, p in enumerate(nu)]


def level_up_row(x):
    """U(x -> x^(i)) = (x_i + 1) / (|x| + d)."""
    denom = sum(x) + len(x)
    return [(up_neighbour(x, i), (xi + 1) / denom) for i, xi in enumerate(x)]


def proportional_down_row(x):
    """D(x -> x_(i)) = x_i / |x|; zero coordinates get no mass."""
    n = sum(x)
    return [(down_neighbour(x, i), xi / n) for i, xi in enumerate(x) if xi > 0]


def example5_down_row(x):
    """1/2 on each down edge of an interior point of N^2, 1 on the boundary."""
    preds = [down_neighbour(x, i) for i, xi in enumerate(x) if xi > 0]
    return [(y, 1.0 / len(preds)) for y in preds]


def const_up_rule(nu, n_max: int) -> TransitionRule:
    nu = as_simplex_point(nu, strict=True)
    poset = nd_poset(len(nu), n_max)
    return TransitionRule.from_function(poset, Direction.UP, lambda x: const_up_row(x, nu))


def level_up_rule(d: int, n_max: int) -> TransitionRule:
    return TransitionRule.from_function(nd_poset(d, n_max), Direction.UP, level_up_row)


def proportional_down_rule(d: int, n_max: int) -> TransitionRule:
    return TransitionRule.from_function(nd_poset(d, n_max), Direction.DOWN, proportional_down_row)


def example5_down_rule(n_max: int) -> TransitionRule:
    return TransitionRule.from_function(nd_poset(2, n_max), Direction.DOWN, example5_down_row)


def multinomial_pmf(x: Sequence[int], nu: Sequence[float]) -> float:
    """n! / (x_1! ... x_d!) * prod nu_i^x_i with n = |x|."""
    n = sum(x)
    if n <= EXACT_MULTINOMIAL_MAX:
        coef = math.factorial(n)
        for xi in x:
            coef //= math.factorial(xi)
        return float(coef) * math.prod(v**xi for v, xi in zip(nu, x))
    if any(v == 0 and xi > 0 for v, xi in zip(nu, x)):
        return 0.0
    log_p = math.lgamma(n + 1) + sum(
        xi * math.log(v) - math.lgamma(xi + 1) for v, xi in zip(nu, x) if xi > 0
    )
    return math.exp(log_p)


def origin(poset: FinitePoset) -> LevelDistribution:
    d = len(poset.keys[0])
    return LevelDistribution.point_mass(poset, (0,) * d)


def multinomial_level(nu, n: int, n_max: int | None = None) -> LevelDistribution:
    """Level-n law of the constant-nu up chain from the origin."""
    nu = as_simplex_point(nu)
    poset = nd_poset(len(nu), n if n_max is None else n_max)
    if n > poset.max_rank:
        raise CapExceeded(f"level {n} beyond truncation {poset.max_rank}")
    w = [multinomial_pmf(x, nu) for x in poset.level_keys(n)]
    return LevelDistribution(poset, n, w)


def uniform_level_check(d: int, n: int, tol: float = 1e-12):
    """Propagate the level-dependent rule from the origin and compare level n
    with the uniform law.  Returns ``(is_uniform, max_abs_deviation)``."""
    rule = level_up_rule(d, n)
    dist = propagate(rule, origin(rule.poset), n).at(n)
    dev = float(np.max(np.abs(dist.weights - 1.0 / level_size(d, n))))
    return dev <= tol, dev


def example5_decay(n_max: int, n_min: int = 2, start: str = "max") -> dict[int, float]:
    """Probability that the boundary-sticky down chain on N^2 hits (1, 1) at level 2.

    For each starting level n in ``n_min..n_max`` returns the maximum over
    starting points of level n (``start="max"``), or the value for a uniform
    start (``start="uniform"``).
    """
    if n_min < 2:
        raise ValueError("starting level must be at least 2")
    if start not in ("max", "uniform"):
        raise ValueError(f"unknown start convention {start!r}")
    rule = example5_down_rule(n_max)
    poset = rule.poset
    # hit[k] = P(reach (1,1) at level 2 | start at k-th point of the current level)
    hit = np.zeros(poset.level_size(2))
    hit[poset.position[poset.id_of((1, 1))]] = 1.0
    out = {}
    for n in range(2, n_max + 1):
        if n > 2:
            hit = rule.matrix(n).T @ hit
        if n >= n_min:
            out[n] = float(hit.max()) if start == "max" else float(hit.mean())
    return out


def binomial_marginal(dist: LevelDistribution, i: int) -> np.ndarray:
    """Law of coordinate ``i`` under a level distribution on N^d."""
    n = dist.level
    out = np.zeros(n + 1)
    for x, w in dist.by_key().items():
        out[x[i]] += w
    return out

