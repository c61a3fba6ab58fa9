"""Seeded simulation of up, down and up-and-down chains.

Random numbers come from NumPy's Philox4x64 counter-based generator.  The
key is derived from the user seed via ``SeedSequence(seed)``; replica ``r``
runs on the stream whose counter has ``r`` in word 2, so any replica can be
regenerated on its own and replicas never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import BadSchedule, BoundaryLevel
from .ndlattice import as_simplex_point
from .poset import Direction, TransitionRule
from .young import boundary

Step = Callable[[Hashable], Sequence[tuple[Hashable, float]]]


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    replicas: int = 1
    burn_in: int = 0
    thinning: int = 1

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.burn_in < 0 or self.thinning < 1:
            raise ValueError("need burn_in >= 0 and thinning >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, replica, 0]))


def replica_uniforms(config: SimulationConfig, count: int) -> np.ndarray:
    """``(replicas, count)`` uniforms, row r drawn from replica r's stream."""
    out = np.empty((config.replicas, count))
    for r in range(config.replicas):
        out[r] = replica_rng(config.seed, r).random(count)
    return out


def choose(row: Sequence[tuple[Hashable, float]], u: float):
    acc = 0.0
    for target, p in row:
        acc += p
        if u < acc:
            return target
    return row[-1][0]


def sample_path(step: Step, start, steps: int, rng_or_uniforms) -> list:
    """One trajectory of ``steps`` moves; each move consumes one uniform."""
    if isinstance(rng_or_uniforms, np.random.Generator):
        us = rng_or_uniforms.random(steps)
    else:
        us = rng_or_uniforms
    path = [start]
    state = start
    for k in range(steps):
        row = step(state)
        if not row:
            raise BoundaryLevel(f"no transitions out of {state!r}")
        state = choose(row, us[k])
        path.append(state)
    return path


class _Tables:
    """Padded cumulative transition tables for lockstep simulation over replicas."""

    def __init__(self, rules: Sequence[TransitionRule]):
        P = rules[0].poset
        n = len(P)
        width = max((len(r.row(e)) for r in rules for e in range(n)), default=1) or 1
        self.targets = {}
        self.cum = {}
        for rule in rules:
            T = np.full((n, width), -1, dtype=np.int64)
            C = np.full((n, width), np.inf)
            for e in range(n):
                row = rule.row(e)
                if row:
                    T[e, : len(row)] = [v for v, _ in row]
                    C[e, : len(row)] = np.cumsum([p for _, p in row])
                    C[e, len(row) - 1] = np.inf
            self.targets[rule.direction] = T
            self.cum[rule.direction] = C

    def step(self, direction, states, u):
        C = self.cum[direction][states]
        k = (C <= u[:, None]).sum(axis=1)
        nxt = self.targets[direction][states, k]
        if np.any(nxt < 0):
            raise BoundaryLevel("a replica reached an element without transitions")
        return nxt


def _check_target(rule: TransitionRule, start_rank: int, target_rank: int) -> int:
    P = rule.poset
    if target_rank not in P.levels:
        raise BoundaryLevel(f"target rank {target_rank} outside ranks {P.min_rank}..{P.max_rank}")
    steps = (target_rank - start_rank) * rule.direction.step
    if steps < 0:
        raise BoundaryLevel(f"target rank {target_rank} is behind the start in the rule's direction")
    return steps


def simulate_chain(rule: TransitionRule, start, target_rank: int, config: SimulationConfig) -> list:
    """Endpoints at ``target_rank`` of independent U- or D-chains from ``start``.

    Element ``r`` of the result is replica ``r``'s endpoint key.
    """
    P = rule.poset
    s = P.id_of(start)
    steps = _check_target(rule, P.rank[s], target_rank)
    us = replica_uniforms(config, steps)
    tables = _Tables([rule])
    states = np.full(config.replicas, s, dtype=np.int64)
    for k in range(steps):
        states = tables.step(rule.direction, states, us[:, k])
    return [P.keys[e] for e in states]


def simulate_up_chain(rule: TransitionRule, start, target_rank: int, config: SimulationConfig) -> list:
    if rule.direction is not Direction.UP:
        raise ValueError("expected an up rule")
    return simulate_chain(rule, start, target_rank, config)


def simulate_down_chain(rule: TransitionRule, start, target_rank: int, config: SimulationConfig) -> list:
    if rule.direction is not Direction.DOWN:
        raise ValueError("expected a down rule")
    return simulate_chain(rule, start, target_rank, config)


def simulate_lazy_chain(step: Step, start, steps: int, config: SimulationConfig) -> list:
    """Endpoints after ``steps`` moves of a chain given by a row function.

    Used for state spaces too large to materialise (Young's lattice, N^d).
    """
    return [
        sample_path(step, start, steps, replica_rng(config.seed, r))[-1]
        for r in range(config.replicas)
    ]


def frequencies(samples: Sequence, labels=str) -> dict:
    counts: dict = {}
    for s in samples:
        k = labels(s)
        counts[k] = counts.get(k, 0) + 1
    n = len(samples)
    return {k: c / n for k, c in sorted(counts.items())}


@dataclass
class UDSample:
    """Empirical occupation law of a UD chain on levels i and i+1."""

    labels: list[str]
    counts: np.ndarray
    total: int

    @property
    def distribution(self) -> dict[str, float]:
        return {lab: c / self.total for lab, c in zip(self.labels, self.counts)}


def simulate_ud_chain(
    U: TransitionRule,
    D: TransitionRule,
    i: int,
    config: SimulationConfig,
    samples: int = 1,
    start=None,
) -> UDSample:
    """Run ``config.replicas`` alternating chains on levels i, i+1.

    Each replica starts at ``start`` (default: first element of level i),
    performs ``burn_in`` up-down cycles, then records ``samples`` cycles
    spaced ``thinning`` cycles apart; every recorded cycle contributes its
    level-i state and its level-(i+1) state.
    """
    P = U.poset
    if i not in P.levels or i + 1 not in P.levels:
        raise BoundaryLevel(f"levels {i}, {i + 1} do not both exist")
    s = P.levels[i][0] if start is None else P.id_of(start)
    if P.rank[s] != i:
        raise BoundaryLevel("start must lie on level i")
    cycles = config.burn_in + (samples - 1) * config.thinning + 1
    us = replica_uniforms(config, 2 * cycles)
    tables = _Tables([U, D])
    states = P.levels[i] + P.levels[i + 1]
    where = {e: k for k, e in enumerate(states)}
    lut = np.array([where.get(e, -1) for e in range(len(P))])
    counts = np.zeros(len(states), dtype=np.int64)
    lo = np.full(config.replicas, s, dtype=np.int64)
    recorded = 0
    for c in range(cycles):
        hi = tables.step(Direction.UP, lo, us[:, 2 * c])
        if c >= config.burn_in and (c - config.burn_in) % config.thinning == 0:
            counts += np.bincount(lut[lo], minlength=len(states))
            counts += np.bincount(lut[hi], minlength=len(states))
            recorded += 2 * config.replicas
        lo = tables.step(Direction.DOWN, hi, us[:, 2 * c + 1])
    return UDSample([P.labels[e] for e in states], counts, recorded)


def shape_distances(x, y, reference) -> tuple[float, float]:
    """Sup and L1 (trapezoid on the grid) distances between y and reference(x)."""
    x = np.asarray(x, dtype=float)
    gap = np.abs(np.asarray(y, dtype=float) - np.asarray(reference(x), dtype=float))
    l1 = float(np.sum(0.5 * (gap[1:] + gap[:-1]) * np.diff(x))) if len(x) > 1 else 0.0
    return float(gap.max()), l1


@dataclass
class ShapeEstimate:
    x: np.ndarray
    mean_y: np.ndarray
    stderr: np.ndarray
    reference: np.ndarray
    sup_distance: float
    l1_distance: float
    a_n: float
    mu: float
    n: int
    replicas: int = field(default=0)

    def csv_rows(self):
        return zip(self.x.tolist(), self.mean_y.tolist(), self.stderr.tolist(), self.reference.tolist())


def sample_row_partition(n: int, mu: float, rng: np.random.Generator) -> list[int]:
    """Row lengths (unsorted) of the row(mu) chain started at (1) after n - 1 steps.

    One uniform per step: u < mu starts a new row; otherwise
    (u - mu) / (1 - mu) is uniform and picks one of the current rows.
    """
    rows = [1]
    us = rng.random(n - 1)
    for u in us:
        if u < mu:
            rows.append(1)
        else:
            rows[int((u - mu) / (1.0 - mu) * len(rows))] += 1
    return rows


def estimate_limit_shape(
    mu_schedule: Callable[[int], float],
    n: int,
    grid,
    config: SimulationConfig,
    reference: Callable = np.exp,
) -> ShapeEstimate:
    """Mean rescaled boundary of stationary derow-row(mu_n) diagrams of size n.

    The stationary law on level n equals the law of the row(mu_n) up chain,
    so diagrams are sampled by growing from (1).  Scaling uses a_n = 1/mu_n.
    ``reference`` defaults to y = exp(-x).
    """
    mu = float(mu_schedule(n))
    if not 0.0 < mu < 1.0:
        raise BadSchedule(f"mu_n = {mu!r} at n = {n} is outside (0, 1)")
    if reference is np.exp:
        reference = _exp_neg
    a_n = 1.0 / mu
    x = np.asarray(grid, dtype=float)
    ys = np.empty((config.replicas, len(x)))
    for r in range(config.replicas):
        rows = sample_row_partition(n, mu, replica_rng(config.seed, r))
        ys[r] = boundary(rows, n, a_n, x)
    mean = ys.mean(axis=0)
    se = ys.std(axis=0, ddof=1) / math.sqrt(config.replicas) if config.replicas > 1 else np.zeros(len(x))
    sup, l1 = shape_distances(x, mean, reference)
    return ShapeEstimate(x, mean, se, np.asarray(reference(x), dtype=float), sup, l1, a_n, mu, n, config.replicas)


def _exp_neg(x):
    return np.exp(-np.asarray(x, dtype=float))


@dataclass
class LimitPointEstimate:
    nu: tuple[float, ...]
    mean: np.ndarray
    stderr: np.ndarray
    max_deviation: float
    exceeds_4se: bool


def sample_const_endpoint(nu, n: int, rng: np.random.Generator) -> np.ndarray:
    """X_n of the constant-nu up chain on N^d from the origin.

    Each step increments coordinate i with probability nu_i, one uniform per step.
    """
    cum = np.cumsum(nu)
    cum[-1] = np.inf
    picks = np.searchsorted(cum, rng.random(n), side="right")
    return np.bincount(picks, minlength=len(nu))


def estimate_limit_point(nu, n: int, config: SimulationConfig) -> LimitPointEstimate:
    nu = as_simplex_point(nu, strict=True)
    ends = np.array(
        [sample_const_endpoint(nu, n, replica_rng(config.seed, r)) for r in range(config.replicas)]
    ) / n
    mean = ends.mean(axis=0)
    se = ends.std(axis=0, ddof=1) / math.sqrt(config.replicas) if config.replicas > 1 else np.zeros(len(nu))
    dev = np.abs(mean - np.asarray(nu))
    return LimitPointEstimate(nu, mean, se, float(dev.max()), bool(np.any(dev > 4 * se)))


def parse_schedule(text: str) -> Callable[[int], float]:
    """Parse a mu_n schedule: ``"0.01"``, ``"n^-0.5"`` or ``"2*n^-0.5"``."""
    s = text.replace(" ", "")
    try:
        mu = float(s)
        return lambda n: mu
    except ValueError:
        pass
    coef = 1.0
    if "*" in s:
        c, s = s.split("*", 1)
        try:
            coef = float(c)
        except ValueError:
            raise BadSchedule(f"cannot parse schedule {text!r}") from None
    if not s.startswith("n^"):
        raise BadSchedule(f"cannot parse schedule {text!r}")
    try:
        alpha = float(s[2:])
    except ValueError:
        raise BadSchedule(f"cannot parse schedule {text!r}") from None
    return lambda n: coef * n**alpha
