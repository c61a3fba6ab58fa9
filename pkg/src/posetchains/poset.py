"""Finite graded posets and up/down transition rules.

Elements are arbitrary hashable keys (strings for hand-made fixtures,
``Partition`` objects for Young's lattice, integer tuples for N^d).  Each
poset interns its keys to dense integer ids; ``levels[r]`` lists the ids of
rank ``r`` in insertion order, and a level vector is indexed by position
within that list.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    BoundaryLevel,
    DuplicateLabel,
    EmptyLevel,
    GradingViolation,
    UnknownElement,
)

RULE_TOL = 1e-9


def label_of(key: Hashable) -> str:
    if isinstance(key, str):
        return key
    if isinstance(key, tuple):
        return ",".join(str(k) for k in key)
    return str(key)


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"

    @property
    def step(self) -> int:
        return 1 if self is Direction.UP else -1


@dataclass(eq=False)
class FinitePoset:
    """A finite graded poset given by its level lists and cover relation.

    Build instances with :func:`build_finite_poset`; the constructor does no
    validation.
    """

    keys: tuple
    labels: tuple[str, ...]
    rank: tuple[int, ...]
    levels: dict[int, tuple[int, ...]]
    up_covers: tuple[tuple[int, ...], ...]
    down_covers: tuple[tuple[int, ...], ...]
    index: dict = field(repr=False)
    label_index: dict = field(repr=False)
    position: tuple[int, ...] = field(repr=False)

    @property
    def min_rank(self) -> int:
        return min(self.levels)

    @property
    def max_rank(self) -> int:
        return max(self.levels)

    @property
    def ranks(self) -> range:
        return range(self.min_rank, self.max_rank + 1)

    def __len__(self) -> int:
        return len(self.keys)

    def level_size(self, r: int) -> int:
        return len(self.levels[r])

    def id_of(self, key) -> int:
        try:
            return self.index[key]
        except KeyError:
            pass
        try:
            return self.label_index[key]
        except (KeyError, TypeError):
            raise UnknownElement(f"no element {key!r} in poset") from None

    def level_keys(self, r: int) -> list:
        return [self.keys[e] for e in self.levels[r]]

    def level_labels(self, r: int) -> list[str]:
        return [self.labels[e] for e in self.levels[r]]

    def covers(self):
        """Yield all cover pairs ``(lower_id, upper_id)``."""
        for u, ups in enumerate(self.up_covers):
            for v in ups:
                yield u, v

    def neighbours(self, e: int, direction: Direction) -> tuple[int, ...]:
        return self.up_covers[e] if direction is Direction.UP else self.down_covers[e]

    def sort_key(self, e: int):
        return (self.rank[e], self.labels[e])

    def ranks_from_covers(self) -> dict[int, int]:
        """Recover ranks by a breadth scan through the cover graph.

        Starts from every element of the minimal level; elements not
        connected to it are omitted from the result.
        """
        found = {e: self.min_rank for e in self.levels[self.min_rank]}
        queue = deque(found)
        while queue:
            u = queue.popleft()
            for v in self.up_covers[u]:
                if v not in found:
                    found[v] = found[u] + 1
                    queue.append(v)
            for v in self.down_covers[u]:
                if v not in found:
                    found[v] = found[u] - 1
                    queue.append(v)
        return found


def build_finite_poset(
    levels: Sequence[Sequence[Hashable]],
    covers: Iterable[tuple[Hashable, Hashable]],
    min_rank: int = 0,
) -> FinitePoset:
    """Build and validate a graded poset.

    Parameters
    ----------
    levels : sequence of sequences
        ``levels[k]`` holds the element keys of rank ``min_rank + k``.
    covers : iterable of (lower, upper) pairs
        Cover relations, given by key or label.
    min_rank : int
        Rank of the first level.
    """
    if len(levels) == 0:
        raise EmptyLevel("poset needs at least one level")
    keys, labels, rank, position = [], [], [], []
    index: dict = {}
    label_index: dict[str, int] = {}
    level_ids: dict[int, tuple[int, ...]] = {}
    for k, level in enumerate(levels):
        r = min_rank + k
        if len(level) == 0:
            raise EmptyLevel(f"level {r} has no elements")
        ids = []
        for pos, key in enumerate(level):
            lab = label_of(key)
            if key in index or lab in label_index:
                raise DuplicateLabel(f"duplicate element {lab!r}")
            e = len(keys)
            index[key] = e
            label_index[lab] = e
            keys.append(key)
            labels.append(lab)
            rank.append(r)
            position.append(pos)
            ids.append(e)
        level_ids[r] = tuple(ids)

    def lookup(key):
        if key in index:
            return index[key]
        if isinstance(key, str) and key in label_index:
            return label_index[key]
        raise UnknownElement(f"cover references unknown element {key!r}")

    ups: list[list[int]] = [[] for _ in keys]
    downs: list[list[int]] = [[] for _ in keys]
    for lo, hi in covers:
        u, v = lookup(lo), lookup(hi)
        if rank[v] != rank[u] + 1:
            raise GradingViolation(
                f"cover {labels[u]} < {labels[v]} spans ranks {rank[u]} -> {rank[v]}"
            )
        if v not in ups[u]:
            ups[u].append(v)
            downs[v].append(u)
    return FinitePoset(
        keys=tuple(keys),
        labels=tuple(labels),
        rank=tuple(rank),
        levels=level_ids,
        up_covers=tuple(tuple(x) for x in ups),
        down_covers=tuple(tuple(x) for x in downs),
        index=index,
        label_index=label_index,
        position=tuple(position),
    )


@dataclass(eq=False)
class TransitionRule:
    """Per-element transition probabilities tagged with a direction.

    ``table`` maps an element id to ``((target_id, p), ...)``.  Zero
    probabilities are never stored.
    """

    poset: FinitePoset
    direction: Direction
    table: Mapping[int, tuple[tuple[int, float], ...]]
    _matrices: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_entries(cls, poset: FinitePoset, direction, entries) -> "TransitionRule":
        """Build a rule from ``(source, target, p)`` triples given by key or label."""
        direction = Direction(direction)
        rows: dict[int, dict[int, float]] = {}
        for src, dst, p in entries:
            p = float(p)
            if p < 0 or p > 1 + RULE_TOL:
                raise ValueError(f"probability {p} outside [0, 1] on {src!r} -> {dst!r}")
            if p == 0:
                continue
            u, v = poset.id_of(src), poset.id_of(dst)
            row = rows.setdefault(u, {})
            row[v] = row.get(v, 0.0) + p
        table = {u: tuple(row.items()) for u, row in rows.items()}
        return cls(poset, direction, table)

    @classmethod
    def from_function(cls, poset: FinitePoset, direction, row_fn) -> "TransitionRule":
        """Build a rule from ``row_fn(key) -> [(target_key, p), ...]``.

        ``row_fn`` is called for every element that needs a row (non-maximal
        rank for up rules, non-minimal for down rules).
        """
        direction = Direction(direction)
        skip = poset.max_rank if direction is Direction.UP else poset.min_rank
        entries = []
        for e, key in enumerate(poset.keys):
            if poset.rank[e] == skip:
                continue
            entries.extend((key, dst, p) for dst, p in row_fn(key))
        return cls.from_entries(poset, direction, entries)

    def row(self, e: int) -> tuple[tuple[int, float], ...]:
        return self.table.get(e, ())

    def prob(self, src, dst) -> float:
        u, v = self.poset.id_of(src), self.poset.id_of(dst)
        for w, p in self.table.get(u, ()):
            if w == v:
                return p
        return 0.0

    def successors(self, key) -> list[tuple[Hashable, float]]:
        """Row of ``key`` as ``[(target_key, p), ...]``; usable as a chain step."""
        keys = self.poset.keys
        return [(keys[v], p) for v, p in self.table.get(self.poset.id_of(key), ())]

    def target_level(self, level: int) -> int:
        target = level + self.direction.step
        if target not in self.poset.levels or level not in self.poset.levels:
            raise BoundaryLevel(
                f"{self.direction.value} rule cannot be applied at level {level}"
            )
        return target

    def matrix(self, level: int) -> sp.csr_array:
        """Sparse operator mapping level vectors of ``level`` to its neighbour level.

        Entry ``[j, i]`` is the probability of moving from the i-th element
        of ``level`` to the j-th element of the target level.
        """
        if level in self._matrices:
            return self._matrices[level]
        target = self.target_level(level)
        P = self.poset
        rows, cols, vals = [], [], []
        for e in P.levels[level]:
            for v, p in self.table.get(e, ()):
                if P.rank[v] != target:
                    raise GradingViolation(
                        f"rule entry {P.labels[e]} -> {P.labels[v]} does not reach level {target}"
                    )
                rows.append(P.position[v])
                cols.append(P.position[e])
                vals.append(p)
        M = sp.csr_array(
            (np.asarray(vals, dtype=float), (rows, cols)),
            shape=(P.level_size(target), P.level_size(level)),
        )
        self._matrices[level] = M
        return M


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_rule`; valid iff both lists are empty."""

    support_mismatches: list[dict]
    row_deviations: list[dict]

    @property
    def valid(self) -> bool:
        return not self.support_mismatches and not self.row_deviations

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "support_mismatches": self.support_mismatches,
            "row_deviations": self.row_deviations,
        }


def validate_rule(poset: FinitePoset, rule: TransitionRule, tol: float = RULE_TOL) -> ValidationReport:
    mismatches, deviations = [], []
    skip = poset.max_rank if rule.direction is Direction.UP else poset.min_rank
    for e in sorted(range(len(poset)), key=poset.sort_key):
        row = dict(rule.table.get(e, ()))
        allowed = set(poset.neighbours(e, rule.direction))
        for v in sorted(set(row) - allowed, key=poset.sort_key):
            mismatches.append(
                {"from": poset.labels[e], "to": poset.labels[v], "kind": "not_a_cover", "p": row[v]}
            )
        if poset.rank[e] == skip:
            continue
        for v in sorted(allowed - set(row), key=poset.sort_key):
            mismatches.append(
                {"from": poset.labels[e], "to": poset.labels[v], "kind": "zero_on_cover", "p": 0.0}
            )
        dev = sum(row.values()) - 1.0
        if abs(dev) > tol:
            deviations.append({"element": poset.labels[e], "deviation": dev})
    return ValidationReport(mismatches, deviations)
