"""Exact analysis of up/down rules: level distributions, compatibility,
Bayesian down-rule construction, D-preimages and UD stationary laws.

All residuals are l1 norms over a level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import linprog
from scipy.sparse.csgraph import connected_components

from .errors import BoundaryLevel, LevelMismatch, NotAUSequence, Reducible, ZeroWeightError
from .poset import Direction, FinitePoset, TransitionRule

MASS_TOL = 1e-12
PREIMAGE_TOL = 1e-9
DIRECT_SOLVE_MAX = 10_000


@dataclass(eq=False)
class LevelDistribution:
    """Probability vector on one rank level, indexed by level position."""

    poset: FinitePoset
    level: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.level not in self.poset.levels:
            raise LevelMismatch(f"poset has no level {self.level}")
        if self.weights.shape != (self.poset.level_size(self.level),):
            raise LevelMismatch(
                f"level {self.level} has {self.poset.level_size(self.level)} elements, "
                f"got {self.weights.shape[0]} weights"
            )
        if np.any(self.weights < -MASS_TOL):
            raise ValueError("negative weight in level distribution")
        total = self.weights.sum()
        if abs(total - 1.0) > MASS_TOL * max(1, len(self.weights)):
            raise ValueError(f"level distribution sums to {total!r}, not 1")

    @classmethod
    def point_mass(cls, poset: FinitePoset, key) -> "LevelDistribution":
        e = poset.id_of(key)
        w = np.zeros(poset.level_size(poset.rank[e]))
        w[poset.position[e]] = 1.0
        return cls(poset, poset.rank[e], w)

    @classmethod
    def from_mapping(cls, poset: FinitePoset, weights: Mapping, level: int | None = None):
        """Build from ``{key_or_label: p}``; unlisted elements get 0."""
        ids = {poset.id_of(k): float(p) for k, p in weights.items()}
        if level is None:
            if not ids:
                raise LevelMismatch("empty mapping needs an explicit level")
            level = poset.rank[next(iter(ids))]
        w = np.zeros(poset.level_size(level))
        for e, p in ids.items():
            if poset.rank[e] != level:
                raise LevelMismatch(f"{poset.labels[e]} is not on level {level}")
            w[poset.position[e]] = p
        return cls(poset, level, w)

    @classmethod
    def uniform(cls, poset: FinitePoset, level: int) -> "LevelDistribution":
        n = poset.level_size(level)
        return cls(poset, level, np.full(n, 1.0 / n))

    @property
    def ids(self) -> tuple[int, ...]:
        return self.poset.levels[self.level]

    def __getitem__(self, key) -> float:
        e = self.poset.id_of(key)
        if self.poset.rank[e] != self.level:
            return 0.0
        return float(self.weights[self.poset.position[e]])

    def to_dict(self) -> dict:
        """``{label: p}`` over the support, sorted by label."""
        P = self.poset
        out = {P.labels[e]: float(w) for e, w in zip(self.ids, self.weights) if w != 0}
        return dict(sorted(out.items()))

    def by_key(self) -> dict:
        P = self.poset
        return {P.keys[e]: float(w) for e, w in zip(self.ids, self.weights)}


@dataclass(eq=False)
class DistributionSequence:
    """Level distributions on consecutive increasing levels."""

    dists: tuple[LevelDistribution, ...]

    def __post_init__(self):
        self.dists = tuple(self.dists)
        if not self.dists:
            raise LevelMismatch("empty distribution sequence")
        lv = [d.level for d in self.dists]
        if lv != list(range(lv[0], lv[0] + len(lv))):
            raise LevelMismatch(f"levels {lv} are not consecutive and increasing")
        if any(d.poset is not self.dists[0].poset for d in self.dists):
            raise LevelMismatch("distributions live on different posets")

    @property
    def poset(self) -> FinitePoset:
        return self.dists[0].poset

    @property
    def levels(self) -> range:
        return range(self.dists[0].level, self.dists[-1].level + 1)

    def at(self, level: int) -> LevelDistribution:
        return self.dists[level - self.dists[0].level]

    def __iter__(self):
        return iter(self.dists)

    def __len__(self):
        return len(self.dists)

    def to_json(self) -> list[dict]:
        return [{"level": d.level, "weights": d.to_dict()} for d in self.dists]


@dataclass
class CompatibilityReport:
    weakly_compatible: bool
    strongly_compatible: bool
    witness: DistributionSequence | None
    max_residual: float
    up_residual: float = 0.0
    down_residual: float = 0.0
    balance_residual: float = 0.0

    def to_json(self) -> dict:
        out = {
            "weak": self.weakly_compatible,
            "strong": self.strongly_compatible,
            "max_residual": self.max_residual,
            "residuals": {
                "up": self.up_residual,
                "down": self.down_residual,
                "balance": self.balance_residual,
            },
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _propagate(rule: TransitionRule, level: int, w: np.ndarray) -> np.ndarray:
    return rule.matrix(level) @ w


def apply_rule(rule: TransitionRule, dist: LevelDistribution) -> LevelDistribution:
    """Push ``dist`` one level along ``rule``: (T pi)(v) = sum_u T(u->v) pi(u)."""
    if dist.poset is not rule.poset:
        raise LevelMismatch("rule and distribution are on different posets")
    target = rule.target_level(dist.level)
    return LevelDistribution(rule.poset, target, _propagate(rule, dist.level, dist.weights))


def propagate(rule: TransitionRule, start: LevelDistribution, to_level: int) -> DistributionSequence:
    """Iterate ``rule`` from ``start`` until ``to_level``; returned in increasing level order."""
    out = [start]
    cur = start
    while cur.level != to_level:
        cur = apply_rule(rule, cur)
        out.append(cur)
    if rule.direction is Direction.DOWN:
        out.reverse()
    return DistributionSequence(out)


def is_T_sequence(rule: TransitionRule, seq: DistributionSequence, tol: float = 1e-9):
    """Check T pi_i = pi_{i +/- 1} along ``seq``.

    Returns ``(ok, max_residual)`` with the residual measured in l1.
    """
    if seq.poset is not rule.poset:
        raise LevelMismatch("rule and sequence are on different posets")
    worst = 0.0
    pairs = zip(seq.dists[:-1], seq.dists[1:])
    for lo, hi in pairs:
        src, dst = (lo, hi) if rule.direction is Direction.UP else (hi, lo)
        got = _propagate(rule, src.level, src.weights)
        worst = max(worst, float(np.abs(got - dst.weights).sum()))
    return bool(worst <= tol), worst


def _balance_residual(U: TransitionRule, D: TransitionRule, seq: DistributionSequence) -> float:
    P = seq.poset
    worst = 0.0
    for i in list(seq.levels)[:-1]:
        lo, hi = seq.at(i).weights, seq.at(i + 1).weights
        for u in P.levels[i]:
            up_row = dict(U.row(u))
            for v in P.up_covers[u]:
                flow_up = lo[P.position[u]] * up_row.get(v, 0.0)
                flow_down = hi[P.position[v]] * dict(D.row(v)).get(u, 0.0)
                worst = max(worst, abs(flow_up - flow_down))
    return worst


def check_compatibility(
    U: TransitionRule, D: TransitionRule, seq: DistributionSequence, tol: float = 1e-9
) -> CompatibilityReport:
    """Weak and strong compatibility of (U, D) witnessed by ``seq``.

    Weak: ``seq`` is both a U- and a D-sequence.  Strong: in addition
    pi_i(u) U(u->v) = pi_{i+1}(v) D(v->u) on every cover.
    """
    if U.poset is not D.poset or seq.poset is not U.poset:
        raise LevelMismatch("rules and sequence must share one poset")
    if U.direction is not Direction.UP or D.direction is not Direction.DOWN:
        raise LevelMismatch("expected an up rule and a down rule")
    if seq.levels != U.poset.ranks:
        raise LevelMismatch(
            f"sequence spans levels {list(seq.levels)}, poset spans {list(U.poset.ranks)}"
        )
    up_ok, up_res = is_T_sequence(U, seq, tol)
    down_ok, down_res = is_T_sequence(D, seq, tol)
    bal = float(_balance_residual(U, D, seq))
    weak = bool(up_ok and down_ok)
    strong = bool(weak and bal <= tol)
    return CompatibilityReport(
        weakly_compatible=weak,
        strongly_compatible=strong,
        witness=seq,
        max_residual=max(up_res, down_res, bal),
        up_residual=up_res,
        down_residual=down_res,
        balance_residual=bal,
    )


def construct_down_rule(U: TransitionRule, seq: DistributionSequence, tol: float = 1e-9) -> TransitionRule:
    """Bayesian reversal of an up chain.

    D(v->u) = pi_i(u) U(u->v) / pi_{i+1}(v).  Elements v with zero mass get
    a uniform row over their down-covers.
    """
    P = U.poset
    if seq.poset is not P:
        raise LevelMismatch("rule and sequence are on different posets")
    if seq.levels != P.ranks:
        raise LevelMismatch(f"sequence must span levels {list(P.ranks)}")
    ok, res = is_T_sequence(U, seq, tol)
    if not ok:
        raise NotAUSequence(f"sequence violates U pi_i = pi_(i+1) by {res:.3g}")
    table = {}
    for i in list(P.ranks)[:-1]:
        lo, hi = seq.at(i).weights, seq.at(i + 1).weights
        # (U pi_i)(v) equals pi_{i+1}(v) up to tol; dividing by it keeps rows stochastic.
        pushed = _propagate(U, i, lo)
        for v in P.levels[i + 1]:
            mass = hi[P.position[v]]
            downs = P.down_covers[v]
            for u in downs:
                if lo[P.position[u]] == 0 and mass > 0:
                    raise ZeroWeightError(
                        f"{P.labels[u]} has zero mass but covered {P.labels[v]} has {mass!r}"
                    )
            if mass == 0:
                table[v] = tuple((u, 1.0 / len(downs)) for u in downs)
                continue
            denom = pushed[P.position[v]]
            table[v] = tuple(
                (u, lo[P.position[u]] * dict(U.row(u)).get(v, 0.0) / denom) for u in downs
            )
    return TransitionRule(P, Direction.DOWN, table)


def d_preimage(D: TransitionRule, target: LevelDistribution, tol: float = PREIMAGE_TOL):
    """Find pi' one level above ``target`` with D pi' = target, or ``None``.

    Solved as a linear feasibility problem with HiGHS; variables are ordered
    by element label so the returned witness is deterministic.
    """
    P = D.poset
    up = target.level + 1
    if up not in P.levels:
        raise BoundaryLevel(f"level {target.level} is the top level")
    ids = P.levels[up]
    order = sorted(range(len(ids)), key=lambda k: P.labels[ids[k]])
    A = D.matrix(up).toarray()[:, order]
    A_eq = np.vstack([A, np.ones((1, len(ids)))])
    b_eq = np.concatenate([target.weights, [1.0]])
    res = linprog(
        c=np.zeros(len(ids)), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds"
    )
    if res.status != 0:
        return None
    x = np.zeros(len(ids))
    x[order] = np.clip(res.x, 0.0, None)
    x /= x.sum()
    if np.abs(D.matrix(up) @ x - target.weights).sum() > tol:
        return None
    return LevelDistribution(P, up, x)


@dataclass
class UDMatrix:
    """One-step matrix of the alternating chain on levels i and i+1.

    States are the ids of level i followed by those of level i+1; rows of
    level-i states follow U, rows of level-(i+1) states follow D.
    """

    poset: FinitePoset
    level: int
    states: tuple[int, ...]
    matrix: sp.csr_array = field(repr=False)

    @property
    def labels(self) -> list[str]:
        return [self.poset.labels[e] for e in self.states]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def row(self, key) -> dict[str, float]:
        e = self.poset.id_of(key)
        k = self.states.index(e)
        r = self.matrix[[k], :].toarray().ravel()
        return {self.poset.labels[self.states[j]]: float(p) for j, p in enumerate(r) if p}


def ud_transition_matrix(U: TransitionRule, D: TransitionRule, i: int) -> UDMatrix:
    P = U.poset
    if i not in P.levels or i + 1 not in P.levels:
        raise BoundaryLevel(f"levels {i}, {i + 1} do not both exist")
    n_lo, n_hi = P.level_size(i), P.level_size(i + 1)
    up = U.matrix(i)       # (n_hi, n_lo)
    down = D.matrix(i + 1)  # (n_lo, n_hi)
    M = sp.block_array([[None, up.T], [down.T, None]], format="csr")
    return UDMatrix(P, i, P.levels[i] + P.levels[i + 1], M)


def closed_classes(M: sp.csr_array) -> list[list[int]]:
    """Recurrent (closed communicating) classes of a stochastic matrix."""
    n, labels = connected_components(M, directed=True, connection="strong")
    coo = M.tocoo()
    leaks = np.zeros(n, dtype=bool)
    mask = (coo.data > 0) & (labels[coo.row] != labels[coo.col])
    leaks[labels[coo.row[mask]]] = True
    return [np.flatnonzero(labels == c).tolist() for c in range(n) if not leaks[c]]


def _stationary_direct(M: sp.csr_array) -> np.ndarray:
    n = M.shape[0]
    A = (M.T - sp.eye_array(n, format="csr")).tolil()
    A[n - 1, :] = np.ones(n)
    b = np.zeros(n)
    b[-1] = 1.0
    return spla.spsolve(A.tocsc(), b)


def _stationary_power(U, D, i, tol=1e-12, maxiter=1_000_000) -> np.ndarray:
    # The alternating chain has period 2; iterate the two-step map on level i.
    n = U.poset.level_size(i)
    x = np.full(n, 1.0 / n)
    up, down = U.matrix(i), D.matrix(i + 1)
    for _ in range(maxiter):
        nxt = down @ (up @ x)
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() < tol:
            x = nxt
            break
        x = nxt
    else:
        raise RuntimeError(f"power iteration did not converge in {maxiter} steps")
    hi = up @ x
    return np.concatenate([x, hi]) / 2.0


def stationary_ud(U: TransitionRule, D: TransitionRule, i: int):
    """Stationary law of the UD chain on levels i, i+1, split per level.

    Returns ``(pi_i, pi_{i+1})``, each renormalised to total mass 1.
    """
    chain = ud_transition_matrix(U, D, i)
    classes = closed_classes(chain.matrix)
    if len(classes) != 1:
        P = U.poset
        raise Reducible([[P.labels[chain.states[k]] for k in c] for c in classes])
    if chain.matrix.shape[0] <= DIRECT_SOLVE_MAX:
        x = _stationary_direct(chain.matrix)
    else:
        x = _stationary_power(U, D, i)
    x = np.clip(x, 0.0, None)
    n_lo = U.poset.level_size(i)
    lo, hi = x[:n_lo], x[n_lo:]
    P = U.poset
    return (
        LevelDistribution(P, i, lo / lo.sum()),
        LevelDistribution(P, i + 1, hi / hi.sum()),
    )


def stationary_sequence(U: TransitionRule, D: TransitionRule) -> DistributionSequence:
    """Assemble a full-span sequence from per-pair UD stationary laws.

    Level i takes the lower half of the (i, i+1) solution; the top level
    takes the upper half of the last pair.  When (U, D) are compatible and
    every pair chain is irreducible these halves agree across pairs, so a
    mismatch surfaces as a residual in :func:`check_compatibility`.
    """
    P = U.poset
    ranks = list(P.ranks)
    if len(ranks) == 1:
        return DistributionSequence([LevelDistribution.uniform(P, ranks[0])])
    dists = []
    for i in ranks[:-1]:
        lo, hi = stationary_ud(U, D, i)
        dists.append(lo)
    dists.append(hi)
    return DistributionSequence(dists)


def sequence_from_levels(poset: FinitePoset, levels: Sequence[Mapping], min_level: int | None = None):
    start = poset.min_rank if min_level is None else min_level
    return DistributionSequence(
        [LevelDistribution.from_mapping(poset, m, level=start + k) for k, m in enumerate(levels)]
    )
