from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetchains.engine import (
    DistributionSequence,
    LevelDistribution,
    apply_rule,
    check_compatibility,
    propagate,
    stationary_ud,
)
from posetchains.errors import BadMu, CapExceeded, EmptyPartition, NoSuchRowLength
from posetchains.poset import validate_rule
from posetchains.young import (
    P,
    Corner,
    Partition,
    boundary,
    derow_rule,
    inner_corner,
    outer_corner,
    partitions_of,
    row_chain_formula,
    row_rule,
    scaled_shape,
    stationary_ud_formula,
    young_poset,
    young_rules,
)

# OEIS A000041
PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135]


def test_partition_counts():
    assert [len(partitions_of(n)) for n in range(15)] == PARTITION_COUNTS


def test_reverse_lex_order():
    assert [str(p) for p in partitions_of(4)] == ["4", "3,1", "2,2", "2,1,1", "1,1,1,1"]


def test_cap():
    with pytest.raises(CapExceeded):
        partitions_of(61)


def test_multiplicities():
    lam = P(3, 3, 2, 1, 1, 1)
    assert lam.r(3) == 2 and lam.r(1) == 3 and lam.r(5) == 0
    assert lam.size == 11 and len(lam) == 6
    assert lam == Partition.from_parts([1, 3, 1, 2, 3, 1])
    assert lam.covers(P(3, 2, 2, 1, 1, 1))
    assert lam.covers(P(3, 3, 2, 1, 1))
    assert not lam.covers(P(3, 3, 1, 1, 1, 1, 1))


def test_corners():
    lam = P(3, 3, 2, 1)
    assert outer_corner(lam, 3) == Corner(3, 2)
    assert inner_corner(lam, 3) == Corner(3, 0)
    assert outer_corner(lam, 2) == Corner(2, 3)
    assert inner_corner(lam, 2) == Corner(2, 2)
    assert outer_corner(lam, 1) == Corner(1, 4)
    assert inner_corner(lam, 1) == Corner(1, 3)
    with pytest.raises(NoSuchRowLength):
        outer_corner(lam, 4)


def test_derow_examples():
    assert dict(derow_rule(P(2, 1))) == {P(1, 1): 0.5, P(2): 0.5}
    assert dict(derow_rule(P(3, 3, 1))) == {P(3, 2, 1): pytest.approx(2 / 3), P(3, 3): pytest.approx(1 / 3)}
    assert dict(derow_rule(P(1))) == {Partition(()): 1.0}
    with pytest.raises(EmptyPartition):
        derow_rule(Partition(()))


def test_row_examples():
    assert dict(row_rule(P(1), 0.3)) == pytest.approx({P(1, 1): 0.3, P(2): 0.7})
    got = dict(row_rule(P(2, 1), 0.3))
    assert got == pytest.approx({P(2, 1, 1): 0.3, P(3, 1): 0.35, P(2, 2): 0.35})
    got = dict(row_rule(P(2, 2, 1), 0.5))
    assert got == pytest.approx({P(2, 2, 1, 1): 0.5, P(3, 2, 1): 1 / 3, P(2, 2, 2): 1 / 6})
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(BadMu):
            row_rule(P(1), bad)


@pytest.mark.parametrize("mu", [0.1, 0.5, 0.9])
def test_rules_validate(mu):
    Y, U, D = young_rules(7, mu)
    assert validate_rule(Y, U).valid and validate_rule(Y, D).valid


def test_poset_from_empty_partition():
    Y = young_poset(3, n_min=0)
    assert [Y.level_size(r) for r in Y.ranks] == [1, 1, 2, 3]
    assert Y.ranks_from_covers() == dict(enumerate(Y.rank))


def _row_chain_by_paths(n, mu):
    """Law at level n by enumerating every ordered-row history exactly.

    Rows are kept as an ordered list; at each step a new row appears with
    probability mu, otherwise one of the N rows (uniformly) grows by one.
    """
    mu = Fraction(mu)
    layer = {(1,): Fraction(1)}
    for _ in range(n - 1):
        nxt = defaultdict(Fraction)
        for rows, p in layer.items():
            N = len(rows)
            nxt[rows + (1,)] += p * mu
            for j in range(N):
                grown = rows[:j] + (rows[j] + 1,) + rows[j + 1:]
                nxt[grown] += p * (1 - mu) / N
        layer = nxt
    out = defaultdict(Fraction)
    for rows, p in layer.items():
        out[P(*rows)] += p
    return out


@pytest.mark.parametrize("mu", [Fraction(1, 3), Fraction(1, 2), Fraction(4, 5)])
@pytest.mark.parametrize("n", [2, 4, 6])
def test_row_chain_law_matches_path_enumeration(n, mu):
    oracle = _row_chain_by_paths(n, mu)
    assert set(oracle) == set(partitions_of(n))
    for lam, p in oracle.items():
        assert row_chain_formula(lam, float(mu)) == pytest.approx(float(p), rel=1e-13)


@pytest.mark.parametrize("mu", [0.2, 0.65])
def test_row_chain_law_by_propagation(mu):
    Y, U, _ = young_rules(8, mu)
    seq = propagate(U, LevelDistribution.point_mass(Y, P(1)), 8)
    for n in Y.ranks:
        d = seq.at(n)
        for lam, w in zip(Y.level_keys(n), d.weights):
            assert w == pytest.approx(row_chain_formula(lam, mu), abs=1e-13)


def test_row_chain_sums_to_one():
    for n in range(1, 15):
        assert sum(row_chain_formula(l, 0.37) for l in partitions_of(n)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("mu", [0.25, 0.5])
def test_ud_stationary_formula(mu):
    Y, U, D = young_rules(6, mu)
    for i in range(1, 6):
        lo, hi = stationary_ud(U, D, i)
        for d in (lo, hi):
            for lam, w in zip(Y.level_keys(d.level), d.weights):
                # each level carries half the mass of the joint chain
                assert w / 2 == pytest.approx(stationary_ud_formula(lam, mu), abs=1e-12)


def test_row_chain_sequence_strongly_compatible_with_derow():
    Y, U, D = young_rules(7, 0.4)
    seq = DistributionSequence([
        LevelDistribution(Y, n, np.array([row_chain_formula(l, 0.4) for l in Y.level_keys(n)]))
        for n in Y.ranks
    ])
    rep = check_compatibility(U, D, seq)
    assert rep.strongly_compatible and rep.max_residual < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.floats(0.05, 0.95))
def test_derow_pulls_back_row_law(n, mu):
    Y, U, D = young_rules(n, mu, n_min=n - 1)
    hi = LevelDistribution(Y, n, np.array([row_chain_formula(l, mu) for l in Y.level_keys(n)]))
    lo = apply_rule(D, hi)
    want = np.array([row_chain_formula(l, mu) for l in Y.level_keys(n - 1)])
    assert np.abs(lo.weights - want).max() < 1e-12


# -- scaled shape -----------------------------------------------------------

def test_boundary_counts_rows_longer_than_threshold():
    grid = [0.0, 0.5, 1.0, 1.5, 3.0]
    # a_n = 2: thresholds 0, 1, 2, 3, 6 on rows (4, 2, 1)
    y = boundary([1, 4, 2], 7, 2.0, grid)
    assert y == pytest.approx(np.array([3, 2, 1, 1, 0]) * 2 / 7)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=20), st.floats(0.5, 10))
def test_scaled_shape_area_is_one(rows, a_n):
    lam = P(*rows)
    sh = scaled_shape(lam, a_n, np.linspace(0, 40, 9))
    assert sh.area == pytest.approx(1.0)
    # integrate the step function exactly: it is constant on (k/a_n, (k+1)/a_n]
    fine = (np.arange(max(rows)) + 0.5) / a_n
    heights = boundary(lam.parts, lam.size, a_n, fine)
    assert float(np.sum(heights) / a_n) == pytest.approx(1.0)


def test_scaled_shape_monotone():
    sh = scaled_shape(P(5, 3, 3, 1), 2.0, np.linspace(0, 4, 41))
    assert np.all(np.diff(sh.y) <= 0)
    assert sh.y[-1] == 0
