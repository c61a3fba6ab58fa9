"""Small hand-made posets with up/down rules used as worked examples.

``fig1``  three-level poset b < l, r < a, m, c with an up rule and a down rule
``fig2``  two-by-two levels; compatible but not strongly compatible rules
``fig4``  levels 1-2 of ``fig1`` alone, as the state space of a UD chain
``fig5``  a diamond whose down rule admits no extension of (1/4, 3/4)
``n2_example5``  N^2 truncated at rank n with the 1/2-interior, 1-boundary down rule
``butterfly``  2 + 2 complete bipartite levels with every probability 1/2
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import UnknownFixture
from .poset import Direction, FinitePoset, TransitionRule, build_finite_poset


class Fixture(NamedTuple):
    poset: FinitePoset
    up: TransitionRule | None
    down: TransitionRule | None


def _rules(poset, up_entries, down_entries):
    up = TransitionRule.from_entries(poset, Direction.UP, up_entries) if up_entries else None
    down = TransitionRule.from_entries(poset, Direction.DOWN, down_entries) if down_entries else None
    return Fixture(poset, up, down)


FIG1_UP = [
    ("b", "l", 7 / 10), ("b", "r", 3 / 10),
    ("l", "a", 3 / 4), ("l", "m", 1 / 4),
    ("r", "m", 2 / 5), ("r", "c", 3 / 5),
]
FIG1_DOWN = [
    ("l", "b", 1.0), ("r", "b", 1.0),
    ("a", "l", 1.0), ("m", "l", 3 / 4), ("m", "r", 1 / 4), ("c", "r", 1.0),
]


def fig1() -> Fixture:
    poset = build_finite_poset(
        [["b"], ["l", "r"], ["a", "m", "c"]],
        [("b", "l"), ("b", "r"), ("l", "a"), ("l", "m"), ("r", "m"), ("r", "c")],
    )
    return _rules(poset, FIG1_UP, FIG1_DOWN)


def fig2() -> Fixture:
    poset = build_finite_poset(
        [["u1", "u2"], ["v1", "v2"]],
        [("u1", "v1"), ("u1", "v2"), ("u2", "v1"), ("u2", "v2")],
    )
    up = [("u1", "v1", 1 / 4), ("u1", "v2", 3 / 4), ("u2", "v1", 3 / 4), ("u2", "v2", 1 / 4)]
    down = [("v1", "u1", 3 / 4), ("v1", "u2", 1 / 4), ("v2", "u1", 1 / 4), ("v2", "u2", 3 / 4)]
    return _rules(poset, up, down)


def fig4() -> Fixture:
    poset = build_finite_poset(
        [["u1", "u2"], ["v1", "v2", "v3"]],
        [("u1", "v1"), ("u1", "v2"), ("u2", "v2"), ("u2", "v3")],
        min_rank=1,
    )
    up = [("u1", "v1", 3 / 4), ("u1", "v2", 1 / 4), ("u2", "v2", 2 / 5), ("u2", "v3", 3 / 5)]
    down = [("v1", "u1", 1.0), ("v2", "u1", 3 / 4), ("v2", "u2", 1 / 4), ("v3", "u2", 1.0)]
    return _rules(poset, up, down)


def fig5() -> Fixture:
    poset = build_finite_poset(
        [["0hat"], ["s1", "s2"], ["1hat"]],
        [("0hat", "s1"), ("0hat", "s2"), ("s1", "1hat"), ("s2", "1hat")],
    )
    down = [("1hat", "s1", 1 / 2), ("1hat", "s2", 1 / 2), ("s1", "0hat", 1.0), ("s2", "0hat", 1.0)]
    return _rules(poset, None, down)


def butterfly() -> Fixture:
    poset = build_finite_poset(
        [["u1", "u2"], ["v1", "v2"]],
        [("u1", "v1"), ("u1", "v2"), ("u2", "v1"), ("u2", "v2")],
    )
    up = [(u, v, 0.5) for u in ("u1", "u2") for v in ("v1", "v2")]
    down = [(v, u, 0.5) for u in ("u1", "u2") for v in ("v1", "v2")]
    return _rules(poset, up, down)


def n2_example5(n: int = 4) -> Fixture:
    from .ndlattice import example5_down_rule

    if n < 2:
        raise ValueError("n2_example5 needs max rank n >= 2")
    down = example5_down_rule(n)
    return Fixture(down.poset, None, down)


_FIXTURES = {
    "fig1": fig1,
    "fig2": fig2,
    "fig4": fig4,
    "fig5": fig5,
    "butterfly": butterfly,
    "n2_example5": n2_example5,
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture(name: str, **kwargs) -> Fixture:
    try:
        make = _FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {', '.join(_FIXTURES)}") from None
    return make(**kwargs)
