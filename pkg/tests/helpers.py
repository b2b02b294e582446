"""Shared generators for the tests: hypothesis strategies and seeded instances."""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from trolley.formula import (
    And, Bottom, FormulaSet, Implies, Neg, Or, Prop, SacrificeMap, Strict, Top, Weak,
)
from trolley.fuzz import FuzzConfig, random_game

PROPS = ("p", "q", "r")
AGENTS = ("a", "b")

rationals = st.fractions(min_value=-2, max_value=3, max_denominator=3)
coalitions = st.frozensets(st.sampled_from(AGENTS), min_size=1)


@st.composite
def sacrifices(draw, agents=AGENTS):
    if draw(st.booleans()):
        return SacrificeMap.uniform(draw(rationals))
    listed = draw(st.lists(st.sampled_from(agents), unique=True, min_size=1))
    wildcard = draw(st.none() | rationals)
    if wildcard is None:
        listed = list(agents)
    return SacrificeMap.of({a: draw(rationals) for a in listed}, wildcard)


def _compound(children):
    members = st.lists(children, min_size=1, max_size=3).map(FormulaSet)
    return st.one_of(
        children.map(Neg),
        st.builds(Implies, children, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Strict, coalitions, members, sacrifices()),
        st.builds(Weak, coalitions, members, sacrifices()),
    )


formulas = st.recursive(
    st.one_of(st.sampled_from(PROPS).map(Prop), st.just(Top()), st.just(Bottom())),
    _compound,
    max_leaves=8,
)


def small_game(seed, states=None, agents=None, actions=None, density=None):
    """Seeded game with at most 4 states, 2 agents and 3 actions per agent."""
    rng = random.Random(f"small:{seed}")
    cfg = FuzzConfig(
        num_states=states or rng.randint(1, 4),
        num_agents=agents or rng.randint(1, 2),
        actions_per_agent=actions or rng.randint(1, 3),
        transition_density=density if density is not None else rng.choice(
            [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]),
        cost_min=0, cost_max=2, num_props=3,
    )
    return random_game(cfg, seed=f"small:{seed}")


def random_member(rng, game, depth=1):
    props = sorted(game.valuation)
    r = rng.random()
    if depth <= 0 or r < 0.45:
        f = Prop(rng.choice(props))
        return Neg(f) if rng.random() < 0.4 else f
    if r < 0.85:
        op = rng.choice((And, Or, Implies))
        return op(random_member(rng, game, depth - 1), random_member(rng, game, depth - 1))
    inner = FormulaSet([random_member(rng, game, 0) for _ in range(rng.randint(1, 2))])
    return Strict(random_coalition(rng, game), inner, random_sacrifice(rng, game))


def random_coalition(rng, game):
    return frozenset(rng.sample(list(game.agents), rng.randint(1, len(game.agents))))


def random_sacrifice(rng, game):
    grid = [Fraction(k, 2) for k in range(-1, 6)]
    return SacrificeMap.of({a: rng.choice(grid) for a in game.agents})


def dilemma_instances(n, seed=0, max_members=3):
    """``n`` seeded (game, state, C, X, s) tuples; one game per ten instances."""
    out = []
    game = None
    for i in range(n):
        rng = random.Random(f"inst:{seed}:{i}")
        if i % 10 == 0:
            game = small_game(f"{seed}:{i}")
        members = FormulaSet([random_member(rng, game) for _ in range(rng.randint(1, max_members))])
        out.append((game, rng.choice(game.states), random_coalition(rng, game),
                    members, random_sacrifice(rng, game)))
    return out
