"""Small desk games and the two village epidemic scenarios.

The village games are generated here and also shipped as JSON under
``trolley/data/games``; a test keeps the two in sync.
"""
from __future__ import annotations

from importlib import resources
from itertools import combinations, product

from .game import Game, Transition, checked, parse_game

VILLAGES = ("v1", "v2", "v3", "v4")


def g_term() -> Game:
    """One state, one agent with a free and a costly action, no transitions."""
    return checked(Game(
        agents=["a"],
        states=["w"],
        actions={"a": ["a0", "a1"]},
        costs={("w", "a", "a1"): 1},
    ))


def g_fork() -> Game:
    """Agent ``a`` picks between reaching ``u0`` (p holds) for free or ``u1`` (q holds) at cost 1."""
    return checked(Game(
        agents=["a"],
        states=["w", "u0", "u1"],
        actions={"a": ["a0", "a1"]},
        costs={("*", "a", "a1"): 1},
        mechanism=[
            Transition("w", {"a": "a0"}, "u0"),
            Transition("w", {"a": "a1"}, "u1"),
        ],
        valuation={"p": ["u0"], "q": ["u1"]},
    ))


def _subsets(items):
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def survivor_state(survivors) -> str:
    digits = "".join(v[1] for v in sorted(survivors))
    return "surv_" + (digits or "none")


def send_action(villages) -> str:
    digits = "".join(v[1] for v in sorted(villages))
    return "send_" + (digits or "none")


def _outcome_states_and_valuation():
    outcomes = [frozenset(s) for s in _subsets(VILLAGES)]
    states = ["init"] + [survivor_state(s) for s in outcomes]
    valuation = {
        f"d{v[1]}": [survivor_state(s) for s in outcomes if v not in s] for v in VILLAGES
    }
    return outcomes, states, valuation


def village1(mb_cap: int = 2) -> Game:
    """Diseases a (v1, v2, v3) and b (v2, v3, v4); ``m_b`` hands doses to two helpers.

    ``m_a`` chooses the set of villages to send medicine to.  ``m_b`` chooses
    ``(n1, n2)`` doses for helpers h1 (v1, v2) and h2 (v3, v4), each at most
    ``mb_cap``.  The helpers' choices are nondeterminism of the mechanism:
    h1 may or may not dose v2 (a dose to v1 is useless), h2 doses any subset
    of {v3, v4} of size at most n2.
    """
    _, states, valuation = _outcome_states_and_valuation()
    ma_actions = [frozenset(s) for s in _subsets(VILLAGES)]
    mb_actions = list(product(range(mb_cap + 1), repeat=2))
    costs = {("*", "m_a", send_action(s)): len(s) for s in ma_actions}
    costs.update({("*", "m_b", f"give_{n1}_{n2}"): n1 + n2 for n1, n2 in mb_actions})
    mechanism = []
    for sa in ma_actions:
        for n1, n2 in mb_actions:
            h1_options = [frozenset()] + ([frozenset({"v2"})] if n1 >= 1 else [])
            h2_options = [frozenset(s) for s in _subsets(("v3", "v4")) if len(s) <= n2]
            targets = []
            for h1, h2 in product(h1_options, h2_options):
                dosed_b = h1 | h2
                survivors = {v for v in ("v1",) if v in sa}
                survivors |= {v for v in ("v2", "v3") if v in sa and v in dosed_b}
                survivors |= {v for v in ("v4",) if v in dosed_b}
                t = survivor_state(survivors)
                if t not in targets:
                    targets.append(t)
            profile = {"m_a": send_action(sa), "m_b": f"give_{n1}_{n2}"}
            mechanism.extend(Transition("init", profile, t) for t in targets)
    return checked(Game(
        agents=["m_a", "m_b"],
        states=states,
        actions={
            "m_a": [send_action(s) for s in ma_actions],
            "m_b": [f"give_{n1}_{n2}" for n1, n2 in mb_actions],
        },
        costs=costs,
        mechanism=mechanism,
        valuation=valuation,
    ))


def village2() -> Game:
    """All four villages share disease a; ``m_a`` and ``m_pa`` both send medicine directly."""
    _, states, valuation = _outcome_states_and_valuation()
    subsets = [frozenset(s) for s in _subsets(VILLAGES)]
    agents = ["m_a", "m_pa"]
    costs = {("*", a, send_action(s)): len(s) for a in agents for s in subsets}
    mechanism = [
        Transition("init", {"m_a": send_action(x), "m_pa": send_action(y)}, survivor_state(x | y))
        for x in subsets
        for y in subsets
    ]
    return checked(Game(
        agents=agents,
        states=states,
        actions={a: [send_action(s) for s in subsets] for a in agents},
        costs=costs,
        mechanism=mechanism,
        valuation=valuation,
    ))


BUILDERS = {
    "term": g_term,
    "fork": g_fork,
    "village1": village1,
    "village2": village2,
}


def shipped_game_text(name: str) -> str:
    return resources.files("trolley.data.games").joinpath(f"{name}.json").read_text(encoding="utf-8")


def shipped_game(name: str) -> Game:
    return parse_game(shipped_game_text(name))
