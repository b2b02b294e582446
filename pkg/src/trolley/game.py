"""Finite games: states, per-agent actions, costs, a mechanism relation, and a valuation.

The JSON file format::

    {
      "agents": ["a", ...],
      "states": ["w", ...],
      "actions": {"a": ["a0", "a1"], ...},
      "costs": {"default": "0",
                "entries": [{"state": "w", "agent": "a", "action": "a1", "cost": "1"}]},
      "mechanism": [{"from": "w", "profile": {"a": "a0"}, "to": "u0"}],
      "valuation": {"p": ["u0"]}
    }

Rationals are strings ``"n"`` or ``"n/d"``.  A cost entry may use ``"*"`` as
its state to apply in every state; an entry naming a concrete state wins.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping

from .formula import format_rational
from .parser import parse_rational


class GameError(ValueError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Transition:
    source: str
    profile: tuple  # sorted (agent, action) pairs
    target: str

    def __post_init__(self):
        p = self.profile.items() if isinstance(self.profile, Mapping) else self.profile
        object.__setattr__(self, "profile", tuple(sorted(p)))

    def choice(self):
        return dict(self.profile)


@dataclass(frozen=True)
class ActionProfile:
    """Total assignment of an action to every agent."""

    choice: tuple

    def __post_init__(self):
        c = self.choice.items() if isinstance(self.choice, Mapping) else self.choice
        object.__setattr__(self, "choice", tuple(sorted(c)))

    def __getitem__(self, agent):
        return dict(self.choice)[agent]

    def as_dict(self):
        return dict(self.choice)


@dataclass(frozen=True)
class Strategy:
    """Actions for the members of one coalition only."""

    coalition: frozenset
    choice: tuple

    def __post_init__(self):
        c = self.choice.items() if isinstance(self.choice, Mapping) else self.choice
        c = tuple(sorted(c))
        coalition = frozenset(self.coalition)
        if not coalition:
            raise GameError("strategy coalition must be nonempty")
        if {a for a, _ in c} != coalition or len(c) != len(coalition):
            raise GameError(f"strategy domain {[a for a, _ in c]} differs from coalition {sorted(coalition)}")
        object.__setattr__(self, "coalition", coalition)
        object.__setattr__(self, "choice", c)

    def as_dict(self):
        return dict(self.choice)


def agrees(t: Strategy, d: ActionProfile) -> bool:
    """True iff ``d`` picks the same action as ``t`` for every agent of ``t``'s coalition."""
    dd = d.as_dict()
    return all(dd.get(a) == x for a, x in t.choice)


@dataclass(frozen=True)
class Game:
    agents: tuple
    states: tuple
    actions: dict  # agent -> tuple of actions
    default_cost: Fraction = Fraction(0)
    costs: dict = field(default_factory=dict)  # (state | "*", agent, action) -> Fraction
    mechanism: tuple = ()
    valuation: dict = field(default_factory=dict)  # prop -> frozenset of states

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", {a: tuple(xs) for a, xs in self.actions.items()})
        object.__setattr__(self, "default_cost", Fraction(self.default_cost))
        object.__setattr__(self, "costs", {k: Fraction(v) for k, v in self.costs.items()})
        object.__setattr__(
            self, "mechanism",
            tuple(t if isinstance(t, Transition) else Transition(*t) for t in self.mechanism),
        )
        object.__setattr__(self, "valuation", {p: frozenset(ws) for p, ws in self.valuation.items()})
        succ = {}
        for t in self.mechanism:
            key = (t.source, tuple(a for _, a in t.profile))
            succ.setdefault(key, [])
            if t.target not in succ[key]:
                succ[key].append(t.target)
        object.__setattr__(self, "_succ", {k: tuple(v) for k, v in succ.items()})

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other or (isinstance(other, Game) and to_dict(self) == to_dict(other))

    @property
    def sorted_agents(self):
        return tuple(sorted(self.agents))

    def cost(self, state, agent, action) -> Fraction:
        c = self.costs.get((state, agent, action))
        if c is None:
            c = self.costs.get(("*", agent, action), self.default_cost)
        return c

    def successors(self, state, profile) -> tuple:
        """Successor states of ``state`` under ``profile``.

        ``profile`` is either an :class:`ActionProfile` or a tuple of actions
        in :attr:`sorted_agents` order.
        """
        if isinstance(profile, ActionProfile):
            profile = tuple(a for _, a in profile.choice)
        return self._succ.get((state, profile), ())

    def holds(self, prop, state) -> bool:
        return state in self.valuation.get(prop, ())

    def profiles(self):
        """All action profiles, as tuples in :attr:`sorted_agents` order."""
        return product(*(self.actions[a] for a in self.sorted_agents))

    def profile_count(self) -> int:
        n = 1
        for a in self.agents:
            n *= len(self.actions.get(a, ()))
        return n


def validate(g: Game, strategies=(), profiles=()) -> list:
    """List every violated game invariant; empty means valid.

    Optional strategies and profiles are checked against the game too.
    """
    v = []
    for kind, names in (("agent", g.agents), ("state", g.states)):
        if not names:
            v.append(f"game has no {kind}s")
        seen = set()
        for n in names:
            if n in seen:
                v.append(f"duplicate {kind} {n!r}")
            seen.add(n)
    agents, states = set(g.agents), set(g.states)
    for a in g.agents:
        if not g.actions.get(a):
            v.append(f"agent {a!r} has no actions")
        elif len(set(g.actions[a])) != len(g.actions[a]):
            v.append(f"agent {a!r} has duplicate actions")
    for a in g.actions:
        if a not in agents:
            v.append(f"actions given for unknown agent {a!r}")
    for (w, a, x) in g.costs:
        if w != "*" and w not in states:
            v.append(f"cost entry for unknown state {w!r}")
        if a not in agents:
            v.append(f"cost entry for unknown agent {a!r}")
        elif x not in g.actions.get(a, ()):
            v.append(f"cost entry for unknown action {x!r} of agent {a!r}")
    for i, t in enumerate(g.mechanism):
        if t.source not in states:
            v.append(f"transition {i}: unknown state {t.source!r}")
        if t.target not in states:
            v.append(f"transition {i}: unknown state {t.target!r}")
        v.extend(f"transition {i}: {msg}" for msg in _profile_violations(g, dict(t.profile)))
    for p, ws in g.valuation.items():
        for w in sorted(ws - states):
            v.append(f"valuation of {p!r} names unknown state {w!r}")
    for t in strategies:
        if not t.coalition <= agents:
            v.append(f"strategy coalition {sorted(t.coalition)} not within game agents")
        for a, x in t.choice:
            if a in agents and x not in g.actions.get(a, ()):
                v.append(f"strategy action {x!r} unknown for agent {a!r}")
    for d in profiles:
        v.extend(_profile_violations(g, d.as_dict()))
    return v


def _profile_violations(g, choice):
    v = []
    agents = set(g.agents)
    missing = agents - set(choice)
    if missing:
        v.append(f"profile is not total, missing {sorted(missing)}")
    for a, x in choice.items():
        if a not in agents:
            v.append(f"profile names unknown agent {a!r}")
        elif x not in g.actions.get(a, ()):
            v.append(f"profile action {x!r} unknown for agent {a!r}")
    return v


def checked(g: Game) -> Game:
    violations = validate(g)
    if violations:
        raise GameError(violations)
    return g


# -- serialization -----------------------------------------------------------

def from_dict(data: dict) -> Game:
    try:
        costs = data.get("costs", {})
        entries = {}
        for e in costs.get("entries", []):
            key = (e["state"], e["agent"], e["action"])
            if key in entries:
                raise GameError(f"duplicate cost entry {key}")
            entries[key] = parse_rational(e["cost"])
        g = Game(
            agents=list(data["agents"]),
            states=list(data["states"]),
            actions={a: list(xs) for a, xs in data["actions"].items()},
            default_cost=parse_rational(costs.get("default", "0")),
            costs=entries,
            mechanism=[Transition(t["from"], t["profile"], t["to"]) for t in data.get("mechanism", [])],
            valuation={p: list(ws) for p, ws in data.get("valuation", {}).items()},
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise GameError(f"malformed game document: {e!r}") from e
    except ValueError as e:
        if isinstance(e, GameError):
            raise
        raise GameError(str(e)) from e
    return checked(g)


def parse_game(text: str) -> Game:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise GameError("game document must be a JSON object")
    return from_dict(data)


def load_game(path) -> Game:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def to_dict(g: Game) -> dict:
    return {
        "agents": list(g.agents),
        "states": list(g.states),
        "actions": {a: list(g.actions[a]) for a in g.agents},
        "costs": {
            "default": format_rational(g.default_cost),
            "entries": [
                {"state": w, "agent": a, "action": x, "cost": format_rational(c)}
                for (w, a, x), c in g.costs.items()
            ],
        },
        "mechanism": [
            {"from": t.source, "profile": dict(t.profile), "to": t.target} for t in g.mechanism
        ],
        "valuation": {p: sorted(ws) for p, ws in sorted(g.valuation.items())},
    }


def serialize(g: Game, indent=None) -> str:
    return json.dumps(to_dict(g), indent=indent)
