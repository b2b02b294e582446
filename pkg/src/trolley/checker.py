"""Satisfaction of formulas at states of a finite game.

A coalition strategy ``t`` *forces* ``phi`` at ``w`` under sacrifice ``s``
when every successor reached by an admissible profile agreeing with ``t``
satisfies ``phi``.  Admissibility is per agent (cost of its own action at
``w`` within its bound), so the admissible profiles agreeing with ``t``
form a product and their successors can be collected directly.

Strategies are quantified over *all* actions of the coalition, costly or
not.  A strategy using an over-budget action has no admissible agreeing
profile, so it forces everything and never witnesses non-forcing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .formula import (
    And,
    Bottom,
    CapExceeded,
    Formula,
    FormulaSet,
    Implies,
    Neg,
    Or,
    Prop,
    SacrificeMap,
    Strict,
    Top,
    Weak,
    format_formula,
    format_sacrifice,
)
from .game import ActionProfile, Game, Strategy

DEFAULT_CAP_PROFILES = 1_000_000
DEFAULT_CAP_POOL = 12


class CheckError(ValueError):
    pass


def resolve_sacrifice(s: SacrificeMap, g: Game) -> dict:
    """Total map agent -> bound over the game's agents.

    Entries naming agents outside the game are rejected as well as
    agents left without a bound.
    """
    unknown = s.agents() - set(g.agents)
    if unknown:
        raise CheckError(f"sacrifice names agents not in game: {sorted(unknown)}")
    try:
        return s.resolve(g.agents)
    except ValueError as e:
        raise CheckError(str(e)) from e


def admissible(g: Game, w, d: ActionProfile, s: dict) -> bool:
    return all(g.cost(w, a, x) <= s[a] for a, x in d.choice)


@dataclass(frozen=True)
class DilemmaReport:
    coalition: frozenset
    sacrifice: SacrificeMap
    pool: FormulaSet
    minimal_sets: tuple

    def to_json(self) -> dict:
        return {
            "coalition": sorted(self.coalition),
            "sacrifice": format_sacrifice(self.sacrifice),
            "pool": [format_formula(f) for f in self.pool],
            "minimal_sets": [[format_formula(f) for f in x] for x in self.minimal_sets],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


class CheckContext:
    """Evaluation state for one game, with an optional memo table.

    Not thread-safe; use one context per thread.
    """

    def __init__(self, game: Game, memo=True, cap_profiles=DEFAULT_CAP_PROFILES):
        self.game = game
        self.memo = {} if memo else None
        self._ext = {} if memo else None
        self._adm = {}
        self._agents = game.sorted_agents
        self._index = {a: i for i, a in enumerate(self._agents)}
        if game.profile_count() > cap_profiles:
            raise CapExceeded(
                f"game has {game.profile_count()} action profiles, above the cap of {cap_profiles}"
            )

    # -- strategies and outcomes ------------------------------------------

    def resolve(self, s: SacrificeMap) -> tuple:
        r = resolve_sacrifice(s, self.game)
        return tuple(r[a] for a in self._agents)

    def _coalition(self, coalition) -> tuple:
        c = frozenset(coalition)
        unknown = c - set(self._agents)
        if unknown:
            raise CheckError(f"coalition names agents not in game: {sorted(unknown)}")
        if not c:
            raise CheckError("coalition must be nonempty")
        return tuple(a for a in self._agents if a in c)

    def admissible_actions(self, w, bounds: tuple) -> tuple:
        key = (w, bounds)
        hit = self._adm.get(key)
        if hit is None:
            g = self.game
            hit = tuple(
                tuple(x for x in g.actions[a] if g.cost(w, a, x) <= b)
                for a, b in zip(self._agents, bounds)
            )
            self._adm[key] = hit
        return hit

    def strategies(self, coalition: tuple):
        return product(*(self.game.actions[a] for a in coalition))

    def outcomes(self, w, coalition: tuple, choice: tuple, bounds: tuple) -> set:
        """Successors of ``w`` under admissible profiles agreeing with the strategy."""
        adm = self.admissible_actions(w, bounds)
        slots = list(adm)
        for a, x in zip(coalition, choice):
            i = self._index[a]
            if x not in adm[i]:
                return set()
            slots[i] = (x,)
        out = set()
        for prof in product(*slots):
            out.update(self.game.successors(w, prof))
        return out

    # -- truth -------------------------------------------------------------

    def extension(self, f: Formula) -> frozenset:
        """States satisfying ``f``."""
        if self._ext is not None:
            hit = self._ext.get(f)
            if hit is not None:
                return hit
        ext = frozenset(w for w in self.game.states if self.satisfies(w, f))
        if self._ext is not None:
            self._ext[f] = ext
        return ext

    def forces(self, w, t: Strategy, s: SacrificeMap, f: Formula) -> bool:
        coalition = self._coalition(t.coalition)
        choice = tuple(t.as_dict()[a] for a in coalition)
        return self.outcomes(w, coalition, choice, self.resolve(s)) <= self.extension(f)

    def forced_masks(self, w, coalition, members: FormulaSet, s: SacrificeMap) -> list:
        """One bitmask per strategy; bit ``i`` set iff the strategy forces member ``i``."""
        c = self._coalition(coalition)
        bounds = self.resolve(s)
        exts = [self.extension(m) for m in members]
        masks = []
        for choice in self.strategies(c):
            reach = self.outcomes(w, c, choice, bounds)
            m = 0
            for i, ext in enumerate(exts):
                if reach <= ext:
                    m |= 1 << i
            masks.append(m)
        return masks

    def holds_weak(self, w, coalition, members: FormulaSet, s: SacrificeMap) -> bool:
        return all(self.forced_masks(w, coalition, members, s))

    def holds_strict(self, w, coalition, members: FormulaSet, s: SacrificeMap) -> bool:
        masks = self.forced_masks(w, coalition, members, s)
        full = (1 << len(members)) - 1
        if not _weak_on(masks, full):
            return False
        # Weak dilemmas are closed under supersets, so checking the maximal
        # proper subsets covers every nonempty proper subset.
        if len(members) == 1:
            return True
        return not any(_weak_on(masks, full & ~(1 << i)) for i in range(len(members)))

    def satisfies(self, w, f: Formula) -> bool:
        if self.memo is not None:
            key = (w, f)
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        v = self._eval(w, f)
        if self.memo is not None:
            self.memo[key] = v
        return v

    def _eval(self, w, f) -> bool:
        if isinstance(f, Prop):
            return self.game.holds(f.name, w)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Neg):
            return not self.satisfies(w, f.f)
        if isinstance(f, Implies):
            return not self.satisfies(w, f.l) or self.satisfies(w, f.r)
        if isinstance(f, And):
            return self.satisfies(w, f.l) and self.satisfies(w, f.r)
        if isinstance(f, Or):
            return self.satisfies(w, f.l) or self.satisfies(w, f.r)
        if isinstance(f, Strict):
            return self.holds_strict(w, f.coalition, f.members, f.sacrifice)
        if isinstance(f, Weak):
            return self.holds_weak(w, f.coalition, f.members, f.sacrifice)
        raise TypeError(f"not a formula: {f!r}")

    def valid(self, f: Formula) -> bool:
        return all(self.satisfies(w, f) for w in self.game.states)

    def minimal_dilemma_sets(self, w, coalition, s: SacrificeMap, pool: FormulaSet,
                             cap_pool=DEFAULT_CAP_POOL) -> DilemmaReport:
        """Every subset of ``pool`` that is a strict dilemma at ``w``.

        These are exactly the minimal weak-dilemma subsets of the pool.
        """
        if len(pool) == 0:
            raise CheckError("pool must be nonempty")
        if len(pool) > cap_pool:
            raise CapExceeded(f"pool of {len(pool)} formulas exceeds the cap of {cap_pool}")
        masks = self.forced_masks(w, coalition, pool, s)
        n = len(pool)
        weak = [False] * (1 << n)
        for sub in range(1, 1 << n):
            weak[sub] = _weak_on(masks, sub)
        found = []
        for sub in range(1, 1 << n):
            if weak[sub] and not any(weak[sub & ~(1 << i)] for i in range(n) if sub >> i & 1):
                found.append(FormulaSet(pool[i] for i in range(n) if sub >> i & 1))
        found.sort(key=lambda x: (len(x), [format_formula(f) for f in x]))
        return DilemmaReport(frozenset(coalition), s, pool, tuple(found))


def _weak_on(masks, sub) -> bool:
    return all(m & sub for m in masks)


# -- one-shot helpers ---------------------------------------------------------

def forces(g: Game, w, t: Strategy, s: SacrificeMap, f: Formula) -> bool:
    return CheckContext(g).forces(w, t, s, f)


def holds_weak(g: Game, w, coalition, members, s: SacrificeMap) -> bool:
    return CheckContext(g).holds_weak(w, coalition, _as_set(members), s)


def holds_strict(g: Game, w, coalition, members, s: SacrificeMap) -> bool:
    return CheckContext(g).holds_strict(w, coalition, _as_set(members), s)


def satisfies(g: Game, w, f: Formula) -> bool:
    if w not in g.states:
        raise CheckError(f"unknown state {w!r}")
    return CheckContext(g).satisfies(w, f)


def valid_in_game(g: Game, f: Formula) -> bool:
    return CheckContext(g).valid(f)


def minimal_dilemma_sets(g: Game, w, coalition, s: SacrificeMap, pool,
                         cap_pool=DEFAULT_CAP_POOL) -> DilemmaReport:
    return CheckContext(g).minimal_dilemma_sets(w, coalition, s, _as_set(pool), cap_pool)


def _as_set(members) -> FormulaSet:
    return members if isinstance(members, FormulaSet) else FormulaSet(members)
