"""Reference evaluation of dilemma clauses, quantifier by quantifier.

Kept deliberately naive: it enumerates every full action profile and
scans the raw transition list, and it never uses the checker's
per-strategy outcome sets or its superset-closure shortcut.  Tests compare
it with :mod:`trolley.checker`.  Member formulas are still evaluated
through the checker, which is the recursion both sides share.
"""
from __future__ import annotations

from itertools import combinations, product

from .checker import CheckContext, resolve_sacrifice


def _profiles(g):
    agents = list(g.agents)
    for choice in product(*(g.actions[a] for a in agents)):
        yield dict(zip(agents, choice))


def _witnesses(g, w, t, s):
    """(profile, successor) pairs with |delta|_w <= s, t =_C delta and (w, delta, u) in M."""
    for d in _profiles(g):
        if not all(g.cost(w, a, d[a]) <= s[a] for a in g.agents):
            continue
        if any(d[a] != x for a, x in t.items()):
            continue
        for tr in g.mechanism:
            if tr.source == w and dict(tr.profile) == d:
                yield d, tr.target


def _strategies(g, coalition):
    c = sorted(coalition)
    for choice in product(*(g.actions[a] for a in c)):
        yield dict(zip(c, choice))


def clause_a(g, w, coalition, members, sacrifice, ctx=None) -> bool:
    """Every strategy has one member true in every admissible agreeing successor."""
    ctx = ctx or CheckContext(g)
    s = resolve_sacrifice(sacrifice, g)
    for t in _strategies(g, coalition):
        succ = [u for _, u in _witnesses(g, w, t, s)]
        if not any(all(ctx.satisfies(u, phi) for u in succ) for phi in members):
            return False
    return True


def clause_b(g, w, coalition, members, sacrifice, ctx=None) -> bool:
    """Every nonempty proper subset has a strategy under which each of its
    members fails in some admissible agreeing successor."""
    ctx = ctx or CheckContext(g)
    s = resolve_sacrifice(sacrifice, g)
    members = list(members)
    for k in range(1, len(members)):
        for ys in combinations(members, k):
            found = False
            for t in _strategies(g, coalition):
                succ = [u for _, u in _witnesses(g, w, t, s)]
                if all(any(not ctx.satisfies(u, phi) for u in succ) for phi in ys):
                    found = True
                    break
            if not found:
                return False
    return True


def holds_strict_literal(g, w, coalition, members, sacrifice, ctx=None) -> bool:
    ctx = ctx or CheckContext(g)
    return (clause_a(g, w, coalition, members, sacrifice, ctx)
            and clause_b(g, w, coalition, members, sacrifice, ctx))


def holds_weak_literal(g, w, coalition, members, sacrifice, ctx=None) -> bool:
    return clause_a(g, w, coalition, members, sacrifice, ctx)
