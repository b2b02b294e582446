import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import dilemma_instances, random_coalition, random_member, small_game
from trolley import fixtures
from trolley.checker import (
    CheckContext, CheckError, admissible, forces, holds_strict, holds_weak, minimal_dilemma_sets,
    resolve_sacrifice, satisfies, valid_in_game,
)
from trolley.formula import Bottom, CapExceeded, FormulaSet, Implies, Or, Prop, SacrificeMap, Strict
from trolley.game import ActionProfile, Strategy
from trolley.literal import holds_strict_literal
from trolley.parser import parse_formula

V1, V2 = fixtures.village1(), fixtures.village2()
FORK, TERM = fixtures.g_fork(), fixtures.g_term()
d1, d2, d3, d4 = (Prop(f"d{i}") for i in range(1, 5))
p, q = Prop("p"), Prop("q")
S22 = SacrificeMap.of({"m_a": 2, "m_b": 2})
A1 = SacrificeMap.of({"a": 1})
MA, MB = frozenset({"m_a"}), frozenset({"m_b"})


def test_resolve_sacrifice():
    assert resolve_sacrifice(S22, V1) == {"m_a": 2, "m_b": 2}
    assert resolve_sacrifice(SacrificeMap.uniform(0), FORK) == {"a": 0}
    with pytest.raises(CheckError):
        resolve_sacrifice(SacrificeMap.of({"m_a": 2}), V1)
    with pytest.raises(CheckError):
        resolve_sacrifice(SacrificeMap.of({"m_a": 2, "m_b": 2, "zz": 1}), V1)


def test_admissible():
    s = resolve_sacrifice(S22, V1)
    assert admissible(V1, "init", ActionProfile({"m_a": "send_12", "m_b": "give_1_1"}), s)
    assert not admissible(V1, "init", ActionProfile({"m_a": "send_123", "m_b": "give_0_0"}), s)
    huge = resolve_sacrifice(SacrificeMap.uniform(10**6), V1)
    assert all(admissible(V1, "init", ActionProfile(dict(zip(V1.sorted_agents, d))), huge)
               for d in V1.profiles())


def test_forces():
    assert forces(TERM, "w", Strategy({"a"}, {"a": "a0"}), A1, Bottom())
    t0, t1 = Strategy({"a"}, {"a": "a0"}), Strategy({"a"}, {"a": "a1"})
    assert forces(FORK, "w", t0, A1, p)
    assert not forces(FORK, "w", t0, A1, q)
    # a1 costs 1 > 0: no admissible agreeing profile
    assert forces(FORK, "w", t1, SacrificeMap.of({"a": 0}), q)
    assert forces(FORK, "w", t1, SacrificeMap.of({"a": 0}), Bottom())


def test_holds_weak():
    assert holds_weak(FORK, "w", {"a"}, FormulaSet([p, q]), A1)
    assert holds_weak(V1, "init", MB, FormulaSet([d2, Or(d3, d4)]), S22)
    assert not holds_weak(V1, "init", MB, FormulaSet([d3]), S22)


def test_holds_strict():
    assert holds_strict(V1, "init", MA, FormulaSet([d1, d2, d3]), S22)
    assert not holds_strict(V1, "init", MB, FormulaSet([d2, d3, d4]), S22)
    assert not holds_strict(TERM, "w", {"a"}, FormulaSet([p, q]), A1)
    assert holds_strict(TERM, "w", {"a"}, FormulaSet([p]), A1)


def test_satisfies():
    assert satisfies(FORK, "u0", p)
    assert not satisfies(FORK, "w", p)
    assert satisfies(V1, "init", parse_formula("[m_b : d2, d3 & d4 @ m_a:2, m_b:1]"))
    assert satisfies(V2, "init", parse_formula("[m_a, m_pa : d1,d2,d3,d4 @ m_a:2, m_pa:1]"))
    assert not satisfies(V2, "init", parse_formula("[m_a : d1,d2,d3,d4 @ m_a:2, m_pa:1]"))
    # props missing from the valuation are false everywhere
    assert not satisfies(FORK, "u0", Prop("zzz"))
    with pytest.raises(CheckError):
        satisfies(FORK, "w", parse_formula("[b : p @ *:1]"))
    with pytest.raises(CheckError):
        satisfies(FORK, "nowhere", p)


def test_valid_in_game():
    assert valid_in_game(FORK, Implies(p, p))
    assert not valid_in_game(FORK, p)
    assert valid_in_game(TERM, Strict(frozenset("a"), FormulaSet([Bottom()]), SacrificeMap.uniform(1)))


def test_minimal_dilemma_sets():
    report = minimal_dilemma_sets(V1, "init", MA, S22, FormulaSet([d1, d2, d3, d4]))
    assert FormulaSet([d1, d2, d3]) in report.minimal_sets
    assert minimal_dilemma_sets(FORK, "w", {"a"}, A1, FormulaSet([p, q])).minimal_sets == (FormulaSet([p, q]),)
    assert minimal_dilemma_sets(TERM, "w", {"a"}, A1, FormulaSet([p])).minimal_sets == (FormulaSet([p]),)
    big = FormulaSet([Prop(f"x{i}") for i in range(13)])
    with pytest.raises(CapExceeded):
        minimal_dilemma_sets(TERM, "w", {"a"}, A1, big)
    with pytest.raises(CheckError):
        minimal_dilemma_sets(TERM, "w", {"a"}, A1, FormulaSet([]))


def test_profile_cap():
    with pytest.raises(CapExceeded):
        CheckContext(V1, cap_profiles=100)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_report_sets_are_strict_and_an_antichain(seed):
    rng = random.Random(seed)
    g = small_game(seed)
    ctx = CheckContext(g)
    pool = FormulaSet([random_member(rng, g) for _ in range(5)])
    w, c = rng.choice(g.states), random_coalition(rng, g)
    s = SacrificeMap.uniform(Fraction(rng.randint(0, 4), 2))
    sets = ctx.minimal_dilemma_sets(w, c, s, pool).minimal_sets
    for x in sets:
        assert ctx.holds_strict(w, c, x, s)
        assert not any(y < x for y in sets)
    # nothing is missed: every strict subset of the pool is listed
    for x in pool.nonempty_subsets():
        assert ctx.holds_strict(w, c, x, s) == (x in sets)


def test_literal_oracle_on_village_claims():
    for coalition, xs, s, expected in [
        (MA, [d1, d2, d3], S22, True),
        (MB, [d2, d3, d4], S22, False),
        (MB, [d2, Or(d3, d4)], S22, True),
        (frozenset({"m_a", "m_b"}), [d1, d2, d3], SacrificeMap.of({"m_a": 2, "m_b": 1}), False),
    ]:
        assert holds_strict_literal(V1, "init", coalition, FormulaSet(xs), s) is expected


def test_memo_is_transparent():
    for g, w, c, xs, s in dilemma_instances(300, seed=5):
        f = Strict(c, xs, s)
        assert CheckContext(g, memo=True).satisfies(w, f) == CheckContext(g, memo=False).satisfies(w, f)
    ctx = CheckContext(V1)
    f = parse_formula("[m_b : d2, d3 | d4 @ m_a:2, m_b:2]")
    assert ctx.satisfies("init", f) == ctx.satisfies("init", f) == CheckContext(V1, memo=False).satisfies("init", f)


def _smaller(rng, s, agents):
    return SacrificeMap.of({a: v - Fraction(rng.randint(0, 2), 2) for a, v in s.resolve(agents).items()})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_monotonicity_in_sacrifice_and_coalition(seed):
    rng = random.Random(seed)
    g = small_game(seed)
    ctx = CheckContext(g)
    xs = FormulaSet([random_member(rng, g) for _ in range(rng.randint(1, 3))])
    c = random_coalition(rng, g)
    d = c | random_coalition(rng, g)
    s_big = SacrificeMap.of({a: Fraction(rng.randint(-1, 5), 2) for a in g.agents})
    s = _smaller(rng, s_big, g.agents)
    for w in g.states:
        if ctx.holds_strict(w, c, xs, s_big):
            assert ctx.holds_weak(w, d, xs, s)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_no_alternatives(seed):
    rng = random.Random(seed)
    g = small_game(seed, agents=2)
    ctx = CheckContext(g)
    x = FormulaSet([random_member(rng, g)])
    s = SacrificeMap.of({a: Fraction(rng.randint(-1, 5), 2) for a in g.agents})
    c, d = random_coalition(rng, g), random_coalition(rng, g)
    for w in g.states:
        assert ctx.holds_strict(w, c, x, s) == ctx.holds_strict(w, d, x, s)
