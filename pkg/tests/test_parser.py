from fractions import Fraction

import pytest

from trolley.formula import FormulaSet, Implies, Neg, Or, Prop, SacrificeMap, Strict, Weak
from trolley.parser import ParseError, parse_formula, parse_formula_list, parse_rational, parse_sacrifice


def test_grammar_examples():
    assert parse_formula("p -> !q") == Implies(Prop("p"), Neg(Prop("q")))
    d = [Prop(f"d{i}") for i in range(1, 5)]
    assert parse_formula("[m_a : d1, d2, d3 @ m_a:2, m_b:2]") == Strict(
        frozenset({"m_a"}), FormulaSet(d[:3]), SacrificeMap.of({"m_a": 2, "m_b": 2}))
    assert parse_formula("[[m_b : d2, d3 | d4 @ *:2]]") == Weak(
        frozenset({"m_b"}), FormulaSet([d[1], Or(d[2], d[3])]), SacrificeMap.uniform(2))


def test_precedence_and_associativity():
    assert parse_formula("a -> b -> c") == parse_formula("a -> (b -> c)")
    assert parse_formula("!a & b | c -> d") == parse_formula("(((!a) & b) | c) -> d")
    assert parse_formula("a | b | c") == parse_formula("(a | b) | c")


def test_rationals():
    s = parse_formula("[a : p @ a:-3/4]").sacrifice
    assert s.get("a") == Fraction(-3, 4)
    assert parse_rational("6/4") == Fraction(3, 2)
    assert parse_sacrifice("m_a:2, *:1/2") == SacrificeMap.of({"m_a": 2}, Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_rational("1.5")


@pytest.mark.parametrize("text, msg, line, col", [
    ("[ : p @ *:1]", "coalition must be nonempty", 1, 3),
    ("[a : @ *:1]", "member list must be nonempty", 1, 6),
    ("[a : p @ a:x]", "must be a rational", 1, 12),
    ("[a : p @ a:1/0]", "zero denominator", 1, 12),
    ("[a : p @ a:1, a:2]", "duplicate sacrifice entry", 1, 15),
    ("p &\n  (q", "expected ')'", 2, 5),
    ("p $ q", "unexpected character", 1, 3),
    ("[a : p @ a:2.5]", "malformed rational", 1, 12),
    ("p q", "unexpected 'q'", 1, 3),
])
def test_errors_carry_position(text, msg, line, col):
    with pytest.raises(ParseError) as err:
        parse_formula(text)
    assert msg in err.value.msg
    assert (err.value.line, err.value.col) == (line, col)


def test_formula_list():
    assert parse_formula_list("d1, [a : p, q @ *:1], d3 | d4") == [
        Prop("d1"), parse_formula("[a : p, q @ *:1]"), parse_formula("d3 | d4")]
