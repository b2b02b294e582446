"""Dilemma claims made about the village scenarios, with their expected truth values."""
from __future__ import annotations

from dataclasses import dataclass

from .fixtures import village1, village2

# (game, formula, expected) evaluated at state "init"
INTRO_CLAIMS = (
    ("village1", "[m_a : d1, d2, d3 @ m_a:2, m_b:2]", True),
    ("village1", "[m_b : d2, d3, d4 @ m_a:2, m_b:2]", False),
    ("village1", "[m_b : d2, d3 | d4 @ m_a:2, m_b:2]", True),
    ("village1", "[m_b : d2, d3 & d4 @ m_a:2, m_b:1]", True),
    ("village2", "[m_a : d1, d2, d3, d4 @ m_a:2, m_pa:1]", False),
    ("village2", "[m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", False),
    ("village2", "[m_a, m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", True),
)

# Why the single-bracket Monotonicity variant fails.
MONOTONICITY_CLAIMS = (
    ("village1", "[m_a : d1, d2, d3 @ m_a:2, m_b:1]", True),
    ("village1", "[m_a, m_b : d1, d2, d3 @ m_a:2, m_b:1]", False),
    ("village1", "[m_a, m_b : d2, d3 @ m_a:2, m_b:1]", True),
)


@dataclass(frozen=True)
class ClaimResult:
    game: str
    formula: str
    expected: bool
    actual: bool

    @property
    def ok(self):
        return self.expected == self.actual


def evaluate_claims(claims=INTRO_CLAIMS, mb_cap=2) -> list:
    from .checker import CheckContext
    from .parser import parse_formula

    contexts = {"village1": CheckContext(village1(mb_cap)), "village2": CheckContext(village2())}
    return [
        ClaimResult(game, text, expected, contexts[game].satisfies("init", parse_formula(text)))
        for game, text, expected in claims
    ]
