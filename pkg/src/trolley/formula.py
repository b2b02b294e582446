"""Formula AST for the coalition dilemma logic.

Core grammar is ``Prop | Neg | Implies | Strict``; ``Top``, ``Bottom``,
``And``, ``Or`` and ``Weak`` are derived forms that :func:`normalize`
rewrites away.  Member sets of dilemmas are :class:`FormulaSet` values,
deduplicated and ordered canonically so that printing is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping

# Reserved atom used to encode the constants in core syntax.
RESERVED_ATOM = "_top_"

# Largest member set a weak dilemma may have and still be expanded.
WEAK_EXPANSION_CAP = 5


class FormulaError(ValueError):
    pass


class CapExceeded(Exception):
    """A configured resource cap was hit; the work was refused, not truncated."""


class ExpansionCapExceeded(CapExceeded):
    """A weak dilemma is too large to expand into a disjunction."""

    def __init__(self, size, cap):
        super().__init__(f"weak dilemma with {size} members exceeds expansion cap {cap}")
        self.size = size
        self.cap = cap


class _Node:
    """Mixin caching the structural hash; formulas are hashed a lot by memo tables."""

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
            return h

    def _fields(self):
        return tuple(getattr(self, f) for f in self.__dataclass_fields__)

    def __str__(self):
        return format_formula(self)


class Formula(_Node):
    __slots__ = ()


@dataclass(frozen=True, eq=True, repr=True)
class Prop(Formula):
    name: str

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Top(Formula):
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Neg(Formula):
    f: Formula

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Implies(Formula):
    l: Formula
    r: Formula

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class And(Formula):
    l: Formula
    r: Formula

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Or(Formula):
    l: Formula
    r: Formula

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True)
class SacrificeMap:
    """Per-agent sacrifice bounds, with an optional wildcard for unlisted agents.

    ``bounds`` is kept as a sorted tuple of ``(agent, Fraction)`` pairs so
    two maps with the same entries compare and hash equal.
    """

    bounds: tuple = ()
    wildcard: Fraction | None = None

    def __post_init__(self):
        items = self.bounds.items() if isinstance(self.bounds, Mapping) else self.bounds
        pairs = sorted((str(a), Fraction(v)) for a, v in items)
        agents = [a for a, _ in pairs]
        if len(set(agents)) != len(agents):
            raise FormulaError(f"duplicate sacrifice entry in {agents}")
        object.__setattr__(self, "bounds", tuple(pairs))
        if self.wildcard is not None:
            object.__setattr__(self, "wildcard", Fraction(self.wildcard))

    @classmethod
    def of(cls, mapping=None, wildcard=None):
        return cls(tuple((mapping or {}).items()), wildcard)

    @classmethod
    def uniform(cls, value):
        return cls((), Fraction(value))

    def get(self, agent):
        for a, v in self.bounds:
            if a == agent:
                return v
        return self.wildcard

    def agents(self):
        return frozenset(a for a, _ in self.bounds)

    def resolve(self, agents: Iterable[str]) -> dict:
        """Total map over ``agents``; raises if an agent has no bound."""
        out = {}
        for a in agents:
            v = self.get(a)
            if v is None:
                raise FormulaError(f"sacrifice map has no bound for agent {a!r} and no wildcard")
            out[a] = v
        return out

    def __str__(self):
        return format_sacrifice(self)


class FormulaSet:
    """Finite nonempty set of formulas.

    Members are deduplicated by their normalized form and iterated in the
    order of their printed form.  When two members collapse, the one with
    the smaller printed form is kept.
    """

    __slots__ = ("_members", "_keys", "_keyset", "_hash")

    def __init__(self, members: Iterable[Formula] = ()):
        best = {}
        for m in members:
            if not isinstance(m, Formula):
                raise TypeError(f"not a formula: {m!r}")
            k = core_key(m)
            text = format_formula(m)
            if k not in best or text < best[k][0]:
                best[k] = (text, m)
        ordered = sorted(best.items(), key=lambda kv: kv[1][0])
        self._members = tuple(m for _, (_, m) in ordered)
        self._keys = tuple(k for k, _ in ordered)
        self._keyset = frozenset(self._keys)
        self._hash = hash(self._keyset)

    def __iter__(self) -> Iterator[Formula]:
        return iter(self._members)

    def __len__(self):
        return len(self._members)

    def __getitem__(self, i):
        return self._members[i]

    def __contains__(self, f):
        return isinstance(f, Formula) and core_key(f) in self._keyset

    def __eq__(self, other):
        return isinstance(other, FormulaSet) and self._keyset == other._keyset

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return self._keyset <= other._keyset

    def __lt__(self, other):
        return self._keyset < other._keyset

    def __repr__(self):
        return "FormulaSet({" + ", ".join(format_formula(m) for m in self._members) + "})"

    def nonempty_subsets(self, proper=False):
        """Nonempty subsets in canonical order: by size, then member index."""
        n = len(self._members)
        top = n - 1 if proper else n
        for k in range(1, top + 1):
            for idx in combinations(range(n), k):
                yield FormulaSet(self._members[i] for i in idx)


def _coalition(agents) -> frozenset:
    c = frozenset(agents)
    if not c:
        raise FormulaError("coalition must be nonempty")
    return c


@dataclass(frozen=True, eq=True)
class Strict(Formula):
    """Dilemma ``[C : X]_s``."""

    coalition: frozenset
    members: FormulaSet
    sacrifice: SacrificeMap

    def __post_init__(self):
        object.__setattr__(self, "coalition", _coalition(self.coalition))
        if not isinstance(self.members, FormulaSet):
            object.__setattr__(self, "members", FormulaSet(self.members))
        if len(self.members) == 0:
            raise FormulaError("dilemma member set must be nonempty")

    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Weak(Formula):
    """Weak dilemma, the disjunction of ``[C : Z]_s`` over nonempty ``Z`` of ``X``."""

    coalition: frozenset
    members: FormulaSet
    sacrifice: SacrificeMap

    __post_init__ = Strict.__post_init__
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


DILEMMAS = (Strict, Weak)

_TOP_CORE = Implies(Prop(RESERVED_ATOM), Prop(RESERVED_ATOM))
_BOTTOM_CORE = Neg(_TOP_CORE)


def big_or(fs) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``Bottom``."""
    fs = list(fs)
    if not fs:
        return Bottom()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def big_and(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return Top()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def weak_expansion(w: Weak) -> Formula:
    """The abbreviation behind a weak dilemma, still using ``Or``."""
    return big_or(Strict(w.coalition, z, w.sacrifice) for z in w.members.nonempty_subsets())


def _norm(f: Formula, cap, strict_cap: bool) -> Formula:
    if isinstance(f, Prop):
        return f
    if isinstance(f, Top):
        return _TOP_CORE
    if isinstance(f, Bottom):
        return _BOTTOM_CORE
    if isinstance(f, Neg):
        return Neg(_norm(f.f, cap, strict_cap))
    if isinstance(f, Implies):
        return Implies(_norm(f.l, cap, strict_cap), _norm(f.r, cap, strict_cap))
    if isinstance(f, And):
        return Neg(Implies(_norm(f.l, cap, strict_cap), Neg(_norm(f.r, cap, strict_cap))))
    if isinstance(f, Or):
        return Implies(Neg(_norm(f.l, cap, strict_cap)), _norm(f.r, cap, strict_cap))
    if isinstance(f, (Strict, Weak)):
        members = FormulaSet(_norm(m, cap, strict_cap) for m in f.members)
        if isinstance(f, Strict):
            return Strict(f.coalition, members, f.sacrifice)
        if len(members) > cap:
            if strict_cap:
                raise ExpansionCapExceeded(len(members), cap)
            return Weak(f.coalition, members, f.sacrifice)
        disjuncts = [Strict(f.coalition, z, f.sacrifice) for z in members.nonempty_subsets()]
        out = disjuncts[-1]
        for d in reversed(disjuncts[:-1]):
            out = Implies(Neg(d), out)
        return out
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=65536)
def normalize(f: Formula, cap: int = WEAK_EXPANSION_CAP) -> Formula:
    """Rewrite ``f`` into the core grammar.

    Raises :class:`ExpansionCapExceeded` if some weak dilemma has more than
    ``cap`` members; callers should then evaluate it semantically.
    """
    return _norm(f, cap, True)


@lru_cache(maxsize=65536)
def core_key(f: Formula) -> Formula:
    """Like :func:`normalize`, but oversized weak dilemmas are left in place.

    Used as the identity of set members, so it must never raise.
    """
    return _norm(f, WEAK_EXPANSION_CAP, False)


def tensor(xs: FormulaSet, ys: FormulaSet) -> FormulaSet:
    """Pairwise conjunctions ``{x & y | x in xs, y in ys}``."""
    return FormulaSet(And(x, y) for x in xs for y in ys)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Neg):
        yield from subformulas(f.f)
    elif isinstance(f, (Implies, And, Or)):
        yield from subformulas(f.l)
        yield from subformulas(f.r)
    elif isinstance(f, DILEMMAS):
        for m in f.members:
            yield from subformulas(m)


def props_of(f: Formula) -> set:
    return {g.name for g in subformulas(f) if isinstance(g, Prop)}


def agents_of(f: Formula) -> set:
    out = set()
    for g in subformulas(f):
        if isinstance(g, DILEMMAS):
            out |= g.coalition
            out |= g.sacrifice.agents()
    return out


def dilemmas_of(f: Formula) -> Iterator[Formula]:
    return (g for g in subformulas(f) if isinstance(g, DILEMMAS))


# -- printing ---------------------------------------------------------------

def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_sacrifice(s: SacrificeMap) -> str:
    parts = [f"{a}:{format_rational(v)}" for a, v in s.bounds]
    if s.wildcard is not None:
        parts.append(f"*:{format_rational(s.wildcard)}")
    return ", ".join(parts)


def format_coalition(c) -> str:
    return ", ".join(sorted(c))


@lru_cache(maxsize=65536)
def format_formula(f: Formula) -> str:
    """Deterministic, fully parenthesized text that :func:`parse_formula` reads back."""
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Neg):
        return "!" + format_formula(f.f)
    if isinstance(f, Implies):
        return f"({format_formula(f.l)} -> {format_formula(f.r)})"
    if isinstance(f, And):
        return f"({format_formula(f.l)} & {format_formula(f.r)})"
    if isinstance(f, Or):
        return f"({format_formula(f.l)} | {format_formula(f.r)})"
    if isinstance(f, DILEMMAS):
        body = (
            f"{format_coalition(f.coalition)} : "
            + ", ".join(format_formula(m) for m in f.members)
            + f" @ {format_sacrifice(f.sacrifice)}"
        )
        return f"[[{body}]]" if isinstance(f, Weak) else f"[{body}]"
    raise TypeError(f"not a formula: {f!r}")
