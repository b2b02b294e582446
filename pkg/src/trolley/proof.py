"""Checker for Hilbert-style derivations.

A script is a numbered list of lines, each a formula with a justification:
a propositional tautology (dilemma subformulas are opaque atoms), one of
the four axiom schemas, or Modus Ponens, Necessitation and Substitution
over earlier lines.  Scripts are concrete instances; there are no
metavariables.

Script file format (JSON)::

    {"agents": ["a", "b"],
     "lines": [{"n": 1, "formula": "...", "by": "taut"},
               {"n": 2, "formula": "...", "by": {"mp": [1, 3]}},
               {"n": 3, "formula": "...", "by": {"nec": 1}},
               {"n": 4, "formula": "...",
                "by": {"subst": {"premises": [1], "map": [["p", "(p | q)"]]}}}]}

``by`` may also be ``"ax:combination"``, ``"ax:monotonicity"``,
``"ax:minimality"`` or ``"ax:noalt"``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .formula import (
    DILEMMAS,
    CapExceeded,
    Formula,
    FormulaError,
    FormulaSet,
    Implies,
    Neg,
    Strict,
    Weak,
    core_key,
    format_formula,
    normalize,
    tensor,
)
from .parser import ParseError, parse_formula

AXIOMS = ("combination", "monotonicity", "minimality", "noalt")
DEFAULT_MAX_ATOMS = 16


class ScriptError(ValueError):
    """The script file itself is malformed (as opposed to a rejected step)."""


class AtomBudgetExceeded(CapExceeded):
    pass


# -- justifications ------------------------------------------------------------

@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Axiom:
    schema: str


@dataclass(frozen=True)
class MP:
    minor: int  # phi
    major: int  # phi -> psi


@dataclass(frozen=True)
class Nec:
    premise: int


@dataclass(frozen=True)
class Subst:
    premises: tuple
    mapping: tuple  # (phi, tau(phi)) formula pairs


@dataclass(frozen=True)
class ProofLine:
    n: int
    formula: Formula
    by: object

    def cites(self):
        if isinstance(self.by, MP):
            return (self.by.minor, self.by.major)
        if isinstance(self.by, Nec):
            return (self.by.premise,)
        if isinstance(self.by, Subst):
            return tuple(self.by.premises)
        return ()


@dataclass(frozen=True)
class ProofScript:
    agents: tuple
    lines: tuple
    name: str = ""

    def __post_init__(self):
        seen = set()
        for line in self.lines:
            if line.n < 1 or line.n in seen:
                raise ScriptError(f"line numbers must be positive and unique (line {line.n})")
            seen.add(line.n)


@dataclass(frozen=True)
class LineVerdict:
    n: int
    ok: bool
    reason: str = ""


@dataclass
class ProofVerdict:
    lines: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return all(v.ok for v in self.lines)

    @property
    def first_failure(self):
        for v in self.lines:
            if not v.ok:
                return v
        return None


# -- tautologies -----------------------------------------------------------------

def _atoms(f, out):
    if isinstance(f, Neg):
        _atoms(f.f, out)
    elif isinstance(f, Implies):
        _atoms(f.l, out)
        _atoms(f.r, out)
    elif f not in out:
        out[f] = len(out)


def check_taut(f: Formula, max_atoms=DEFAULT_MAX_ATOMS) -> bool:
    """Truth-table check over propositional variables and opaque dilemma atoms.

    All ``2**k`` valuations are evaluated at once: atom ``i`` is the
    integer whose bit ``v`` is bit ``i`` of ``v``.
    """
    core = normalize(f)
    atoms = {}
    _atoms(core, atoms)
    k = len(atoms)
    if k > max_atoms:
        raise AtomBudgetExceeded(f"{k} atoms exceed the truth-table budget of {max_atoms}")
    rows = 1 << k
    full = (1 << rows) - 1
    columns = {}
    for atom, i in atoms.items():
        # 2**i zeros then 2**i ones, repeated by doubling
        col = ((1 << (1 << i)) - 1) << (1 << i)
        width = 1 << (i + 1)
        while width < rows:
            col |= col << width
            width <<= 1
        columns[atom] = col & full

    def ev(g):
        if isinstance(g, Neg):
            return ~ev(g.f) & full
        if isinstance(g, Implies):
            return (~ev(g.l) | ev(g.r)) & full
        return columns[g]

    return ev(core) == full


# -- axiom matching -----------------------------------------------------------------

def _same(a: Formula, b: Formula) -> bool:
    if a == b:
        return True
    try:
        return normalize(a) == normalize(b)
    except CapExceeded:
        return False


def _as_strict(f):
    """``f`` as a strict dilemma node if it is one up to abbreviation, else None."""
    if isinstance(f, Strict):
        return f
    try:
        n = normalize(f)
    except CapExceeded:
        return None
    return n if isinstance(n, Strict) else None


def _top_dilemmas(f):
    """Dilemma nodes reachable through boolean structure only (not inside members)."""
    if isinstance(f, DILEMMAS):
        yield f
    elif isinstance(f, Neg):
        yield from _top_dilemmas(f.f)
    elif hasattr(f, "l"):
        yield from _top_dilemmas(f.l)
        yield from _top_dilemmas(f.r)


def _candidates(f):
    seen = []
    for src in (f, _safe_normalize(f)):
        if src is None:
            continue
        for d in _top_dilemmas(src):
            if d not in seen:
                seen.append(d)
    return seen


def _safe_normalize(f):
    try:
        return normalize(f)
    except CapExceeded:
        return None


def sacrifice_leq(s, s2, agents=None) -> bool:
    """Pointwise ``s <= s2``.

    With an agent universe both maps must resolve over it.  Without one,
    listed agents are compared and the wildcards must be both present (and
    ordered) or both absent.
    """
    if agents is not None:
        try:
            r, r2 = s.resolve(agents), s2.resolve(agents)
        except FormulaError:
            return False
        return all(r[a] <= r2[a] for a in agents)
    for a in s.agents() | s2.agents():
        v, v2 = s.get(a), s2.get(a)
        if v is None or v2 is None or v > v2:
            return False
    if (s.wildcard is None) != (s2.wildcard is None):
        return False
    return s.wildcard is None or s.wildcard <= s2.wildcard


def match_axiom(f: Formula, schema: str, agents=None) -> bool:
    """Does ``f`` instantiate the named schema, side conditions included?

    Weak-dilemma conclusions may be written as the abbreviation node or as
    its expansion.
    """
    if schema not in AXIOMS:
        raise ValueError(f"unknown axiom schema {schema!r}")
    if not isinstance(f, Implies):
        return False
    ante = _as_strict(f.l)
    if ante is None:
        return False
    c, xs, s = ante.coalition, ante.members, ante.sacrifice
    rest = f.r

    if schema == "combination":
        if not isinstance(rest, Implies):
            return False
        second = _as_strict(rest.l)
        if second is None or second.coalition != c or second.sacrifice != s:
            return False
        return _same(rest.r, Weak(c, tensor(xs, second.members), s))

    for d in _candidates(rest):
        if schema == "monotonicity":
            if not (c <= d.coalition and sacrifice_leq(d.sacrifice, s, agents)):
                continue
            if agents is not None and not d.coalition <= frozenset(agents):
                continue
            if _same(rest, Weak(d.coalition, xs, d.sacrifice)):
                return True
        elif schema == "minimality":
            ys = d.members
            if d.coalition == c and d.sacrifice == s and 0 < len(ys) and ys < xs:
                if _same(rest, Neg(Strict(c, ys, s))):
                    return True
        elif schema == "noalt":
            if len(xs) == 1 and d.sacrifice == s and _same(rest, Strict(d.coalition, xs, s)):
                return True
    return False


# -- steps and scripts -------------------------------------------------------------

def _well_formed(f: Formula, agents) -> str:
    """Empty string, or why ``f`` does not fit the script's agent universe."""
    universe = frozenset(agents)
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, DILEMMAS):
            if not g.coalition <= universe:
                return f"coalition {sorted(g.coalition)} outside declared agents"
            if not g.sacrifice.agents() <= universe:
                return f"sacrifice names undeclared agents {sorted(g.sacrifice.agents() - universe)}"
            try:
                g.sacrifice.resolve(universe)
            except FormulaError as e:
                return str(e)
            stack.extend(g.members)
        elif isinstance(g, Neg):
            stack.append(g.f)
        elif hasattr(g, "l"):
            stack.extend((g.l, g.r))
    return ""


def check_step(script: ProofScript, line: ProofLine, formulas=None, max_atoms=DEFAULT_MAX_ATOMS) -> LineVerdict:
    """Check one line against the earlier lines of ``script``.

    ``formulas`` maps line numbers to formulas of lines already checked;
    by default every line of the script before ``line`` is used.
    """
    if formulas is None:
        formulas = {}
        for other in script.lines:
            if other.n == line.n:
                break
            formulas[other.n] = other.formula

    def fail(reason):
        return LineVerdict(line.n, False, reason)

    for ref in line.cites():
        if ref >= line.n:
            return fail(f"cites line {ref}, which is not earlier")
        if ref not in formulas:
            return fail(f"cites line {ref}, which does not exist or was rejected")

    f, by = line.formula, line.by
    problem = _well_formed(f, script.agents)
    if problem:
        return fail(problem)

    if isinstance(by, Taut):
        try:
            ok = check_taut(f, max_atoms)
        except CapExceeded as e:
            return fail(str(e))
        return LineVerdict(line.n, True) if ok else fail("not a propositional tautology")

    if isinstance(by, Axiom):
        try:
            ok = match_axiom(f, by.schema, script.agents)
        except ValueError as e:
            return fail(str(e))
        return LineVerdict(line.n, True) if ok else fail(f"not an instance of the {by.schema} axiom")

    if isinstance(by, MP):
        major = formulas[by.major]
        if not isinstance(_safe_normalize(major) or major, Implies):
            return fail(f"line {by.major} is not an implication")
        if _same(major, Implies(formulas[by.minor], f)):
            return LineVerdict(line.n, True)
        return fail(f"line {by.major} is not line {by.minor} -> this formula")

    if isinstance(by, Nec):
        d = _as_strict(f)
        if d is None or len(d.members) != 1:
            return fail("necessitation must conclude a dilemma with a single member")
        if d.members != FormulaSet([formulas[by.premise]]):
            return fail(f"dilemma member differs from line {by.premise}")
        return LineVerdict(line.n, True)

    if isinstance(by, Subst):
        images = {}
        for phi, tphi in by.mapping:
            key = core_key(phi)
            if key in images and not _same(images[key][1], tphi):
                return fail(f"substitution map gives two images for {format_formula(phi)}")
            images[key] = (phi, tphi)
        domain = FormulaSet(phi for phi, _ in images.values())
        wanted = {core_key(Implies(phi, tphi)) for phi, tphi in images.values()}
        given = {core_key(formulas[i]) for i in by.premises}
        if given != wanted:
            return fail("premises are not exactly {phi -> tau(phi) | phi in X} for the given map")
        if not isinstance(f, Implies):
            return fail("substitution must conclude an implication")
        ante = _as_strict(f.l)
        if ante is None:
            return fail("substitution antecedent must be a strict dilemma")
        if ante.members != domain:
            return fail("substitution map domain differs from the dilemma's member set")
        image = FormulaSet(tphi for _, tphi in images.values())
        if not _same(f.r, Weak(ante.coalition, image, ante.sacrifice)):
            return fail("conclusion is not the weak dilemma over the image set")
        return LineVerdict(line.n, True)

    return fail(f"unknown justification {by!r}")


def check_proof(script: ProofScript, max_atoms=DEFAULT_MAX_ATOMS) -> ProofVerdict:
    """Check every line; a line citing a rejected line is itself rejected."""
    verdict = ProofVerdict()
    accepted = {}
    last = 0
    for line in script.lines:
        if line.n <= last:
            verdict.lines.append(LineVerdict(line.n, False, "line numbers must increase"))
            continue
        last = line.n
        v = check_step(script, line, accepted, max_atoms)
        verdict.lines.append(v)
        if v.ok:
            accepted[line.n] = line.formula
    return verdict


# -- file format ---------------------------------------------------------------------

def _parse_by(by, n):
    if by == "taut":
        return Taut()
    if isinstance(by, str) and by.startswith("ax:"):
        schema = by[3:]
        if schema not in AXIOMS:
            raise ScriptError(f"line {n}: unknown axiom {by!r}")
        return Axiom(schema)
    if isinstance(by, dict) and len(by) == 1:
        (kind, arg), = by.items()
        if kind == "mp" and isinstance(arg, list) and len(arg) == 2:
            return MP(int(arg[0]), int(arg[1]))
        if kind == "nec":
            return Nec(int(arg))
        if kind == "subst" and isinstance(arg, dict):
            mapping = tuple((parse_formula(a), parse_formula(b)) for a, b in arg["map"])
            return Subst(tuple(int(i) for i in arg["premises"]), mapping)
    raise ScriptError(f"line {n}: malformed justification {by!r}")


def script_from_dict(data: dict, name="") -> ProofScript:
    try:
        agents = tuple(data["agents"])
        lines = []
        for raw in data["lines"]:
            n = int(raw["n"])
            try:
                formula = parse_formula(raw["formula"])
                by = _parse_by(raw["by"], n)
            except ParseError as e:
                raise ScriptError(f"line {n}: {e}") from e
            lines.append(ProofLine(n, formula, by))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ScriptError):
            raise
        raise ScriptError(f"malformed proof script: {e!r}") from e
    return ProofScript(agents, tuple(lines), name or data.get("name", ""))


def parse_script(text: str, name="") -> ProofScript:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScriptError(f"invalid JSON: {e}") from e
    return script_from_dict(data, name)


def load_script(path) -> ProofScript:
    with open(path, encoding="utf-8") as fh:
        return parse_script(fh.read(), name=str(path))


def _by_to_json(by):
    if isinstance(by, Taut):
        return "taut"
    if isinstance(by, Axiom):
        return f"ax:{by.schema}"
    if isinstance(by, MP):
        return {"mp": [by.minor, by.major]}
    if isinstance(by, Nec):
        return {"nec": by.premise}
    return {"subst": {
        "premises": list(by.premises),
        "map": [[format_formula(a), format_formula(b)] for a, b in by.mapping],
    }}


def script_to_dict(script: ProofScript) -> dict:
    out = {"agents": list(script.agents), "lines": [
        {"n": line.n, "formula": format_formula(line.formula), "by": _by_to_json(line.by)}
        for line in script.lines
    ]}
    if script.name:
        out["name"] = script.name
    return out


# -- shipped corpus -------------------------------------------------------------------

def corpus_names() -> list:
    root = resources.files("trolley.data.proofs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def corpus_script(name: str) -> ProofScript:
    text = resources.files("trolley.data.proofs").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return parse_script(text, name=name)
