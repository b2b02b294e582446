"""Seeded random games and property checks of the axioms and rules.

Every game and every instance stream is derived from ``(seed, game index,
suite)`` alone, so results do not depend on worker count or order.
"""
from __future__ import annotations

import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from itertools import product

from .checker import CheckContext
from .formula import (
    And,
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
    format_coalition,
    format_formula,
    format_rational,
    format_sacrifice,
    tensor,
)
from .game import Game, Transition, checked, from_dict, to_dict
from .parser import parse_formula, parse_rational

AXIOM_SCHEMAS = ("combination", "monotonicity", "minimality", "noalt")
UNSOUND_VARIANTS = ("combination_single", "monotonicity_single")
RULES = ("necessitation", "substitution")

PROP_NAMES = "pqrstuvxyz"
GRID = Fraction(1, 2)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    num_games: int = 50
    num_states: int = 3
    num_agents: int = 2
    actions_per_agent: int = 2
    transition_density: Fraction = Fraction(1, 2)
    cost_min: Fraction = Fraction(0)
    cost_max: Fraction = Fraction(2)
    num_props: int = 2
    pool_size: int = 6
    formula_depth: int = 2
    instances_per_schema: int = 20
    cap_profiles: int = 4096

    def __post_init__(self):
        for name in ("transition_density", "cost_min", "cost_max"):
            value = getattr(self, name)
            try:
                value = parse_rational(value) if isinstance(value, str) else Fraction(value)
            except (ValueError, TypeError) as e:
                raise ConfigError(f"{name}: {e}") from e
            object.__setattr__(self, name, value)
        self.validate()

    def validate(self):
        for name in ("num_games", "num_states", "num_agents", "actions_per_agent",
                     "num_props", "pool_size", "formula_depth", "instances_per_schema",
                     "cap_profiles"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.num_props > len(PROP_NAMES):
            raise ConfigError(f"at most {len(PROP_NAMES)} propositions")
        if not 0 <= self.transition_density <= 1:
            raise ConfigError("transition_density must lie in [0, 1]")
        if self.cost_min > self.cost_max:
            raise ConfigError("cost_min must not exceed cost_max")

    @classmethod
    def from_dict(cls, data: dict) -> "FuzzConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, Fraction):
                out[k] = format_rational(v)
        return out


def agent_names(n):
    return [chr(ord("a") + i) for i in range(n)]


def _grid(lo, hi):
    vals = []
    v = Fraction(lo)
    while v <= hi:
        vals.append(v)
        v += GRID
    return vals


def random_game(cfg: FuzzConfig, seed=None) -> Game:
    """Random game drawn from ``cfg``; ``seed`` overrides ``cfg.seed``."""
    rng = random.Random(cfg.seed if seed is None else seed)
    agents = agent_names(cfg.num_agents)
    states = [f"w{i}" for i in range(cfg.num_states)]
    actions = {a: [f"x{i}" for i in range(cfg.actions_per_agent)] for a in agents}
    grid = _grid(cfg.cost_min, cfg.cost_max)
    costs = {(w, a, x): rng.choice(grid) for w in states for a in agents for x in actions[a]}
    density = float(cfg.transition_density)
    mechanism = []
    for w in states:
        for prof in product(*(actions[a] for a in agents)):
            profile = dict(zip(agents, prof))
            for u in states:
                if rng.random() < density:
                    mechanism.append(Transition(w, profile, u))
    valuation = {
        p: [w for w in states if rng.random() < 0.5] for p in PROP_NAMES[: cfg.num_props]
    }
    return checked(Game(agents, states, actions, Fraction(0), costs, mechanism, valuation))


def game_seed(cfg: FuzzConfig, index: int) -> str:
    return f"{cfg.seed}:{index}"


# -- random syntax ------------------------------------------------------------------

class _Sampler:
    def __init__(self, rng: random.Random, game: Game, cfg: FuzzConfig):
        self.rng = rng
        self.game = game
        self.cfg = cfg
        self.props = sorted(game.valuation) or ["p"]
        self.sac_grid = _grid(cfg.cost_min - 1, cfg.cost_max + 1)

    def literal(self):
        p = Prop(self.rng.choice(self.props))
        return p if self.rng.random() < 0.5 else Neg(p)

    def boolean(self, depth):
        if depth <= 0 or self.rng.random() < 0.3:
            return self.literal()
        op = self.rng.choice((And, Or, Implies))
        f = op(self.boolean(depth - 1), self.boolean(depth - 1))
        return Neg(f) if self.rng.random() < 0.2 else f

    def coalition(self):
        agents = self.game.agents
        k = self.rng.randint(1, len(agents))
        return frozenset(self.rng.sample(list(agents), k))

    def sacrifice(self):
        if self.rng.random() < 0.25:
            return SacrificeMap.uniform(self.rng.choice(self.sac_grid))
        return SacrificeMap.of({a: self.rng.choice(self.sac_grid) for a in self.game.agents})

    def nested_dilemma(self):
        members = [self.literal() for _ in range(self.rng.randint(1, 2))]
        node = Strict if self.rng.random() < 0.7 else Weak
        return node(self.coalition(), FormulaSet(members), self.sacrifice())

    def pool(self):
        out = []
        tries = 0
        while len(out) < self.cfg.pool_size and tries < 50 * self.cfg.pool_size:
            tries += 1
            r = self.rng.random()
            if r < 0.4:
                f = self.literal()
            elif r < 0.8:
                f = self.boolean(self.cfg.formula_depth)
            else:
                f = self.nested_dilemma()
            if f not in out:
                out.append(f)
        return out

    def members(self, pool, lo, hi):
        k = self.rng.randint(lo, min(hi, len(pool)))
        return FormulaSet(self.rng.sample(pool, k))


def _targeted(sampler, ctx, pool, coalition, s, want_size=None):
    """Half the time, a member set that is a strict dilemma at some state."""
    if sampler.rng.random() < 0.5:
        return None
    w = sampler.rng.choice(ctx.game.states)
    sub = FormulaSet(sampler.rng.sample(pool, min(len(pool), 5)))
    sets = ctx.minimal_dilemma_sets(w, coalition, s, sub).minimal_sets
    if want_size is not None:
        sets = [x for x in sets if want_size(len(x))]
    return sampler.rng.choice(sets) if sets else None


# -- reports ---------------------------------------------------------------------

@dataclass
class CounterexampleReport:
    schema: str
    game: dict
    state: str
    instantiation: dict
    formulas: dict  # part name -> formula text, always including "instance"
    observed: dict  # part name -> truth value at ``state``
    origin: str = "random"

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "CounterexampleReport":
        return cls(**data)


def replay(report: CounterexampleReport) -> bool:
    """Re-evaluate every recorded part; True iff all observed values reproduce."""
    g = from_dict(report.game)
    ctx = CheckContext(g)
    return all(
        ctx.satisfies(report.state, parse_formula(text)) == report.observed[name]
        for name, text in report.formulas.items()
    )


def _report(schema, game, state, inst, parts, ctx, origin="random"):
    return CounterexampleReport(
        schema=schema,
        game=to_dict(game),
        state=state,
        instantiation={k: v if isinstance(v, str) else _describe(v) for k, v in inst.items()},
        formulas={k: format_formula(f) for k, f in parts.items()},
        observed={k: ctx.satisfies(state, f) for k, f in parts.items()},
        origin=origin,
    )


def _describe(v):
    if isinstance(v, SacrificeMap):
        return format_sacrifice(v)
    if isinstance(v, FormulaSet):
        return "{" + ", ".join(format_formula(f) for f in v) + "}"
    if isinstance(v, frozenset):
        return "{" + format_coalition(v) + "}"
    if isinstance(v, Formula):
        return format_formula(v)
    return str(v)


@dataclass
class SuiteResult:
    reports: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def counts(self):
        out = {}
        for r in self.reports:
            out[r.schema] = out.get(r.schema, 0) + 1
        return out


def _blank(names):
    return {n: {"instances": 0, "evaluations": 0, "nonvacuous": 0,
                "counterexamples": 0, "skipped_games": 0} for n in names}


def _merge(into, part):
    for name, counts in part.items():
        for k, v in counts.items():
            into[name][k] += v


# -- instance builders ---------------------------------------------------------------

def _instance(schema, smp, ctx, pool):
    """(instantiation dict, parts dict, antecedent part names) for one random instance."""
    rng = smp.rng
    c = smp.coalition()
    if schema in ("combination", "combination_single"):
        s = smp.sacrifice()
        xs = _targeted(smp, ctx, pool, c, s) or smp.members(pool, 1, 2)
        if schema == "combination_single" and rng.random() < 0.5:
            ys = xs
        else:
            ys = _targeted(smp, ctx, pool, c, s) or smp.members(pool, 1, 2)
        node = Weak if schema == "combination" else Strict
        a1, a2 = Strict(c, xs, s), Strict(c, ys, s)
        concl = node(c, tensor(xs, ys), s)
        inst = {"C": c, "X": xs, "Y": ys, "s": s}
        return inst, {"antecedent_1": a1, "antecedent_2": a2, "conclusion": concl,
                      "instance": Implies(a1, Implies(a2, concl))}, ("antecedent_1", "antecedent_2")
    if schema in ("monotonicity", "monotonicity_single"):
        d = c | smp.coalition() if rng.random() < 0.7 else c
        s_big = SacrificeMap.of({a: rng.choice(smp.sac_grid) for a in ctx.game.agents})
        s_small = SacrificeMap.of({
            a: v - GRID * rng.choice((0, 0, 1, 2)) for a, v in s_big.resolve(ctx.game.agents).items()
        })
        xs = _targeted(smp, ctx, pool, c, s_big) or smp.members(pool, 1, 3)
        node = Weak if schema == "monotonicity" else Strict
        ante, concl = Strict(c, xs, s_big), node(d, xs, s_small)
        inst = {"C": c, "D": d, "X": xs, "s": s_small, "s_prime": s_big}
        return inst, {"antecedent": ante, "conclusion": concl,
                      "instance": Implies(ante, concl)}, ("antecedent",)
    if schema == "minimality":
        s = smp.sacrifice()
        xs = None
        # proper strict dilemmas with two or more members are rare; search a little
        for _ in range(4):
            xs = _targeted(smp, ctx, pool, c, s, lambda n: n >= 2)
            if xs is not None:
                break
            c, s = smp.coalition(), smp.sacrifice()
        xs = xs or smp.members(pool, 2, 3)
        if len(xs) < 2:
            xs = FormulaSet(list(xs) + [smp.literal(), smp.boolean(1)])
        if len(xs) < 2:
            xs = FormulaSet([Prop(smp.props[0]), Neg(Prop(smp.props[0]))])
        ys = FormulaSet(rng.sample(list(xs), rng.randint(1, len(xs) - 1)))
        ante, concl = Strict(c, xs, s), Neg(Strict(c, ys, s))
        inst = {"C": c, "X": xs, "Y": ys, "s": s}
        return inst, {"antecedent": ante, "conclusion": concl,
                      "instance": Implies(ante, concl)}, ("antecedent",)
    if schema == "noalt":
        s = smp.sacrifice()
        d = smp.coalition()
        xs = _targeted(smp, ctx, pool, c, s, lambda n: n == 1) or smp.members(pool, 1, 1)
        ante, concl = Strict(c, xs, s), Strict(d, xs, s)
        inst = {"C": c, "D": d, "X": xs, "s": s}
        return inst, {"antecedent": ante, "conclusion": concl,
                      "instance": Implies(ante, concl)}, ("antecedent",)
    raise ValueError(f"unknown schema {schema!r}")


def _run_schemas(cfg: FuzzConfig, index: int, schemas, stop_at_first=False):
    game = random_game(cfg, seed=game_seed(cfg, index))
    counts = _blank(schemas)
    reports = []
    if game.profile_count() > cfg.cap_profiles:
        for name in schemas:
            counts[name]["skipped_games"] += 1
        return reports, counts
    ctx = CheckContext(game, cap_profiles=cfg.cap_profiles)
    for schema in schemas:
        rng = random.Random(f"{game_seed(cfg, index)}:{schema}")
        smp = _Sampler(rng, game, cfg)
        pool = smp.pool()
        found = False
        for _ in range(cfg.instances_per_schema):
            inst, parts, antes = _instance(schema, smp, ctx, pool)
            counts[schema]["instances"] += 1
            for w in game.states:
                counts[schema]["evaluations"] += 1
                if all(ctx.satisfies(w, parts[a]) for a in antes):
                    counts[schema]["nonvacuous"] += 1
                if not ctx.satisfies(w, parts["instance"]):
                    counts[schema]["counterexamples"] += 1
                    reports.append(_report(schema, game, w, inst, parts, ctx))
                    found = True
                    if stop_at_first:
                        break
            if found and stop_at_first:
                break
    return reports, counts


def _run_rules(cfg: FuzzConfig, index: int):
    game = random_game(cfg, seed=game_seed(cfg, index))
    counts = _blank(RULES)
    reports = []
    if game.profile_count() > cfg.cap_profiles:
        for name in RULES:
            counts[name]["skipped_games"] += 1
        return reports, counts
    ctx = CheckContext(game, cap_profiles=cfg.cap_profiles)
    rng = random.Random(f"{game_seed(cfg, index)}:rules")
    smp = _Sampler(rng, game, cfg)
    pool = smp.pool()

    p = Prop(smp.props[0])
    candidates = list(pool) + [Or(p, Neg(p)), Implies(p, p), Top(),
                               Strict(smp.coalition(), FormulaSet([Top()]), smp.sacrifice())]
    for phi in candidates[: cfg.instances_per_schema]:
        counts["necessitation"]["instances"] += 1
        if not ctx.valid(phi):
            continue
        counts["necessitation"]["nonvacuous"] += 1
        c, s = smp.coalition(), smp.sacrifice()
        concl = Strict(c, FormulaSet([phi]), s)
        for w in game.states:
            counts["necessitation"]["evaluations"] += 1
            if not ctx.satisfies(w, concl):
                counts["necessitation"]["counterexamples"] += 1
                reports.append(_report("necessitation", game, w, {"C": c, "s": s, "phi": phi},
                                       {"premise": phi, "instance": concl}, ctx))

    for _ in range(cfg.instances_per_schema):
        counts["substitution"]["instances"] += 1
        xs = smp.members(pool, 1, 3)
        tau = {}
        for phi in xs:
            psi = rng.choice(pool)
            options = [phi, Or(phi, psi), Or(psi, phi), Implies(psi, phi), Neg(Neg(phi)), psi]
            valid = [t for t in options if ctx.valid(Implies(phi, t))]
            tau[phi] = rng.choice(valid)
        c, s = smp.coalition(), smp.sacrifice()
        image = FormulaSet(tau.values())
        ante, concl = Strict(c, xs, s), Weak(c, image, s)
        inst = Implies(ante, concl)
        if not ctx.valid(inst):
            for w in game.states:
                if not ctx.satisfies(w, inst):
                    mapping = "; ".join(f"{format_formula(k)} => {format_formula(v)}" for k, v in tau.items())
                    reports.append(_report("substitution", game, w,
                                           {"C": c, "X": xs, "s": s, "tau": mapping},
                                           {"antecedent": ante, "conclusion": concl, "instance": inst}, ctx))
                    counts["substitution"]["counterexamples"] += 1
        counts["substitution"]["evaluations"] += len(game.states)
        counts["substitution"]["nonvacuous"] += sum(ctx.satisfies(w, ante) for w in game.states)
    return reports, counts


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get("TROLLEY_MC_THREADS", "1") or 1)
    return max(1, workers)


def _map_games(fn, cfg, extra, workers):
    args = [(cfg, i) + extra for i in range(cfg.num_games)]
    if _workers(workers) == 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=_workers(workers)) as ex:
        return list(ex.map(fn, *zip(*args)))


def _collect(results, names):
    out = SuiteResult(summary=_blank(names))
    for reports, counts in results:
        out.reports.extend(reports)
        _merge(out.summary, counts)
    return out


def axiom_soundness_suite(cfg: FuzzConfig, schemas=AXIOM_SCHEMAS, workers=None) -> SuiteResult:
    """Evaluate random axiom instances at every state of every game; returns violations."""
    results = _map_games(_run_schemas, cfg, (tuple(schemas),), workers)
    return _collect(results, schemas)


def rule_soundness_suite(cfg: FuzzConfig, workers=None) -> SuiteResult:
    """Per-game soundness of Necessitation and Substitution."""
    return _collect(_map_games(_run_rules, cfg, (), workers), RULES)


def known_counterexamples() -> list:
    """The two hand-made refutations of the single-bracket variants."""
    from .fixtures import g_fork, village1

    out = []
    fork = g_fork()
    ctx = CheckContext(fork)
    c, s = frozenset({"a"}), SacrificeMap.of({"a": 1})
    xs = FormulaSet([Prop("p"), Prop("q")])
    a1 = Strict(c, xs, s)
    concl = Strict(c, tensor(xs, xs), s)
    parts = {"antecedent_1": a1, "antecedent_2": a1, "conclusion": concl,
             "instance": Implies(a1, Implies(a1, concl))}
    if not ctx.satisfies("w", parts["instance"]):
        out.append(_report("combination_single", fork, "w", {"C": c, "X": xs, "Y": xs, "s": s},
                           parts, ctx, origin="construction"))

    v1 = village1()
    ctx = CheckContext(v1)
    s = SacrificeMap.of({"m_a": 2, "m_b": 1})
    ds = FormulaSet([Prop("d1"), Prop("d2"), Prop("d3")])
    ante = Strict(frozenset({"m_a"}), ds, s)
    concl = Strict(frozenset({"m_a", "m_b"}), ds, s)
    parts = {"antecedent": ante, "conclusion": concl, "instance": Implies(ante, concl)}
    if not ctx.satisfies("init", parts["instance"]):
        out.append(_report("monotonicity_single", v1, "init",
                           {"C": frozenset({"m_a"}), "D": frozenset({"m_a", "m_b"}), "X": ds,
                            "s": s, "s_prime": s},
                           parts, ctx, origin="construction"))
    return out


def falsification_suite(cfg: FuzzConfig, workers=None) -> SuiteResult:
    """Search for refutations of the single-bracket Combination and Monotonicity variants.

    Each game contributes at most one counterexample per variant.
    """
    results = _map_games(_run_schemas, cfg, (UNSOUND_VARIANTS, True), workers)
    out = _collect(results, UNSOUND_VARIANTS)
    for r in known_counterexamples():
        out.reports.append(r)
        out.summary[r.schema]["counterexamples"] += 1
    return out
