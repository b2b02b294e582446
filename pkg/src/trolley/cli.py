"""Command-line front end.

Exit codes: 0 true/accepted/clean, 1 false/rejected/counterexample,
2 usage or parse error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import fixtures
from .checker import DEFAULT_CAP_POOL, DEFAULT_CAP_PROFILES, CheckContext, CheckError
from .claims import evaluate_claims
from .formula import CapExceeded, FormulaError, FormulaSet, format_formula
from .fuzz import ConfigError, FuzzConfig, axiom_soundness_suite, falsification_suite, rule_soundness_suite
from .fuzz import AXIOM_SCHEMAS, RULES, UNSOUND_VARIANTS
from .game import GameError, load_game
from .parser import parse_formula, parse_formula_list, parse_sacrifice
from .proof import ScriptError, check_proof, load_script

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _game(spec):
    if os.path.exists(spec):
        return load_game(spec)
    if spec in fixtures.BUILDERS:
        return fixtures.shipped_game(spec)
    raise UsageError(f"no such game file or built-in fixture: {spec}")


def _state(game, state):
    if state not in game.states:
        raise UsageError(f"state {state!r} not in game")
    return state


def cmd_check(args):
    game = _game(args.game)
    ctx = CheckContext(game, cap_profiles=args.cap_profiles)
    f = parse_formula(args.formula)
    value = ctx.satisfies(_state(game, args.state), f)
    if args.json:
        print(json.dumps({"state": args.state, "formula": format_formula(f), "value": value}))
    else:
        print("TRUE" if value else "FALSE")
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_explore(args):
    game = _game(args.game)
    ctx = CheckContext(game, cap_profiles=args.cap_profiles)
    coalition = frozenset(a.strip() for a in args.coalition.split(",") if a.strip())
    pool = FormulaSet(parse_formula_list(args.pool))
    report = ctx.minimal_dilemma_sets(
        _state(game, args.state), coalition, parse_sacrifice(args.sacrifice), pool, args.cap_pool
    )
    print(report.dumps())
    return EXIT_TRUE


def cmd_prove(args):
    try:
        script = load_script(args.script)
    except OSError as e:
        raise UsageError(str(e)) from e
    verdict = check_proof(script)
    if args.json:
        print(json.dumps({
            "accepted": verdict.accepted,
            "lines": [{"n": v.n, "ok": v.ok, "reason": v.reason} for v in verdict.lines],
        }))
    else:
        for line, v in zip(script.lines, verdict.lines):
            mark = "ok" if v.ok else "REJECTED"
            tail = f"  ({v.reason})" if v.reason else ""
            print(f"{line.n:>3}  {mark:<8} {format_formula(line.formula)}{tail}")
        bad = verdict.first_failure
        print("ACCEPTED" if bad is None else f"REJECTED at line {bad.n}")
    return EXIT_TRUE if verdict.accepted else EXIT_FALSE


def _fuzz_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from e
    for key, attr in (("seed", "seed"), ("num_games", "games"), ("instances_per_schema", "instances"),
                      ("transition_density", "density"), ("cap_profiles", "cap_profiles")):
        value = getattr(args, attr)
        if value is not None:
            data[key] = value
    return FuzzConfig.from_dict(data)


def cmd_fuzz(args):
    cfg = _fuzz_config(args)
    started = time.perf_counter()
    if args.falsify:
        results = [falsification_suite(cfg)]
        expected = UNSOUND_VARIANTS
    else:
        results = [axiom_soundness_suite(cfg), rule_soundness_suite(cfg)]
        expected = AXIOM_SCHEMAS + RULES
    summary = {}
    for res in results:
        for r in res.reports:
            print(r.dumps())
        summary.update(res.summary)
    print(json.dumps({"summary": summary, "config": cfg.to_dict()}, sort_keys=True))
    print(f"fuzz finished in {time.perf_counter() - started:.2f}s", file=sys.stderr)
    found = {name: summary[name]["counterexamples"] for name in expected}
    if args.falsify:
        return EXIT_TRUE if all(found.values()) else EXIT_FALSE
    return EXIT_TRUE if not any(found.values()) else EXIT_FALSE


def cmd_paper_examples(args):
    results = evaluate_claims(mb_cap=args.mb_cap)
    if args.json:
        print(json.dumps([
            {"game": r.game, "formula": r.formula, "expected": r.expected,
             "actual": r.actual, "ok": r.ok} for r in results
        ], indent=2))
    else:
        width = max(len(r.formula) for r in results)
        print(f"{'game':<9} {'formula':<{width}} expected actual")
        for r in results:
            print(f"{r.game:<9} {r.formula:<{width}} {str(r.expected):<8} {str(r.actual):<6} "
                  f"{'PASS' if r.ok else 'FAIL'}")
    return EXIT_TRUE if all(r.ok for r in results) else EXIT_FALSE


def build_parser():
    p = argparse.ArgumentParser(prog="trolley", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate a formula at a state")
    c.add_argument("game", help="game JSON file or built-in fixture (term, fork, village1, village2)")
    c.add_argument("state")
    c.add_argument("formula")
    c.add_argument("--json", action="store_true")
    c.add_argument("--cap-profiles", type=int, default=DEFAULT_CAP_PROFILES)
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("explore", help="list the minimal dilemma sets within a pool")
    e.add_argument("game")
    e.add_argument("state")
    e.add_argument("coalition", help="comma-separated agents")
    e.add_argument("sacrifice", help='e.g. "m_a:2, m_b:2" or "*:1"')
    e.add_argument("pool", help="comma-separated formulas")
    e.add_argument("--cap-pool", type=int, default=DEFAULT_CAP_POOL)
    e.add_argument("--cap-profiles", type=int, default=DEFAULT_CAP_PROFILES)
    e.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    e.set_defaults(func=cmd_explore)

    pr = sub.add_parser("prove", help="check a proof script")
    pr.add_argument("script")
    pr.add_argument("--json", action="store_true")
    pr.set_defaults(func=cmd_prove)

    f = sub.add_parser("fuzz", help="property-test the axioms and rules on random games")
    f.add_argument("--config", help="JSON file with FuzzConfig fields")
    f.add_argument("--seed", type=int)
    f.add_argument("--games", type=int)
    f.add_argument("--instances", type=int)
    f.add_argument("--density")
    f.add_argument("--cap-profiles", type=int)
    f.add_argument("--falsify", action="store_true",
                   help="hunt counterexamples to the single-bracket variants instead")
    f.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON lines")
    f.set_defaults(func=cmd_fuzz)

    x = sub.add_parser("paper-examples", help="evaluate the village scenario claims")
    x.add_argument("--json", action="store_true")
    x.add_argument("--mb-cap", type=int, default=2, help="largest dose m_b may give each helper")
    x.set_defaults(func=cmd_paper_examples)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_TRUE
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, FormulaError, GameError, ScriptError, ConfigError, CheckError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
