import json
import subprocess
import sys

import pytest

from trolley import fixtures
from trolley.cli import main
from trolley.proof import corpus_script, script_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_true_and_false(capsys):
    code, out, _ = run(capsys, "check", "village1", "init", "[m_a : d1,d2,d3 @ m_a:2,m_b:2]")
    assert (code, out.strip()) == (0, "TRUE")
    code, out, _ = run(capsys, "check", "fork", "w", "p")
    assert (code, out.strip()) == (1, "FALSE")


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "fork", "u0", "p & !q", "--json")
    assert code == 0
    assert json.loads(out) == {"state": "u0", "formula": "(p & !q)", "value": True}


def test_check_reads_game_files(tmp_path, capsys):
    path = tmp_path / "fork.json"
    path.write_text(fixtures.shipped_game_text("fork"))
    assert run(capsys, "check", str(path), "u1", "q")[0] == 0


@pytest.mark.parametrize("argv", [
    ["check", "fork", "w", "[a : p"],
    ["check", "fork", "nowhere", "p"],
    ["check", "no-such-game.json", "w", "p"],
    ["check", "fork", "w", "[zz : p @ *:1]"],
    ["check", "fork", "w", "[a : p @ b:1]"],
    ["check"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_bad_game_file_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"agents": ["a"], "states": []}')
    assert run(capsys, "check", str(path), "w", "p")[0] == 2


def test_profile_cap_exits_3(capsys):
    assert run(capsys, "check", "village1", "init", "d1", "--cap-profiles", "10")[0] == 3


def test_explore(capsys):
    code, out, _ = run(capsys, "explore", "village1", "init", "m_a", "m_a:2,m_b:2", "d1,d2,d3,d4")
    assert code == 0
    assert ["d1", "d2", "d3"] in json.loads(out)["minimal_sets"]
    code, out, _ = run(capsys, "explore", "term", "w", "a", "*:1", "p")
    assert json.loads(out)["minimal_sets"] == [["p"]]


def test_explore_pool_cap(capsys):
    pool = ",".join(f"x{i}" for i in range(13))
    assert run(capsys, "explore", "term", "w", "a", "*:1", pool)[0] == 3
    assert run(capsys, "explore", "term", "w", "a", "*:1", "x1,x2", "--cap-pool", "1")[0] == 3


def test_prove(tmp_path, capsys):
    script = script_to_dict(corpus_script("alpha"))
    good = tmp_path / "alpha.json"
    good.write_text(json.dumps(script))
    code, out, _ = run(capsys, "prove", str(good))
    assert code == 0 and out.strip().endswith("ACCEPTED")

    script["lines"][0]["formula"] = "[a : p, q @ *:1] -> [a : p @ *:1]"
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(script))
    code, out, _ = run(capsys, "prove", str(bad))
    assert code == 1 and "REJECTED at line 1" in out

    code, out, _ = run(capsys, "prove", str(bad), "--json")
    verdict = json.loads(out)
    assert code == 1 and not verdict["accepted"]
    assert [v["ok"] for v in verdict["lines"]] == [False, True, False]

    assert run(capsys, "prove", str(tmp_path / "missing.json"))[0] == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{")
    assert run(capsys, "prove", str(junk))[0] == 2


def test_fuzz_default_run_is_clean(capsys):
    code, out, err = run(capsys, "fuzz")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0
    assert len(lines) == 1
    summary = lines[0]["summary"]
    assert all(summary[k]["counterexamples"] == 0 for k in summary)
    assert "finished" in err


def test_fuzz_falsify(capsys):
    code, out, _ = run(capsys, "fuzz", "--falsify", "--seed", "3", "--games", "10")
    rows = [json.loads(x) for x in out.splitlines()]
    reports, summary = rows[:-1], rows[-1]["summary"]
    assert code == 0
    assert {r["schema"] for r in reports} == {"combination_single", "monotonicity_single"}
    assert summary["combination_single"]["counterexamples"] >= 1


def test_fuzz_output_is_deterministic(capsys):
    first = run(capsys, "fuzz", "--games", "5", "--falsify")[1]
    second = run(capsys, "fuzz", "--games", "5", "--falsify")[1]
    assert first == second


def test_fuzz_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"num_games": 3, "instances_per_schema": 2, "seed": 11}))
    code, out, _ = run(capsys, "fuzz", "--config", str(cfg))
    assert code == 0 and json.loads(out)["config"]["num_games"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "fuzz", "--config", str(cfg))[0] == 2


def test_fuzz_invalid_density(capsys):
    assert run(capsys, "fuzz", "--density", "2")[0] == 2


def test_paper_examples(capsys):
    code, out, _ = run(capsys, "paper-examples")
    assert code == 0 and out.count("PASS") == 7 and "FAIL" not in out
    code, out, _ = run(capsys, "paper-examples", "--json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 7 and all(r["ok"] for r in rows)


def test_paper_examples_designed_mismatch(capsys):
    code, out, _ = run(capsys, "paper-examples", "--mb-cap", "0")
    assert code == 1 and "FAIL" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "trolley.cli", "check", "fork", "u0", "p"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "TRUE"
