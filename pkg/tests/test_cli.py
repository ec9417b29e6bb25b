from __future__ import annotations

import argparse
import json

import pytest

from structsearch.cli import Settings, main
from structsearch.evaluation import Benchmark
from conftest import DATA, FIXTURES

RULE = str(DATA / "tostring_in_loop.yaml")
APPEND = str(DATA / "AppendLoop.java")


@pytest.fixture(autouse=True)
def _isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("SCS_API_ENDPOINT", "SCS_API_KEY", "SCS_MODEL", "SCS_EMBED_MODEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """corpus manifest, generated queries, benchmark and index built through the CLI."""
    root = tmp_path_factory.mktemp("ws")
    run = lambda *argv: main(["-q", *argv])  # noqa: E731
    assert run("index", "--corpus", "<bundled>", "--out", str(root / "corpus.json")) == 0
    assert run("generate", "--corpus", str(root / "corpus.json"), "--n", "6", "--seed", "4", "--out", str(root / "gen.jsonl")) == 0
    assert run("pair", "--generated", str(root / "gen.jsonl"), "--corpus", str(root / "corpus.json"), "--mock", "template", "--out", str(root / "bench.json")) == 0
    assert run("generate", "--corpus", "<bundled>", "--n", "12", "--seed", "5", "--out", str(root / "train.jsonl")) == 0
    assert run("pair", "--generated", str(root / "train.jsonl"), "--corpus", "<bundled>", "--mock", "template", "--out", str(root / "train.json")) == 0
    assert run("build-index", "--pairs", str(root / "train.json"), "--exclude", str(root / "bench.json"), "--out", str(root / "index.json")) == 0
    return root


def test_generate_writes_rows_and_summary(workspace):
    rows = (workspace / "gen.jsonl").read_text().splitlines()
    assert len(rows) == 6
    assert "construct type" in (workspace / "gen.jsonl.summary.txt").read_text()


def test_generate_rejects_zero_queries(capsys):
    with pytest.raises(SystemExit) as err:
        main(["generate", "--corpus", "<bundled>", "--n", "0", "--out", "x.jsonl"])
    assert err.value.code == 2
    assert "positive integer" in capsys.readouterr().err


def test_benchmark_refers_to_manifest(workspace, bundled):
    bench = Benchmark.load(workspace / "bench.json")
    assert len(bench.queries) == 6
    assert bench.corpus.sha256 == bundled.sha256


def test_relative_corpus_ref_is_rebased(workspace, bundled, tmp_path):
    (tmp_path / "out").mkdir()
    bundled.write_manifest(tmp_path / "c.json")
    code = main(["-q", "pair", "--generated", str(workspace / "gen.jsonl"), "--corpus", "c.json", "--mock", "template", "--out", "out/b.json"])
    assert code == 0
    assert json.loads((tmp_path / "out" / "b.json").read_text())["corpus"] == "../c.json"


def test_eval_pipeline_echo_gold(workspace, capsys):
    out = workspace / "report.json"
    code = main(["-q", "eval", "--benchmark", str(workspace / "bench.json"), "--mode", "pipeline", "--index", str(workspace / "index.json"), "--mock", "echo-gold", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["f1"] == 1.0
    assert "NL-to-DSL" in capsys.readouterr().out
    assert out.with_suffix(".txt").exists()


def test_eval_ablation_label_and_unknown_ablation(workspace, capsys):
    argv = ["-q", "eval", "--benchmark", str(workspace / "bench.json"), "--mode", "pipeline", "--index", str(workspace / "index.json"), "--mock", "fault-inject"]
    assert main([*argv, "--ablate", "no-refine"]) == 0
    assert "NL-to-DSL [no-refine]" in capsys.readouterr().out
    assert main([*argv, "--ablate", "no-magic"]) == 2
    assert "unknown ablation" in capsys.readouterr().err


def test_eval_vector_sweep(workspace, capsys):
    code = main(["-q", "eval", "--benchmark", str(workspace / "bench.json"), "--mode", "vector", "--threshold", "0.25", "0.75"])
    assert code == 0
    out = capsys.readouterr().out
    assert "Vector T=0.25" in out and "Vector T=0.75" in out


def test_eval_vector_rejects_bad_threshold(workspace):
    with pytest.raises(SystemExit) as err:
        main(["eval", "--benchmark", str(workspace / "bench.json"), "--mode", "vector", "--threshold", "2"])
    assert err.value.code == 2


def test_llm_direct_needs_force_over_cap(workspace, capsys):
    argv = ["-q", "eval", "--benchmark", str(workspace / "bench.json"), "--mode", "llm-direct", "--mock", "echo-gold"]
    assert main([*argv, "--max-calls", "10"]) == 2
    assert "--force" in capsys.readouterr().err
    assert main([*argv, "--max-calls", "10", "--subset", "1", "--force"]) == 0


def test_search_with_rule_grep_output(capsys):
    assert main(["-q", "search", "--corpus", APPEND, "--rule", RULE]) == 0
    captured = capsys.readouterr()
    assert captured.out == "AppendLoop.java:3: a += Integer.toString(number);\n"
    assert "pattern-inside" in captured.err


def test_search_json_output(capsys):
    assert main(["-q", "search", "--corpus", APPEND, "--rule", RULE, "--json"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["bindings"] == {"$X": "a"} and row["start_line"] == 3


def test_search_without_matches_exits_one(tmp_path):
    rule = tmp_path / "r.yaml"
    rule.write_text("pattern: while ($C) { ... }\n")
    assert main(["-q", "search", "--corpus", APPEND, "--rule", str(rule)]) == 1


def test_search_replays_recorded_translation(capsys):
    nl = (FIXTURES / "search_nl.txt").read_text().strip()
    code = main(["-q", "search", nl, "--corpus", APPEND, "--index", str(FIXTURES / "search_index.json"), "--replay", str(FIXTURES / "search_replay.json"), "--verbose"])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("AppendLoop.java:3:")
    assert '"expected_type": "Operator"' in captured.err


def test_search_errors_exit_two(capsys):
    assert main(["-q", "search", "loops", "--corpus", APPEND]) == 2
    assert main(["-q", "search", "--corpus", "missing-dir", "--rule", RULE]) == 2
    assert main(["-q", "search", "loops", "--corpus", APPEND, "--index", str(FIXTURES / "search_index.json")]) == 2
    assert capsys.readouterr().err.count("scs: error") == 3


def test_settings_precedence(tmp_path):
    toml = {"generate": {"seed": 3, "n": 9}, "provider": {"model": "from-toml"}}
    args = argparse.Namespace(seed=7, n=None, model=None)
    settings = Settings(args, toml, env={"SCS_MODEL": "from-env"})
    assert settings.get("generate", "seed") == 7
    assert settings.get("generate", "n") == 9
    assert settings.get("generate", "cmax") == 5
    assert settings.get("provider", "model") == "from-env"
    assert Settings(args, toml, env={}).get("provider", "model") == "from-toml"


def test_config_file_is_read(tmp_path, capsys):
    (tmp_path / "scs.toml").write_text("[generate]\nn = 3\nseed = 2\n")
    assert main(["-q", "generate", "--corpus", "<bundled>", "--out", "q.jsonl"]) == 0
    assert len((tmp_path / "q.jsonl").read_text().splitlines()) == 3
    assert main(["-q", "--config", "nope.toml", "generate", "--corpus", "<bundled>", "--out", "q.jsonl"]) == 2
