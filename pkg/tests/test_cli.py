from __future__ import annotations

import json

import pytest

from conftest import FIXTURES
from referee.cli import main

IDN = FIXTURES / "idn"


@pytest.fixture(autouse=True)
def clean_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for key in ("REFEREE_HOPS", "REFEREE_ENDPOINT", "REFEREE_MODEL", "REFEREE_STUB", "REFEREE_API_KEY"):
        monkeypatch.delenv(key, raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def evaluate_args(*extra):
    return ("evaluate", "--repo", IDN, "--file", "net.py", "--function", "convert_to_idn",
            "--summary", IDN / "summary.txt", *extra)


def test_graph_build_and_dump(capsys, tmp_path):
    code, out, _ = run(capsys, "graph", "build", "--repo", FIXTURES / "py_small", "--dump", tmp_path / "g.json")
    assert code == 0 and out.startswith("files=3 ")
    dumped = json.loads((tmp_path / "g.json").read_text())
    assert set(dumped) == {"language", "nodes", "edges", "unresolved_count", "skipped"}
    assert set(dumped["nodes"][0]) == {"id", "kind", "name", "qualified_name", "file", "span", "docstring"}
    code, out, _ = run(capsys, "graph", "dump", "--repo", FIXTURES / "py_small")
    assert json.loads(out) == dumped


def test_context_hops_superset(capsys):
    base = ("context", "--repo", FIXTURES / "py_small", "--file", "app.py", "--function", "lookup")
    _, one, _ = run(capsys, *base, "--hops", 1)
    _, two, _ = run(capsys, *base, "--hops", 2)
    items = lambda text: {(i["entity_name"], i["source"]) for i in json.loads(text)["items"]}  # noqa: E731
    assert items(one) <= items(two)
    assert items(one) != items(two)


def test_context_hops_zero_is_input_code(capsys):
    _, out, _ = run(capsys, "context", "--repo", IDN, "--file", "net.py", "--function", "convert_to_idn",
                    "--hops", 0, "--format", "text")
    assert out.startswith("def convert_to_idn(url):") and "# urllib" not in out


def test_evaluate_convert_to_idn_example(capsys):
    code, out, err = run(capsys, *evaluate_args("--stub", IDN / "replay_table13.json"))
    assert code == 0, err
    report = json.loads(out)
    assert report["overall_score"] == 0.55
    assert report["per_segment"][4]["failed"] == ["C4"]
    assert report["config"]["hops"] == 1 and report["version"]


def test_evaluate_hops_zero(capsys):
    code, out, _ = run(capsys, *evaluate_args("--stub", IDN / "replay_table13.json", "--hops", 0))
    assert code == 0
    assert json.loads(out)["context_items"] == []


def test_evaluate_is_byte_stable(capsys):
    _, a, _ = run(capsys, *evaluate_args("--stub", IDN / "replay_table5.json"))
    _, b, _ = run(capsys, *evaluate_args("--stub", IDN / "replay_table5.json"))
    assert a == b


def test_missing_summary(capsys):
    code, _, err = run(capsys, "evaluate", "--repo", IDN, "--file", "net.py", "--function", "convert_to_idn",
                       "--summary", "missing.txt", "--stub", IDN / "replay_table5.json")
    assert code == 1
    assert json.loads(err)["error"] == "E_INPUT"


@pytest.mark.parametrize("extra", [(), ("--stub", IDN / "replay_table5.json", "--endpoint", "http://x")])
def test_backend_selection(capsys, extra):
    code, _, err = run(capsys, *evaluate_args(*extra))
    assert code == 1 and json.loads(err)["error"] == "E_INPUT"


def test_backend_failure_exit_code(capsys):
    code, _, err = run(capsys, *evaluate_args("--endpoint", "http://127.0.0.1:9", "--model", "m",
                                              "--max-retries", 1, "--timeout", 2))
    assert code == 2 and json.loads(err)["error"] == "E_BACKEND"


def test_unparseable_exit_code(capsys, tmp_path):
    (tmp_path / "r.json").write_text(json.dumps({"verdicts": {}, "default": "maybe"}))
    code, _, err = run(capsys, *evaluate_args("--stub", tmp_path / "r.json", "--max-in-flight", 1))
    assert code == 2 and json.loads(err)["error"] == "E_UNPARSEABLE"


def test_unknown_repo(capsys):
    code, _, err = run(capsys, "graph", "build", "--repo", "nope")
    assert code == 1 and json.loads(err)["error"] == "E_REPO"


def test_config_precedence(capsys, tmp_path, monkeypatch):
    base = ("context", "--repo", IDN, "--file", "net.py", "--function", "convert_to_idn")
    monkeypatch.setenv("REFEREE_HOPS", "0")
    assert json.loads(run(capsys, *base)[1])["hops"] == 0  # env
    (tmp_path / "referee.json").write_text(json.dumps({"hops": 2}))
    assert json.loads(run(capsys, *base)[1])["hops"] == 2  # file beats env
    assert json.loads(run(capsys, *base, "--hops", 1)[1])["hops"] == 1  # flag beats file


def test_stub_from_config_file(capsys, tmp_path):
    (tmp_path / "cfg.json").write_text(json.dumps({"stub": str(IDN / "replay_table13.json"), "weights": [1, 1, 1, 1]}))
    code, out, _ = run(capsys, "--config", tmp_path / "cfg.json", *evaluate_args())
    assert code == 0 and json.loads(out)["overall_score"] == 0.55


def test_segment_command(capsys, tmp_path):
    (tmp_path / "s.txt").write_text("One. Two.")
    code, out, _ = run(capsys, "segment", "--summary", tmp_path / "s.txt")
    assert code == 0 and [s["text"] for s in json.loads(out)] == ["One.", "Two."]


def test_bench_commands(capsys, tmp_path):
    assert run(capsys, "--seed", 4, "bench", "synth", "--n", 20, "--out", tmp_path / "d.jsonl")[0] == 0
    assert run(capsys, "bench", "make-stub", "--dataset", tmp_path / "d.jsonl", "--out", tmp_path / "gold.json")[0] == 0
    code, out, _ = run(capsys, "bench", "run", "--dataset", tmp_path / "d.jsonl", "--stub", tmp_path / "gold.json",
                       "--out", tmp_path / "m.json", "--table", tmp_path / "t.txt")
    assert code == 0
    metrics = json.loads((tmp_path / "m.json").read_text())
    assert metrics["correlations"]["all"]["pearson"] == pytest.approx(1.0)
    assert (tmp_path / "t.txt").read_text().split()[:6] == ["Language", "n", "r_p", "r_s", "tau", "Average"]
    code, out, _ = run(capsys, "bench", "stats", "--predictions", tmp_path / "m.json", "--gold", tmp_path / "d.jsonl")
    assert code == 0
    assert json.loads(out)["correlations"] == metrics["correlations"]


def test_noisy_stub_is_seeded(capsys, tmp_path):
    run(capsys, "bench", "synth", "--n", 10, "--out", tmp_path / "d.jsonl")
    outs = []
    for seed in (1, 1, 2):
        run(capsys, "--seed", seed, "bench", "make-stub", "--dataset", tmp_path / "d.jsonl", "--flip-rate", 0.3,
            "--out", tmp_path / f"r{len(outs)}.json")
        outs.append((tmp_path / f"r{len(outs)}.json").read_text())
    assert outs[0] == outs[1] != outs[2]
