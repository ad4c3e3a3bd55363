import csv
import io
import json
from unittest.mock import MagicMock

from click.testing import CliRunner

from app import main
from app.main import cli

TRIANGLE = {"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}
K4_STACKING = {"ops": [[3, [0, 1, 2]]]}
K4_WITH_TERMINALS = {"n": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]], "terminals": [0, 1]}


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_cover_triangle(write_json):
    result = CliRunner().invoke(cli, ["cover", write_json("t.json", TRIANGLE), "--class", "sp"])
    assert result.exit_code == 0
    (record,) = rows(result.stdout)
    assert record["size"] == "2"
    assert record["algorithm"] == "sp"


def test_cover_k4_stacking(write_json, tmp_path):
    emit = str(tmp_path / "cover.json")
    result = CliRunner().invoke(cli, ["cover", write_json("k4.json", K4_STACKING), "--class", "3tree", "--emit", emit])
    assert result.exit_code == 0
    assert rows(result.stdout)[0]["size"] == "2"
    with open(emit, encoding="utf-8") as f:
        assert len(json.load(f)["paths"]) == 2


def test_non_series_parallel_exits_with_1(write_json):
    result = CliRunner().invoke(cli, ["cover", write_json("k4.json", K4_WITH_TERMINALS), "--class", "sp"])
    assert result.exit_code == 1
    assert "series-parallel" in result.output


def test_verify(write_json):
    runner = CliRunner()
    graph = write_json("t.json", TRIANGLE)
    good = runner.invoke(cli, ["verify", graph, write_json("good.json", {"paths": [[0, 1, 2], [2, 0]]})])
    assert good.exit_code == 0
    assert "valid: 2 paths" in good.stdout

    bad = runner.invoke(cli, ["verify", graph, write_json("bad.json", {"paths": [[0, 1, 2]]})])
    assert bad.exit_code == 1
    assert "not covered" in bad.output


def test_gen_uses_the_seed_from_the_environment():
    runner = CliRunner()
    from_env = runner.invoke(cli, ["gen", "--family", "sp", "--size", "12"], env={"GALLAI_SEED": "7"})
    explicit = runner.invoke(cli, ["gen", "--family", "sp", "--size", "12", "--seed", "7"])
    assert from_env.exit_code == explicit.exit_code == 0
    assert json.loads(from_env.stdout) == json.loads(explicit.stdout)
    assert json.loads(explicit.stdout)["n"] == 12


def test_gen_then_cover(tmp_path):
    runner = CliRunner()
    out = str(tmp_path / "tree.json")
    assert runner.invoke(cli, ["gen", "--family", "3tree-serpentine", "--size", "20", "--out", out]).exit_code == 0
    result = runner.invoke(cli, ["cover", out, "--class", "3tree"])
    assert result.exit_code == 0
    assert int(rows(result.stdout)[0]["size"]) <= 10


def test_fuzz_writes_one_row_per_instance():
    result = CliRunner().invoke(cli, ["fuzz", "--family", "sp", "--count", "25", "--max-n", "8", "--oracle-cap", "14"])
    assert result.exit_code == 0
    records = rows(result.stdout)
    assert len(records) == 25
    assert all(int(r["oracle"]) <= int(r["size"]) for r in records if r["oracle"])


def test_fuzz_full_trees():
    result = CliRunner().invoke(cli, ["fuzz", "--family", "3tree-full", "--count", "20", "--max-n", "91"])
    assert result.exit_code == 0
    for record in rows(result.stdout):
        assert int(record["size"]) <= (int(record["n"]) + 2) // 3


def test_bench():
    result = CliRunner().invoke(cli, ["bench", "--family", "sp", "--sizes", "100,1000"])
    assert result.exit_code == 0
    assert [r["n"] for r in rows(result.stdout)] == ["100", "1000"]


def test_bench_rejects_garbage_sizes():
    result = CliRunner().invoke(cli, ["bench", "--sizes", "ten,twenty"])
    assert result.exit_code == 2


def test_oracle(write_json):
    result = CliRunner().invoke(cli, ["oracle", write_json("t.json", TRIANGLE)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["min_size"] == 2


def test_version():
    result = CliRunner().invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.output


def test_cover_rejects_unknown_vertex_ids(write_json):
    result = CliRunner().invoke(cli, ["cover", write_json("bad.json", {"n": 2, "edges": [[0, 2]]}), "--class", "sp"])
    assert result.exit_code == 1
    assert "out of range" in result.output


def test_dispatch_is_logged(write_json, monkeypatch):
    logger = MagicMock()
    monkeypatch.setattr(main, "logger", logger)
    CliRunner().invoke(cli, ["oracle", write_json("t.json", TRIANGLE)])
    assert "running oracle" in logger.debug.call_args_list[0].args[0]
