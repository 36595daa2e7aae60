import pytest

from uavorch import jsonio
from uavorch.cli import run
from uavorch.scenario import desk_params, generate_scenario


def test_pipeline_seed7_desk(tmp_path, capsys):
    s, g, h = tmp_path / "s.json", tmp_path / "g.json", tmp_path / "h.lp"
    assert run(["generate", "--seed", "7", "--profile", "desk", "--out", str(s)]) == 0
    assert run(["solve", "--scenario", str(s), "--k-paths", "8", "--time-limit", "60",
                "--out", str(g)]) == 0
    assert jsonio.loads(g.read_text())["status"] == "optimal"
    assert run(["validate", "--scenario", str(s), "--solution", str(g)]) == 0
    assert "no constraint violations" in capsys.readouterr().out
    assert run(["export-lp", "--scenario", str(s), "--out", str(h)]) == 0
    assert h.read_text().startswith("\\")


def test_generate_matches_library(tmp_path):
    out = tmp_path / "s.json"
    assert run(["generate", "--seed", "3", "--uavs", "2", "--out", str(out)]) == 0
    assert out.read_text() == generate_scenario(desk_params(seed=3, uavs=2)).dumps()


def test_env_seed_overrides_flag(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("ORCH_SEED", "11")
    assert run(["generate", "--seed", "2", "--out", str(a)]) == 0
    monkeypatch.delenv("ORCH_SEED")
    assert run(["generate", "--seed", "11", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bad_env_seed_is_usage_error(tmp_path, monkeypatch):
    monkeypatch.setenv("ORCH_SEED", "eleven")
    assert run(["generate", "--out", str(tmp_path / "x.json")]) == 2


def test_infeasible_scenario_prints_witness(tmp_path, capsys):
    # pick a desk seed with a UAV whose latency budget is below any one-hop link
    s, g = tmp_path / "s.json", tmp_path / "g.json"
    seed = next(k for k in range(100) if _assembly_infeasible(k))
    run(["generate", "--seed", str(seed), "--out", str(s)])
    capsys.readouterr()
    assert run(["solve", "--scenario", str(s), "--out", str(g)]) == 1
    out = capsys.readouterr().out
    doc = jsonio.loads(g.read_text())
    u, a = doc["witness"]["uav"], doc["witness"]["access"]
    assert f"({u}, {a})" in out
    assert run(["validate", "--scenario", str(s), "--solution", str(g)]) == 1


def _assembly_infeasible(seed):
    from uavorch.model import assemble_problem
    return bool(assemble_problem(generate_scenario(desk_params(seed=seed)), strict=False).witnesses)


def test_unknown_flag_is_usage_error(capsys):
    assert run(["generate", "--bogus"]) == 2
    assert "usage:" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error():
    assert run([]) == 2


def test_help_exits_zero():
    assert run(["--help"]) == 0


def test_missing_file_is_usage_error(tmp_path):
    assert run(["solve", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x")]) == 2


def test_malformed_scenario_is_usage_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": []}')
    assert run(["export-lp", "--scenario", str(bad), "--out", str(tmp_path / "m.lp")]) == 2
    bad.write_text("not json")
    assert run(["export-lp", "--scenario", str(bad), "--out", str(tmp_path / "m.lp")]) == 2


@pytest.mark.parametrize("k", ["0", "-3", "many"])
def test_bad_k_paths(tmp_path, k):
    assert run(["solve", "--scenario", "x", "--k-paths", k, "--out", "y"]) == 2


def test_k_paths_inf(tmp_path):
    s, g = tmp_path / "s.json", tmp_path / "g.json"
    run(["generate", "--seed", "1", "--uavs", "2", "--out", str(s)])
    assert run(["solve", "--scenario", str(s), "--k-paths", "inf", "--out", str(g)]) == 0


def test_tampered_solution_fails_validation(tmp_path, capsys):
    s, g = tmp_path / "s.json", tmp_path / "g.json"
    run(["generate", "--seed", "7", "--out", str(s)])
    run(["solve", "--scenario", str(s), "--out", str(g)])
    doc = jsonio.loads(g.read_text())
    doc["uavs"][0]["stops"][0]["route"] = doc["uavs"][0]["stops"][0]["route"][:-1]
    g.write_text(jsonio.dumps(doc))
    capsys.readouterr()
    assert run(["validate", "--scenario", str(s), "--solution", str(g)]) == 1
    assert "C9" in capsys.readouterr().out


def test_internal_error_exit_code(tmp_path, monkeypatch):
    import uavorch.cli as cli
    def boom(*_a, **_k):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "generate_scenario", boom)
    assert run(["generate", "--out", str(tmp_path / "x.json")]) == 3


def test_experiment_writes_csvs(tmp_path):
    out = tmp_path / "exp"
    assert run(["experiment", "--suite", "replicates_vs_mission_length", "--seeds", "2",
                "--out-dir", str(out), "--no-timing"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["replicates_vs_mission_length.csv", "summary.csv"]
    assert run(["experiment", "--suite", "cost_vs_uavs", "--seeds", "0", "--out-dir", str(out)]) == 2
