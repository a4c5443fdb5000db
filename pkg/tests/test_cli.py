import json

import pytest

from continuum_aif.cli import main

from test_env import write_trace


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zero_policy_length_is_config_error(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--pl", "0", "--out", str(tmp_path))
    assert code == 2 and "policy_length" in err


def test_missing_trace_is_ingestion_error(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--trace", str(tmp_path / "nope.csv"), "--out", str(tmp_path))
    assert code == 3 and "nope.csv" in err


def test_bad_override_and_config_file(capsys, tmp_path):
    assert run_cli(capsys, "run", "--set", "steps", "--out", str(tmp_path))[0] == 2
    assert run_cli(capsys, "run", "--set", "bogus=1", "--out", str(tmp_path))[0] == 2
    bad = tmp_path / "c.json"
    bad.write_text("[1, 2]")
    assert run_cli(capsys, "run", "--config", str(bad), "--out", str(tmp_path))[0] == 2


def test_validate_model(capsys, tmp_path):
    dump = tmp_path / "worker.json"
    code, out, _ = run_cli(capsys, "validate-model", "worker", "--dump", str(dump))
    assert code == 0 and "FAIL" not in out
    assert json.loads(dump.read_text())["name"] == "worker"
    assert run_cli(capsys, "validate-model", "camera")[0] == 2


def test_inspect_complete_grid(capsys, tmp_path):
    path = write_trace(tmp_path / "t.csv")
    code, out, _ = run_cli(capsys, "inspect-traces", str(path))
    assert code == 0 and "0 cells interpolated" in out


def test_inspect_lists_fillable_cells(capsys, tmp_path):
    path = write_trace(tmp_path / "t.csv", skip={("480p", 20, 0)})
    code, out, _ = run_cli(capsys, "inspect-traces", str(path))
    assert code == 0
    assert "fillable: 480p 20fps gpu=0" in out and "1 cells interpolated" in out


def test_inspect_malformed_row(capsys, tmp_path):
    path = write_trace(tmp_path / "t.csv", bad_row=17)
    code, _, err = run_cli(capsys, "inspect-traces", str(path))
    assert code == 3 and "row 17" in err


def test_run_writes_artifacts_and_is_reproducible(capsys, tmp_path):
    args = ["run", "--steps", "12", "--reps", "2", "--seed", "7"]
    code, out, _ = run_cli(capsys, *args, "--out", str(tmp_path / "a"))
    assert code == 0
    assert out.splitlines()[0].startswith("producer: WF=")
    assert run_cli(capsys, *args, "--out", str(tmp_path / "b"))[0] == 0
    for name in ("expert_3_7.csv", "expert_3_7_metrics.csv", "expert_3_7.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CONTINUUM_AIF_SEED", "11")
    assert run_cli(capsys, "run", "--steps", "5", "--reps", "1", "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "expert_3_11.csv").is_file()
    # an explicit flag wins over the environment
    assert run_cli(capsys, "run", "--steps", "5", "--reps", "1", "--seed", "2", "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "expert_3_2.csv").is_file()


def test_config_file_and_set_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": "learning", "steps": 5, "repetitions": 1, "seed": 3}))
    code, _, _ = run_cli(capsys, "run", "--config", str(cfg), "--set", "policy_length=2", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "learning_2_3.json").read_text())
    assert doc["config"]["policy_length"] == 2 and doc["config"]["steps"] == 5


def test_trace_run(capsys, tmp_path):
    path = write_trace(tmp_path / "t.csv", device="edge")
    code, _, _ = run_cli(capsys, "run", "--trace", str(path), "--steps", "5", "--reps", "1", "--out", str(tmp_path))
    assert code == 0


@pytest.mark.parametrize("pl", ["1", "2"])
def test_cost_study(capsys, tmp_path, pl):
    code, out, _ = run_cli(
        capsys, "run", "--scenario", "cost_study", "--pl", pl, "--steps", "4", "--reps", "1", "--out", str(tmp_path)
    )
    assert code == 0 and "expert_pl1" in out
    assert (tmp_path / f"cost_study_{pl}_0_timing.json").is_file()
