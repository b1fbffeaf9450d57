import json

import pytest

from purex.bench import checks
from purex.bench.cli import main


def test_run_writes_csv_and_json(bernoulli_toml, tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(bernoulli_toml), "--reps", "4", "--out", str(out), "--quiet"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("seed,framework,output_arm")
    out_json = tmp_path / "r.json"
    assert main(["run", "--config", str(bernoulli_toml), "--reps", "4", "--out", str(out_json), "--format", "json", "--quiet"]) == 0
    doc = json.loads(out_json.read_text())
    assert len(doc["rows"]) == 4 and doc["aggregates"]["replications"] == 4


def test_run_is_byte_identical(bernoulli_toml, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        main(["run", "--config", str(bernoulli_toml), "--seed", "11", "--reps", "6", "--out", str(p), "--format", "json", "--quiet"])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_run_to_stdout(bernoulli_toml, capsys):
    assert main(["run", "--config", str(bernoulli_toml), "--reps", "2", "--quiet"]) == 0
    assert capsys.readouterr().out.count("\n") == 3


def test_config_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[problem]\ndelta = 0.1\nfoo = 1\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "problem.foo" in capsys.readouterr().err
    assert main(["bound", "--config", str(tmp_path / "missing.toml")]) == 2


def test_bad_reps_exits_2(bernoulli_toml):
    assert main(["run", "--config", str(bernoulli_toml), "--reps", "0"]) == 2


def test_unknown_suite_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["check", "nosuch"])
    assert exc.value.code == 2


def test_bound_prints_both_bounds(configs_dir, capsys):
    assert main(["bound", "--config", str(configs_dir / "bernoulli_means.toml")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["racing_bound"], doc["lucb_bound"]) == (606, 413)
    assert doc["gaps"] == pytest.approx([0.8, 0.8])


def test_check_passes_and_negative_control_fails(capsys):
    assert main(["check", "metrics"]) == 0
    assert main(["check", "metrics", "--corrupt", "tv_discrete"]) == 1
    out = capsys.readouterr().out
    assert "FAIL metrics.tv_oracle" in out


def test_sweep_cli(bernoulli_toml, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(bernoulli_toml), "--vary", "problem.delta=0.1,0.01", "--reps", "5", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3
    assert main(["sweep", "--config", str(bernoulli_toml), "--vary", "problem.delta=0.1,7"]) == 2


@pytest.mark.parametrize("corrupt", sorted(checks.CORRUPTIONS))
def test_every_corruption_fails_its_suite(corrupt):
    suite = {"n_H": "confidence", "dkw_band": "rewards", "tv_discrete": "metrics"}[corrupt]
    assert not all(r.passed for r in checks.run_suite(suite, corrupt=corrupt))


def test_corruption_is_undone():
    from purex import confidence, metrics

    before = (confidence.n_H, confidence.dkw_band, metrics.tv_discrete)
    checks.run_suite("metrics", corrupt="tv_discrete")
    assert (confidence.n_H, confidence.dkw_band, metrics.tv_discrete) == before
