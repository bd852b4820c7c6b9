import numpy as np
import pytest

from srm_irl.cli import build_parser, main
from srm_irl.config import ExperimentConfig
from srm_irl.io import load_demonstration, read_csv, read_json

TINY = """
seed = 2
[system]
horizon = 8
[demonstration]
n_trajectories = 40
[train]
episodes = 5
batch_size = 20
[erm]
max_iterations = 200
restarts = 1
[sweep]
sizes = [10, 40]
seeds = 2
[trials]
count = 2
"""


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY)
    return path


def _comment_ok(path, seed):
    first = path.read_text().splitlines()[0]
    assert first.startswith("# config_sha256=") and f"seed={seed}" in first


def test_parser_knows_every_subcommand():
    parser = build_parser()
    for cmd in ("generate", "erm-sweep", "srm", "srm-trials", "bounds"):
        extra = ["--dataset", "d"] if cmd in ("erm-sweep", "srm", "bounds") else []
        assert parser.parse_args([cmd, *extra]).command == cmd
    args = parser.parse_args(["srm-trials", "--trials", "3", "--jobs", "2", "--seed", "9", "--out", "o"])
    assert (args.trials, args.jobs, args.seed) == (3, 2, 9)
    with pytest.raises(SystemExit):
        parser.parse_args(["srm"])


def test_generate_is_deterministic(tiny, tmp_path):
    assert main(["generate", "--config", str(tiny), "--out", str(tmp_path / "a")]) == 0
    main(["generate", "--config", str(tiny), "--out", str(tmp_path / "b")])
    for name in ("demonstration.jsonl", "learning_curve.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    demo, header = load_demonstration(tmp_path / "a" / "demonstration.jsonl")
    assert len(demo) == 40 and header["horizon"] == 8 and header["discount"] == 0.9
    _comment_ok(tmp_path / "a" / "learning_curve.csv", 2)
    assert len(read_csv(tmp_path / "a" / "learning_curve.csv")) == 5


def test_default_header_echoes_horizon_and_discount(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[demonstration]\nn_trajectories = 2\n[train]\nepisodes = 1\nbatch_size = 2\n")
    main(["generate", "--config", str(cfg), "--out", str(tmp_path)])
    _, header = load_demonstration(tmp_path / "demonstration.jsonl")
    assert header["horizon"] == 50 and header["discount"] == 0.9


def test_pipeline(tiny, tmp_path, capsys):
    out = tmp_path / "run"
    main(["generate", "--config", str(tiny), "--out", str(out)])
    data = str(out / "demonstration.jsonl")

    main(["erm-sweep", "--config", str(tiny), "--dataset", data, "--out", str(out)])
    sweep = read_csv(out / "erm_sweep.csv")
    assert len(sweep) == 4 and {r["M"] for r in sweep} == {"10", "40"}
    assert all(float(r["error"]) >= 0 for r in sweep)
    _comment_ok(out / "erm_sweep.csv", 2)

    main(["srm", "--config", str(tiny), "--dataset", data, "--out", str(out)])
    risks = read_csv(out / "srm_risks.csv")
    report = read_json(out / "srm_report.json")
    assert len(risks) == 5 and report["penalty_weight"] == 2.0
    argmin = min(risks, key=lambda r: float(r["structural_risk"]))
    assert int(argmin["j"]) == report["selected"]
    assert "selected j*=" in capsys.readouterr().out

    main(["bounds", "--config", str(tiny), "--dataset", data, "--out", str(out)])
    bounds = read_json(out / "bounds.json")
    assert bounds["delta"] == 0.05 and bounds["selected"] == report["selected"]
    assert bounds["union_bound_value"] >= bounds["empirical_risk"]

    main(["srm-trials", "--config", str(tiny), "--out", str(out), "--trials", "2"])
    hist = read_csv(out / "srm_histogram.csv")
    assert sum(int(r["count"]) for r in hist) == 2
    _comment_ok(out / "srm_histogram.csv", 2)


def test_sweep_rejects_oversized_subsample(tiny, tmp_path):
    out = tmp_path / "run"
    main(["generate", "--config", str(tiny), "--out", str(out)])
    bad = tmp_path / "bad.toml"
    bad.write_text(TINY.replace("sizes = [10, 40]", "sizes = [10, 41]"))
    with pytest.raises(ValueError, match="exceeds"):
        main(["erm-sweep", "--config", str(bad), "--dataset", str(out / "demonstration.jsonl"), "--out", str(out)])


def test_parallel_trials_match_serial(tiny, tmp_path):
    main(["srm-trials", "--config", str(tiny), "--out", str(tmp_path / "s"), "--trials", "2", "--jobs", "1"])
    main(["srm-trials", "--config", str(tiny), "--out", str(tmp_path / "p"), "--trials", "2", "--jobs", "2"])
    for name in ("srm_histogram.csv", "srm_trials.csv"):
        assert (tmp_path / "s" / name).read_bytes() == (tmp_path / "p" / name).read_bytes()
