import dataclasses
import json

import numpy as np
import pytest

from fedmoo.benchmarks import evaluate, sample_pareto_front
from fedmoo.cli import main
from fedmoo.harness import (
    CSV_HEADER,
    ExperimentConfig,
    coerce_field,
    config_from_sources,
    parse_config_file,
    read_records_csv,
    run_experiment,
    sweep,
    write_records_csv,
)
from fedmoo.federation import ConvergenceRecord
from fedmoo.metrics import igd, nondominated_filter
from fedmoo.sampling import latin_hypercube


def tiny_config(**overrides):
    defaults = dict(
        problem="dtlz2",
        objectives=2,
        dims=4,
        clients=2,
        rounds=1,
        runs=1,
        epochs=1,
        pop_size=8,
        generations=2,
        reference_size=100,
        record_timing=False,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


@pytest.mark.parametrize(
    "bad",
    [
        {"problem": "zdt1"},
        {"optimizer": "moead"},
        {"objectives": 1},
        {"objectives": 6, "dims": 5},
        {"runs": 0},
        {"rounds": -1},
        {"participation": 0.0},
        {"failure_prob": 1.0},
        {"workers": 0},
        {"objectives": 4, "dims": 8, "optimizer": "rvea"},
        {"learning_rate": -0.1},
    ],
)
def test_validation_rejects(bad):
    with pytest.raises(ValueError):
        tiny_config(**bad).validate()


def test_optimizer_defaults_follow_objective_count():
    assert ExperimentConfig(objectives=3).resolved_optimizer() == "nsga2"
    assert ExperimentConfig(objectives=5, dims=12).resolved_optimizer() == "rvea"
    assert ExperimentConfig(objectives=5, dims=12, optimizer="nsga2").resolved_optimizer() == "nsga2"


def test_coerce_field():
    assert coerce_field("dims", "30") == 30
    assert coerce_field("participation", "0.8") == 0.8
    assert coerce_field("problem", "dtlz5") == "dtlz5"
    assert coerce_field("centers", "none") is None
    assert coerce_field("centers", "7") == 7
    assert coerce_field("record_timing", "false") is False
    assert coerce_field("record_timing", "1") is True
    with pytest.raises(ValueError):
        coerce_field("no_such_key", "1")
    with pytest.raises(ValueError):
        coerce_field("record_timing", "maybe")


def test_parse_config_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\nproblem = dtlz5\n\ndims=12\nseed=3\n")
    assert parse_config_file(path) == {"problem": "dtlz5", "dims": "12", "seed": "3"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("problem dtlz5\n")
    with pytest.raises(ValueError):
        parse_config_file(bad)


def test_config_precedence():
    assert config_from_sources().dims == 10
    assert config_from_sources({"dims": "6"}).dims == 6
    assert config_from_sources({"dims": "6"}, {"dims": 8}).dims == 8
    with pytest.raises(ValueError):
        config_from_sources(overrides={"no_such_key": 1})


def test_csv_round_trip(tmp_path):
    records = [
        ConvergenceRecord(0, 0, 43, 0.123456789012345, 12.5),
        ConvergenceRecord(0, 1, 48, 1e-17, 0.0),
        ConvergenceRecord(1, 0, 43, float("nan"), 3.0),
    ]
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    back = read_records_csv(path)
    assert len(back) == len(records)
    for a, b in zip(records, back):
        assert (a.run, a.iteration, a.fes) == (b.run, b.iteration, b.fes)
        assert a.igd == b.igd or (np.isnan(a.igd) and np.isnan(b.igd))
        assert a.ms == b.ms


def test_csv_header_is_validated(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_records_csv(path)


def test_outputs_are_byte_identical_across_runs(tmp_path):
    config_a = tiny_config(runs=2, out=str(tmp_path / "a"))
    config_b = tiny_config(runs=2, out=str(tmp_path / "b"))
    result_a = run_experiment(config_a)
    result_b = run_experiment(config_b)
    for name in ("records", "summary", "events"):
        assert result_a.paths[name].read_bytes() == result_b.paths[name].read_bytes()
    first = (tmp_path / "a" / "records.csv").read_text().splitlines()
    assert first[0] == ",".join(CSV_HEADER)
    assert all(line.endswith(",0.0") for line in first[1:])  # ms suppressed


def test_zero_round_summary_matches_initial_design():
    config = tiny_config(rounds=0, seed=7, reference_size=300)
    result = run_experiment(config)
    # recompute what run 0 must have measured: the seeded initial design
    streams = np.random.SeedSequence(7).spawn(config.clients + 1)
    design = latin_hypercube(11 * config.dims - 1, config.dims, np.random.default_rng(streams[0]))
    values = evaluate(config.problem_instance(), design)
    reference = sample_pareto_front(config.problem_instance(), 300)
    want = igd(nondominated_filter(values), reference)
    assert result.summary["mean_igd"] == pytest.approx(want, abs=1e-15)
    assert result.summary["std_igd"] == 0.0
    assert len(result.records) == 1


def test_summary_schema_and_spread():
    result = run_experiment(tiny_config(runs=3, seed=11))
    s = result.summary
    assert set(s) == {"problem", "M", "d", "optimizer", "mean_igd", "std_igd", "runs"}
    assert s["problem"] == "dtlz2"
    assert s["M"] == 2 and s["d"] == 4
    assert s["optimizer"] == "nsga2"
    assert len(s["runs"]) == 3
    assert s["mean_igd"] == pytest.approx(np.mean(s["runs"]))
    assert s["std_igd"] == pytest.approx(np.std(s["runs"], ddof=1))
    json.dumps(s)  # all entries must serialize


def test_records_cover_every_run_and_round():
    result = run_experiment(tiny_config(runs=2, rounds=3))
    got = {(r.run, r.iteration) for r in result.records}
    assert got == {(run, it) for run in range(2) for it in range(4)}
    assert all(event["run"] in (0, 1) for event in result.events)
    assert len(result.events) == 2 * 3


def test_worker_pool_matches_serial():
    serial = run_experiment(tiny_config(runs=2, seed=5))
    parallel = run_experiment(tiny_config(runs=2, seed=5, workers=2))
    assert serial.records == parallel.records
    assert serial.summary == parallel.summary


def test_sweep_single_value_matches_plain_run(tmp_path):
    base = tiny_config(out=str(tmp_path))
    results = sweep(base, "participation", [1.0])
    plain = run_experiment(
        dataclasses.replace(base, participation=1.0, out=None)
    )
    assert results[0].summary == plain.summary
    assert (tmp_path / "participation=1" / "records.csv").exists()
    sweep_rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(sweep_rows) == 2
    assert sweep_rows[1].startswith("participation,1.0,dtlz2,2,4,nsga2,")


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(ValueError):
        sweep(tiny_config(), "alpha", [1.0])
    with pytest.raises(ValueError):
        sweep(tiny_config(), "participation", [])


def cli_flags(tmp_path=None, **extra):
    flags = [
        "--problem", "dtlz2", "--objectives", "2", "--dims", "4",
        "--clients", "2", "--rounds", "1", "--runs", "1", "--epochs", "1",
        "--pop-size", "8", "--generations", "2", "--reference-size", "100",
        "--no-timing",
    ]
    if tmp_path is not None:
        flags += ["--out", str(tmp_path)]
    for key, value in extra.items():
        flags += [f"--{key.replace('_', '-')}", str(value)]
    return flags


def test_cli_run_writes_outputs(tmp_path, capsys):
    assert main(["run", *cli_flags(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "dtlz2 M=2 d=4 nsga2" in out
    assert (tmp_path / "records.csv").exists()
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "events.jsonl").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["optimizer"] == "nsga2"


def test_cli_reports_config_errors(capsys):
    assert main(["run", *cli_flags(), "--participation", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "problem=dtlz2\nobjectives=2\ndims=4\nclients=2\nrounds=1\nruns=1\n"
        "epochs=1\npop_size=8\ngenerations=2\nreference_size=100\n"
        "record_timing=false\nseed=1\n"
    )
    assert main(["run", "--config", str(cfg), "--seed", "2"]) == 0
    capsys.readouterr()
    # same file without the flag uses the file's seed; both must succeed
    assert main(["run", "--config", str(cfg)]) == 0


def test_cli_sweep(tmp_path, capsys):
    argv = [
        "sweep", *cli_flags(tmp_path),
        "--parameter", "participation", "--values", "0.5,1.0",
    ]
    assert main(argv) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if "mean final IGD" in l]
    assert len(lines) == 2
    assert (tmp_path / "participation=0.5" / "summary.json").exists()
    assert (tmp_path / "participation=1" / "summary.json").exists()
    assert (tmp_path / "sweep.csv").exists()
