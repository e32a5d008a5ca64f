import csv

import pytest

from gridauction.cli import main
from gridauction.reporting import load_report
from gridauction.scenario import load_scenario


@pytest.fixture
def scenario_file(tmp_path, data_dir):
    out = tmp_path / "scenario.json"
    code = main(["gen",
                 "--grid", str(data_dir / "grid_properties.txt"),
                 "--users", str(data_dir / "user_properties.txt"),
                 "--jobs", str(data_dir / "job_properties.txt"),
                 "--seed", "1", "--sets", "4", "--jobs-per-set", "5",
                 "--horizon", "30", "--out", str(out)])
    assert code == 0
    return out


class TestGen:
    def test_deterministic_regeneration(self, tmp_path, data_dir):
        args = ["gen", "--grid", str(data_dir / "grid_properties.txt"),
                "--users", str(data_dir / "user_properties.txt"),
                "--jobs", str(data_dir / "job_properties.txt"),
                "--seed", "1"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_key_names_the_key(self, tmp_path, data_dir, capsys):
        bad = tmp_path / "bad.txt"
        text = (data_dir / "grid_properties.txt").read_text()
        bad.write_text(text.replace("number_of_resources", "resource_count"))
        code = main(["gen", "--grid", str(bad),
                     "--users", str(data_dir / "user_properties.txt"),
                     "--out", str(tmp_path / "x.json")])
        assert code == 1
        assert "resource_count" in capsys.readouterr().err

    def test_table_presets(self, tmp_path):
        out = tmp_path / "g7.json"
        code = main(["gen", "--grid-table", "G7", "--users-table", "users1",
                     "--seed", "2", "--sets", "2", "--jobs-per-set", "5",
                     "--out", str(out)])
        assert code == 0
        scenario = load_scenario(out)
        assert len(scenario.resources) == 3
        for res in scenario.resources:
            for mspec in res.machines:
                assert 15 <= mspec.mtbf <= 90

    def test_unknown_table(self, tmp_path, capsys):
        code = main(["gen", "--grid-table", "G99", "--users-table", "users1",
                     "--out", str(tmp_path / "x.json")])
        assert code == 1


class TestRun:
    def test_writes_reports_and_figures(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        code = main(["run", str(scenario_file), "--no-failures",
                     "--max-ticks", "300", "--out", str(out)])
        assert code == 0
        for name in ("outcomes.csv", "loading.csv", "summary.csv",
                     "report.json", "fig_loading.png", "fig_outcomes.png"):
            assert (out / name).exists(), name

    def test_no_figures_flag(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        code = main(["run", str(scenario_file), "--no-failures",
                     "--max-ticks", "300", "--no-figures",
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        assert not (out / "fig_loading.png").exists()
        assert not (out / "report.json").exists()

    def test_truncation_exit_code(self, scenario_file, tmp_path, capsys):
        code = main(["run", str(scenario_file), "--no-failures",
                     "--max-ticks", "3", "--out", str(tmp_path / "out")])
        assert code == 2
        assert "truncated" in capsys.readouterr().err

    def test_missing_scenario(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == 1

    def test_zero_exponent_run_reduces_to_raw_cost(self, scenario_file,
                                                   tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(scenario_file), "--no-failures",
                     "--max-ticks", "300", "--no-figures", "--format",
                     "json", "--out", str(out)]) == 0
        report = load_report(out / "report.json")
        assert report.metrics["mean_assigned_raw_cost"] == \
            report.metrics["mean_assigned_effective_cost"]

    def test_paired_seed_starvation_comparison(self, tmp_path, data_dir):
        # same seed, sp=2 vs sp=0 on a contended scenario: the starving
        # run must not report a lower mean assigned cost
        scenario = tmp_path / "peak.json"
        assert main(["gen", "--grid", str(data_dir / "grid_properties.txt"),
                     "--users", str(data_dir / "user_properties.txt"),
                     "--seed", "0", "--sets", "30", "--jobs-per-set", "10",
                     "--horizon", "100", "--peak",
                     "--out", str(scenario)]) == 0
        means = {}
        for sp in ("0", "2"):
            out = tmp_path / f"sp{sp}"
            code = main(["run", str(scenario), "--sp", sp, "--seed", "1",
                         "--no-failures", "--max-ticks", "25",
                         "--no-figures", "--format", "json",
                         "--out", str(out)])
            assert code == 2  # truncated by design
            report = load_report(out / "report.json")
            means[sp] = report.metrics["mean_assigned_raw_cost"]
        assert means["2"] >= means["0"]


class TestSweep:
    def test_degenerate_sweep_matches_single_run(self, scenario_file,
                                                 tmp_path):
        out_sweep = tmp_path / "sweep"
        out_run = tmp_path / "run"
        assert main(["sweep", "--scenario", str(scenario_file),
                     "--param", "sp", "--values", "1.0", "--seeds", "3",
                     "--no-failures", "--max-ticks", "300", "--no-figures",
                     "--out", str(out_sweep)]) == 0
        assert main(["run", str(scenario_file), "--sp", "1.0", "--seed", "3",
                     "--no-failures", "--max-ticks", "300", "--no-figures",
                     "--format", "both", "--out", str(out_run)]) == 0
        report = load_report(out_run / "report.json")
        with open(out_sweep / "sweep_processed_jobs.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["sp", "processed_jobs"]
        assert float(rows[1][1]) == report.metrics["processed_jobs"]

    def test_sweep_emits_figures_and_metric_files(self, scenario_file,
                                                  tmp_path):
        out = tmp_path / "sweep"
        assert main(["sweep", "--scenario", str(scenario_file),
                     "--param", "sp", "--values", "0,1", "--seeds", "1,2",
                     "--no-failures", "--max-ticks", "300",
                     "--out", str(out)]) == 0
        for name in ("sweep_processed_jobs.csv",
                     "sweep_mean_assigned_raw_cost.csv",
                     "sweep_mean_completion_time.csv",
                     "sweep_failed_jobs.csv",
                     "fig_processed_jobs.png"):
            assert (out / name).exists(), name

    def test_qp_sweep_writes_group_counts(self, scenario_file, tmp_path):
        out = tmp_path / "sweep"
        assert main(["sweep", "--scenario", str(scenario_file),
                     "--param", "qp", "--values", "0,1", "--seeds", "1",
                     "--no-failures", "--max-ticks", "300", "--no-figures",
                     "--out", str(out)]) == 0
        with open(out / "sweep_qos_groups.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["qp", "processed_max_qos", "processed_min_qos"]
        assert len(rows) == 3

    def test_balance_sweep_writes_variance_series(self, scenario_file,
                                                  tmp_path):
        out = tmp_path / "sweep"
        assert main(["sweep", "--scenario", str(scenario_file),
                     "--param", "balance", "--seeds", "1",
                     "--no-failures", "--max-ticks", "300", "--no-figures",
                     "--out", str(out)]) == 0
        with open(out / "sweep_variance.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["tick", "variance_off", "variance_on"]
        assert len(rows) > 1

    def test_bad_values_exit_input_error(self, scenario_file, tmp_path):
        assert main(["sweep", "--scenario", str(scenario_file),
                     "--param", "sp", "--values", "zero",
                     "--out", str(tmp_path)]) == 1


class TestStats:
    def test_scenario_stats(self, scenario_file, capsys):
        assert main(["stats", str(scenario_file)]) == 0
        out = capsys.readouterr().out
        assert "20 jobs" in out

    def test_report_stats(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        main(["run", str(scenario_file), "--no-failures", "--max-ticks",
              "300", "--no-figures", "--format", "json", "--out", str(out)])
        capsys.readouterr()
        assert main(["stats", str(out / "report.json")]) == 0
        assert "processed_jobs" in capsys.readouterr().out

    def test_directory_stats(self, scenario_file, tmp_path, capsys):
        out = tmp_path / "out"
        main(["run", str(scenario_file), "--no-failures", "--max-ticks",
              "300", "--no-figures", "--format", "csv", "--out", str(out)])
        capsys.readouterr()
        assert main(["stats", str(out)]) == 0
        assert "metric,value" in capsys.readouterr().out

    def test_unknown_target(self, tmp_path):
        assert main(["stats", str(tmp_path / "nope.bin")]) == 1


def test_env_var_sets_default_out(scenario_file, tmp_path, monkeypatch):
    workdir = tmp_path / "envout"
    workdir.mkdir()
    monkeypatch.setenv("GRIDAUCTION_OUT", str(workdir))
    assert main(["run", str(scenario_file), "--no-failures",
                 "--max-ticks", "300", "--no-figures",
                 "--format", "csv"]) == 0
    assert (workdir / "summary.csv").exists()
