import json
import os
import subprocess
import sys

import pytest

from adhoc_secrecy import cli, sweep


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def as_record(out):
    rec = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition("  ")
        rec[key.strip()] = value.strip()
    return rec


class TestEval:
    def test_fig4_point(self, capsys):
        code, out, _ = run(["eval", "sectoring", "pco", "--n", "4", "--beta-b", "10", "--phi", "0.5"], capsys)
        assert code == 0
        value = float(as_record(out)["value"])
        assert 0 < value < 1

    def test_json(self, capsys):
        code, out, _ = run(["eval", "beamforming", "pso_ub", "--json"], capsys)
        rec = json.loads(out)
        assert code == 0
        assert rec["scheme"] == "beamforming" and rec["n"] == 4
        assert rec["value"] == sweep.evaluate("beamforming", "pso_ub", sweep.DEFAULTS).value

    def test_alpha_two(self, capsys):
        code, _, err = run(["eval", "sectoring", "pco", "--alpha", "2"], capsys)
        assert code == 2
        assert "alpha must exceed 2" in err

    def test_bad_choice_is_usage_error(self, capsys):
        code, _, err = run(["eval", "sectoring", "nonsense"], capsys)
        assert code == 2 and "usage error" in err

    def test_infeasible_optimum(self, capsys):
        code, _, err = run(["eval", "beamforming", "phi_opt", "--lambda-e", "0.5", "--epsilon", "1e-4", "--n", "2"], capsys)
        assert code == 3
        assert "no positive secrecy capacity" in err


class TestConfigPrecedence:
    def test_file_then_flags(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("# shared settings\nalpha = 3\nn=8\nphi=0.2  # trailing comment\n")
        code, out, _ = run(["eval", "sectoring", "pco", "--config", str(conf), "--n", "6", "--json"], capsys)
        rec = json.loads(out)
        assert code == 0
        assert rec["alpha"] == 3.0 and rec["phi"] == 0.2 and rec["n"] == 6
        assert rec["lambda_l"] == sweep.DEFAULTS["lambda_l"]

    def test_bad_config_line(self, tmp_path, capsys):
        conf = tmp_path / "bad.conf"
        conf.write_text("gamma=3\n")
        code, _, err = run(["eval", "sectoring", "pco", "--config", str(conf)], capsys)
        assert code == 2 and "bad.conf:1" in err

    def test_missing_config(self, tmp_path, capsys):
        code, _, _ = run(["eval", "sectoring", "pco", "--config", str(tmp_path / "nope.conf")], capsys)
        assert code == 4


class TestSweep:
    def test_fig1_sweep(self, tmp_path, capsys):
        path = tmp_path / "fig1.csv"
        argv = ["sweep", "--scheme", "sectoring", "--quantity", "pso_ub", "pso_lb", "--param", "phi",
                "--start", "0.05", "--stop", "0.95", "--count", "50", "-o", str(path)]
        code, _, _ = run(argv, capsys)
        assert code == 0
        meta, cols, rows = sweep.read_csv(path)
        assert len(rows) == 50
        assert all(r["sectoring_pso_lb"] <= r["sectoring_pso_ub"] for r in rows)
        assert meta["swept"] == "phi" and "phi" not in meta
        assert sweep.verify_file(path) == []

    def test_both_schemes_to_stdout(self, capsys):
        argv = ["sweep", "--scheme", "both", "--quantity", "phi_opt", "--param", "n",
                "--start", "2", "--stop", "8", "--count", "7"]
        code, out, _ = run(argv, capsys)
        assert code == 0
        header = [l for l in out.splitlines() if not l.startswith("#")][0]
        assert header.startswith("n,sectoring_phi_opt")
        assert "beamforming_phi_opt_feasible" in header

    def test_json_output(self, capsys):
        argv = ["sweep", "--scheme", "beamforming", "--quantity", "pco", "--param", "beta_b",
                "--start", "0.1", "--stop", "10", "--count", "3", "--spacing", "log", "--json"]
        code, out, _ = run(argv, capsys)
        body = json.loads(out)
        assert code == 0 and len(body["rows"]) == 3

    def test_count_below_two(self, capsys):
        argv = ["sweep", "--scheme", "sectoring", "--quantity", "pco", "--param", "phi",
                "--start", "0.1", "--stop", "0.9", "--count", "1"]
        code, _, err = run(argv, capsys)
        assert code == 2 and "count" in err

    def test_unwritable(self, tmp_path, capsys):
        argv = ["sweep", "--scheme", "sectoring", "--quantity", "pco", "--param", "phi",
                "--start", "0.1", "--stop", "0.9", "--count", "2", "-o", str(tmp_path / "missing" / "x.csv")]
        code, _, _ = run(argv, capsys)
        assert code == 4

    def test_infeasible_points_do_not_abort(self, tmp_path, capsys):
        path = tmp_path / "cap.csv"
        argv = ["sweep", "--scheme", "sectoring", "--quantity", "capacity", "--param", "lambda_e",
                "--start", "0.0001", "--stop", "1", "--count", "5", "--spacing", "log", "-o", str(path)]
        assert run(argv, capsys)[0] == 0
        _, _, rows = sweep.read_csv(path)
        assert rows[0]["sectoring_capacity_feasible"] == 1.0
        assert rows[-1]["sectoring_capacity"] == 0.0 and rows[-1]["sectoring_capacity_feasible"] == 0.0


class TestOptimize:
    def test_sectoring_alpha4(self, capsys):
        code, out, _ = run(["optimize", "sectoring", "--n", "4", "--json"], capsys)
        rec = json.loads(out)
        assert code == 0
        assert rec["phi_discrepancy"] == pytest.approx(abs(rec["phi_opt"] - rec["phi_closed_form"]))
        assert rec["phi_discrepancy"] < 1e-4

    def test_beamforming_large_n(self, capsys):
        code, out, _ = run(["optimize", "beamforming", "--n", "64", "--json"], capsys)
        rec = json.loads(out)
        assert code == 0 and rec["phi_opt"] < 1 and rec["approx"] is True

    def test_epsilon_out_of_range(self, capsys):
        code, _, err = run(["optimize", "sectoring", "--epsilon", "1.5"], capsys)
        assert code == 2 and "epsilon" in err

    def test_infeasible(self, capsys):
        code, _, err = run(["optimize", "sectoring", "--n", "2"], capsys)
        assert code == 3 and "no positive secrecy capacity" in err


class TestSimulate:
    ARGS = ["simulate", "beamforming", "pco", "--n", "2", "--beta-b", "3", "--trials", "3000", "--seed", "17"]

    def test_deterministic_output(self, capsys):
        code1, out1, _ = run(self.ARGS, capsys)
        code2, out2, _ = run(self.ARGS, capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        rec = as_record(out1)
        assert rec["check"] in ("PASS", "FAIL")
        assert rec["seed"] == "17"

    def test_too_few_trials(self, capsys):
        code, _, err = run(["simulate", "sectoring", "pco", "--trials", "10"], capsys)
        assert code == 2 and "trials" in err

    def test_pso_record(self, tmp_path, capsys):
        out_path = tmp_path / "sim.json"
        code, out, _ = run(["simulate", "sectoring", "pso", "--trials", "2000", "--json", "-o", str(out_path)], capsys)
        rec = json.loads(out)
        assert code == 0
        assert rec["analytic_lb"] <= rec["analytic_ub"]
        body = json.loads(out_path.read_text())
        assert body["rows"][0]["p_hat"] == rec["p_hat"]
        assert body["metadata"]["command"] == "simulate"

    def test_simulate_record_pass(self):
        from adhoc_secrecy.montecarlo import McConfig

        c = dict(sweep.DEFAULTS, n=2, beta_b=3.0)
        rec = cli.simulate_record("beamforming", "pco", c, McConfig(trials=20_000, seed=1))
        assert rec["check"] == "PASS"


class TestReproduce:
    def test_fig4_files(self, tmp_path, capsys):
        code, out, _ = run(["reproduce", "4", "--outdir", str(tmp_path)], capsys)
        assert code == 0
        assert sorted(os.listdir(tmp_path)) == ["fig4_beamforming.csv", "fig4_sectoring.csv"]
        for name in os.listdir(tmp_path):
            meta, cols, rows = sweep.read_csv(tmp_path / name)
            assert meta["n"] == "4" and meta["beta_b"] == "10" and meta["beta_e"] == "1"
            assert any(c.endswith("_pco") for c in cols) and any(c.endswith("_pso_ub") for c in cols)
            assert sweep.verify_file(tmp_path / name) == []

    def test_env_outdir(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "env"))
        code, _, _ = run(["reproduce", "2", "--no-mc"], capsys)
        assert code == 0
        names = sorted(os.listdir(tmp_path / "env"))
        assert names == ["fig2_beamforming_n2.csv", "fig2_beamforming_n4.csv", "fig2_beamforming_n8.csv"]

    def test_fig1_with_mc(self, tmp_path, capsys):
        code, _, _ = run(["reproduce", "1", "--outdir", str(tmp_path), "--trials", "200", "--seed", "3"], capsys)
        assert code == 0
        meta, cols, rows = sweep.read_csv(tmp_path / "fig1_sectoring_n4.csv")
        assert meta["seed"] == "3" and meta["trials"] == "200"
        assert "sectoring_mc_p_hat" in cols
        assert sweep.verify_file(tmp_path / "fig1_sectoring_n4.csv") == []

    def test_unknown_figure(self, capsys):
        code, _, _ = run(["reproduce", "7"], capsys)
        assert code == 2

    def test_job_layout(self):
        names = [job[0] for job in cli.reproduce_jobs(6)]
        assert len(names) == 6
        assert "fig6_sectoring_alpha3.csv" in names and "fig6_beamforming_alpha5.csv" in names


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "adhoc_secrecy", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith(cli.__version__)
