import csv
import json
from pathlib import Path

import numpy as np
import pytest

from sssbsim.cli import main, parse_r_spec
from sssbsim.tables import read_summary_csv, write_summary_csv
from sssbsim.trajectory import EnsembleStats


def read_bytes(path):
    return Path(path).read_bytes()


class TestRSpec:
    def test_grid(self):
        vals = parse_r_spec("0.3:0.7:0.02")
        assert len(vals) == 21
        assert vals[0] == 0.3 and vals[-1] == 0.7

    def test_list(self):
        assert parse_r_spec("0.3,0.51,0.7") == [0.3, 0.51, 0.7]

    def test_single(self):
        assert parse_r_spec("0.5") == [0.5]

    def test_bad(self):
        with pytest.raises(ValueError):
            parse_r_spec("0.7:0.3:0.1")


class TestRun:
    def test_summary_row_count(self, tmp_path, warm_kernel):
        out = tmp_path / "a"
        rc = main(
            [
                "run", "--model", "square-zz", "--L", "6", "--r", "0.3:0.7:0.02",
                "--samples", "10", "--seed", "7", "--out", str(out), "--no-plot",
            ]
        )
        assert rc == 0
        with open(out / "summary.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 21
        with open(out / "samples.csv", newline="") as fh:
            assert len(list(csv.DictReader(fh))) == 210

    def test_byte_identical_rerun(self, tmp_path, warm_kernel):
        args = [
            "run", "--model", "square-zz", "--L", "6", "--r", "0.4,0.6",
            "--samples", "15", "--seed", "3", "--no-plot",
        ]
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("samples.csv", "summary.csv"):
            assert read_bytes(out1 / name) == read_bytes(out2 / name)

    def test_manifest_round_trip(self, tmp_path, warm_kernel):
        out1, out2 = tmp_path / "m1", tmp_path / "m2"
        assert main(
            [
                "run", "--model", "chain-zz", "--L", "16", "--r", "0.5,0.9",
                "--samples", "12", "--seed", "5", "--out", str(out1), "--no-plot",
            ]
        ) == 0
        assert main(
            ["run", "--from-manifest", str(out1 / "manifest.json"), "--out", str(out2),
             "--no-plot"]
        ) == 0
        for name in ("samples.csv", "summary.csv"):
            assert read_bytes(out1 / name) == read_bytes(out2 / name)

    def test_chain_maximal_chi(self, tmp_path, warm_kernel):
        out = tmp_path / "c"
        assert main(
            ["run", "--model", "chain-zz", "--L", "64", "--r", "1.0",
             "--samples", "2", "--seed", "1", "--out", str(out), "--no-plot"]
        ) == 0
        table = read_summary_csv(out / "summary.csv")
        assert table["chi_mean"][0] == 64.0

    def test_single_sample_run(self, tmp_path, warm_kernel):
        out = tmp_path / "one"
        assert main(
            ["run", "--model", "chain-zz", "--L", "64", "--r", "1.0",
             "--samples", "1", "--seed", "1", "--out", str(out), "--no-plot"]
        ) == 0
        table = read_summary_csv(out / "summary.csv")
        assert table["chi_mean"][0] == 64.0 and table["F"][0] == 0.0

    def test_config_file(self, tmp_path, warm_kernel):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "model=square-zz\nL=6\nr=0.5\nsamples=8\nseed=2\nplot=false\n"
            f"out={tmp_path/'cfgout'}\n# comment line\n"
        )
        assert main(["run", "--config", str(cfg)]) == 0
        assert (tmp_path / "cfgout" / "summary.csv").exists()

    def test_flag_overrides_config(self, tmp_path, warm_kernel):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model=square-zz\nL=6\nr=0.5\nsamples=8\nseed=2\nplot=false\n")
        out = tmp_path / "o"
        assert main(["run", "--config", str(cfg), "--samples", "4",
                     "--out", str(out), "--no-plot"]) == 0
        with open(out / "samples.csv", newline="") as fh:
            assert len(list(csv.DictReader(fh))) == 4

    def test_plot_rendered_by_default(self, tmp_path, warm_kernel):
        out = tmp_path / "p"
        assert main(["run", "--model", "chain-zz", "--L", "8", "--r", "0.5",
                     "--samples", "5", "--seed", "1", "--out", str(out)]) == 0
        assert (out / "summary.png").exists()

    def test_unknown_model_exit_2(self, tmp_path):
        assert main(["run", "--model", "kagome", "--L", "4", "--out", str(tmp_path)]) == 2

    def test_toric_run_exit_2(self, tmp_path):
        assert main(["run", "--model", "toric-x", "--L", "4", "--out", str(tmp_path)]) == 2

    def test_unwritable_out_exit_3(self, warm_kernel):
        assert main(
            ["run", "--model", "chain-zz", "--L", "8", "--r", "0.5", "--samples", "3",
             "--seed", "1", "--out", "/dev/null/nope", "--no-plot"]
        ) == 3

    def test_outdir_env_default(self, tmp_path, warm_kernel, monkeypatch):
        monkeypatch.setenv("SSSBSIM_OUTDIR", str(tmp_path / "envout"))
        assert main(["run", "--model", "chain-zz", "--L", "8", "--r", "0.5",
                     "--samples", "3", "--seed", "1", "--no-plot"]) == 0
        assert (tmp_path / "envout" / "summary.csv").exists()


class TestCorr:
    def test_all_zero_at_r0_and_all_one_at_r1(self, tmp_path, warm_kernel):
        out = tmp_path / "corr"
        assert main(
            ["corr", "--model", "square-zz", "--L", "8", "--r", "0,1",
             "--samples", "5", "--seed", "3", "--out", str(out), "--no-plot"]
        ) == 0
        from sssbsim.tables import read_corr_csv

        _, mean0, _ = read_corr_csv(out / "corr_r0.csv")
        _, mean1, _ = read_corr_csv(out / "corr_r1.csv")
        assert np.all(mean0 == 0.0) and np.all(mean1 == 1.0)

    def test_toric_profile(self, tmp_path, warm_kernel):
        out = tmp_path / "tor"
        assert main(
            ["corr", "--model", "toric-x", "--L", "6", "--r", "1.0",
             "--samples", "4", "--seed", "3", "--out", str(out), "--no-plot"]
        ) == 0
        from sssbsim.tables import read_corr_csv

        _, mean, _ = read_corr_csv(out / "corr_r1.csv")
        assert np.all(mean == 1.0)


class TestFss:
    @staticmethod
    def _synthetic_summary(path):
        rng = np.random.default_rng(12)
        stats = []
        for L in (16, 24, 32):
            V = float(L * L)
            for r in np.arange(0.35, 0.66, 0.03):
                u = (r - 0.5) * V ** (1 / 3.0)
                f = V ** (2.3 / 3.0) * float(np.exp(-u * u))
                df = 0.02 * V ** (2.3 / 3.0) + 0.02 * f
                stats.append(
                    EnsembleStats(
                        model="square-zz", Lx=L, Ly=L, r=float(r), n_samples=100,
                        chi_mean=0.0, chi_var=f * V,
                        F=f + df * float(rng.standard_normal()), F_stderr=df,
                    )
                )
        write_summary_csv(path, stats)

    def test_fit_outputs(self, tmp_path):
        summary = tmp_path / "summary.csv"
        self._synthetic_summary(summary)
        out = tmp_path / "fss"
        rc = main(["fss", "--summary", str(summary), "--out", str(out),
                   "--bootstrap", "100", "--no-plot"])
        assert rc == 0
        fit = json.loads((out / "fit.json").read_text())
        assert abs(fit["r_c"] - 0.5) < 0.02
        assert "linear_size_exponents" in fit
        assert (out / "collapsed.csv").exists()

    def test_single_size_exit_2(self, tmp_path):
        stats = [
            EnsembleStats("square-zz", 16, 16, r, 10, 1.0, 1.0, f, 0.1)
            for r, f in [(0.4, 1.0), (0.5, 2.0), (0.6, 1.0)]
        ]
        summary = tmp_path / "one.csv"
        write_summary_csv(summary, stats)
        assert main(["fss", "--summary", str(summary), "--out", str(tmp_path / "x"),
                     "--no-plot"]) == 2


class TestOracleCheckAndDemo:
    def test_oracle_check_passes(self, tmp_path, capsys):
        rc = main(["oracle-check", "--trajectories", "5", "--samples", "3",
                   "--out", str(tmp_path)])
        assert rc == 0
        rep = json.loads((tmp_path / "oracle_report.json").read_text())
        assert rep["passed"]
        names = {c["name"] for c in rep["checks"]}
        assert names == {"dense_equivalence", "percolation_equivalence",
                         "recorded_vs_unrecorded"}

    def test_demo_maximal_chain(self, capsys):
        assert main(["demo-maximal", "--model", "chain-zz", "--L", "8"]) == 0
        text = capsys.readouterr().out
        assert "+X0X1X2X3X4X5X6X7" in text
        assert "C_II = 1" in text and "C_I = +0" in text

    def test_demo_maximal_cluster_even(self, capsys):
        assert main(["demo-maximal", "--model", "cluster1d-even", "--L", "8"]) == 0
        text = capsys.readouterr().out
        assert "Z1 Z3" in text and "Z0 Z2" in text

    def test_demo_maximal_lieb(self, capsys):
        assert main(["demo-maximal", "--model", "lieb", "--L", "3"]) == 0
        text = capsys.readouterr().out
        assert "C_II = 1" in text
