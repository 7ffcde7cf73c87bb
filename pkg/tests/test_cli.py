"""Command-line interface contracts: flags, exit codes, file outputs."""

import csv
import json

import numpy as np
import pytest

from adashrink.cli import main
from adashrink.signals import read_signal


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _data_lines(path):
    return [l for l in path.read_text().splitlines() if l and not l.startswith("#")]


class TestSynth:
    def test_writes_signal_and_truth(self, tmp_path, capsys):
        out = tmp_path / "sig.txt"
        code, _, _ = _run(
            capsys,
            "synth", "--kind", "heavisine", "--n", "1024",
            "--sigma2", "1", "--snr", "7", "--seed", "1", "--out", str(out),
        )
        assert code == 0
        truth = tmp_path / "sig.txt.truth"
        assert len(_data_lines(out)) == 1024
        assert len(_data_lines(truth)) == 1024
        assert np.std(read_signal(truth)) == pytest.approx(7.0, abs=1e-12)

    def test_zero_variance_matches_truth(self, tmp_path, capsys):
        out = tmp_path / "sig.txt"
        code, _, _ = _run(
            capsys,
            "synth", "--kind", "trig", "--n", "500", "--sigma2", "0",
            "--seed", "3", "--out", str(out),
        )
        assert code == 0
        np.testing.assert_array_equal(
            read_signal(out), read_signal(tmp_path / "sig.txt.truth")
        )

    def test_repeat_runs_byte_identical(self, tmp_path, capsys):
        args = [
            "synth", "--kind", "blocks", "--n", "256", "--sigma2", "2",
            "--snr", "7", "--seed", "5",
        ]
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert _run(capsys, *args, "--out", str(a))[0] == 0
        assert _run(capsys, *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_header_echoes_config(self, tmp_path, capsys):
        out = tmp_path / "sig.txt"
        _run(capsys, "synth", "--kind", "trig", "--n", "500", "--out", str(out))
        text = out.read_text()
        for token in ("kind=trig", "n=500", "seed=0", "role=noisy"):
            assert f"# {token}" in text or f"{token}" in text

    def test_invalid_n_is_data_error(self, tmp_path, capsys):
        code, _, err = _run(
            capsys, "synth", "--kind", "trig", "--n", "11",
            "--out", str(tmp_path / "x.txt"),
        )
        assert code == 3
        assert "error" in err


class TestDenoise:
    def _synth(self, capsys, tmp_path, kind, n, sigma2, seed=1, snr=None):
        out = tmp_path / f"{kind}{n}.txt"
        argv = [
            "synth", "--kind", kind, "--n", str(n), "--sigma2", str(sigma2),
            "--seed", str(seed), "--out", str(out),
        ]
        if snr is not None:
            argv += ["--snr", str(snr)]
        assert _run(capsys, *argv)[0] == 0
        return out

    def test_noiseless_input_passes_through(self, tmp_path, capsys):
        src = self._synth(capsys, tmp_path, "trig", 500, 0)
        out = tmp_path / "den.txt"
        code, stdout, _ = _run(
            capsys,
            "denoise", "--in", str(src), "--transform", "trig", "--method", "lst",
            "--noise", "known:1.0", "--out", str(out), "--no-figures",
        )
        assert code == 0
        np.testing.assert_allclose(read_signal(out), read_signal(src), atol=1e-8)
        payload = json.loads(stdout)
        assert payload["selected_k"] == 4
        assert payload["sigma2_hat"] == 1.0

    def test_adaptive_selects_sparser_than_plain(self, tmp_path, capsys):
        """The adaptive criterion picks fewer surviving components than the
        plain one on a majority of noisy heavisine draws."""
        wins = 0
        for seed in range(20):
            src = self._synth(capsys, tmp_path, "heavisine", 1024, 1.0, seed=seed, snr=7)
            picks = {}
            for method in ("adaptive", "lst"):
                out = tmp_path / f"d{seed}{method}.txt"
                code, stdout, _ = _run(
                    capsys,
                    "denoise", "--in", str(src), "--transform", "dwt",
                    "--method", method, "--noise", "mad",
                    "--out", str(out), "--no-figures",
                )
                assert code == 0
                picks[method] = json.loads(stdout)["selected_k"]
            wins += picks["adaptive"] < picks["lst"]
        assert wins > 10

    def test_non_dyadic_length_is_data_error(self, tmp_path, capsys):
        src = tmp_path / "bad.txt"
        src.write_text("\n".join(str(float(i)) for i in range(1000)) + "\n")
        code, _, err = _run(
            capsys,
            "denoise", "--in", str(src), "--transform", "dwt", "--method", "lst",
            "--noise", "mad", "--out", str(tmp_path / "o.txt"), "--no-figures",
        )
        assert code == 3
        assert "power-of-two" in err

    def test_missing_input_is_data_error(self, tmp_path, capsys):
        code, _, _ = _run(
            capsys,
            "denoise", "--in", str(tmp_path / "nope.txt"), "--transform", "dwt",
            "--method", "lst", "--noise", "mad",
            "--out", str(tmp_path / "o.txt"), "--no-figures",
        )
        assert code == 3

    def test_mad_with_trig_is_usage_error(self, tmp_path, capsys):
        src = self._synth(capsys, tmp_path, "trig", 500, 1.0)
        with pytest.raises(SystemExit) as exc:
            main([
                "denoise", "--in", str(src), "--transform", "trig",
                "--method", "lst", "--noise", "mad",
                "--out", str(tmp_path / "o.txt"),
            ])
        assert exc.value.code == 2

    def test_unknown_flag_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["denoise", "--frobnicate", "1"])
        assert exc.value.code == 2

    def test_universal_method_and_figure(self, tmp_path, capsys):
        src = self._synth(capsys, tmp_path, "heavisine", 256, 1.0, snr=7)
        out = tmp_path / "u.txt"
        code, stdout, _ = _run(
            capsys,
            "denoise", "--in", str(src), "--transform", "dwt",
            "--method", "universal", "--noise", "mad", "--out", str(out),
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["threshold"] == pytest.approx(
            np.sqrt(2 * payload["sigma2_hat"] * np.log(256))
        )
        assert (tmp_path / "u.png").stat().st_size > 0

    def test_exempt_approx_keeps_coarse_block(self, tmp_path, capsys):
        src = self._synth(capsys, tmp_path, "blocks", 256, 1.0, snr=7)
        out = tmp_path / "e.txt"
        code, stdout, _ = _run(
            capsys,
            "denoise", "--in", str(src), "--transform", "dwt",
            "--method", "lst", "--noise", "mad", "--exempt-approx",
            "--out", str(out), "--no-figures",
        )
        assert code == 0
        assert json.loads(stdout)["exempt_approx"] is True


class TestExperiment:
    def test_writes_csvs_and_config(self, tmp_path, capsys):
        code, stdout, _ = _run(
            capsys,
            "experiment", "trig-table1", "--reps", "3",
            "--out-dir", str(tmp_path), "--no-figures",
        )
        assert code == 0
        curves = tmp_path / "trig-table1-curves.csv"
        selection = tmp_path / "trig-table1-selection.csv"
        config = tmp_path / "trig-table1-config.json"
        assert curves.exists() and selection.exists() and config.exists()
        with open(curves, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == list(
            ("method", "k", "mean_criterion", "sd_criterion", "mean_loss", "sd_loss")
        )
        assert len(rows) == 1 + 3 * 51
        payload = json.loads(config.read_text())
        assert payload["base_seed"] == 0  # default seed documented as 0
        assert payload["reps"] == 3

    def test_single_rep_runs(self, tmp_path, capsys):
        code, _, _ = _run(
            capsys,
            "experiment", "wavelet-heavisine", "--reps", "1",
            "--out-dir", str(tmp_path), "--no-figures",
        )
        assert code == 0

    def test_figures_rendered(self, tmp_path, capsys):
        code, _, _ = _run(
            capsys,
            "experiment", "wavelet-blocks", "--reps", "2", "--out-dir", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "wavelet-blocks-risk.png").stat().st_size > 0
        assert (tmp_path / "wavelet-blocks-selection.png").stat().st_size > 0

    def test_repeat_runs_byte_identical(self, tmp_path, capsys):
        for sub in ("a", "b"):
            code, _, _ = _run(
                capsys,
                "experiment", "trig-table1", "--reps", "4", "--seed", "2",
                "--out-dir", str(tmp_path / sub), "--no-figures",
            )
            assert code == 0
        for name in ("trig-table1-curves.csv", "trig-table1-selection.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_unknown_name_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "nope", "--out-dir", str(tmp_path)])
        assert exc.value.code == 2


class TestRiskCurve:
    def test_writes_curve_csv(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        code, stdout, _ = _run(
            capsys,
            "risk-curve", "--kind", "trig", "--method", "adaptive",
            "--reps", "5", "--out", str(out), "--no-figures",
        )
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 51
        assert "\"noise_method\": \"residual-regression\"" in stdout

    def test_workers_flag_preserves_results(self, tmp_path, capsys):
        outs = []
        for sub, workers in (("w1", "1"), ("w2", "2")):
            out = tmp_path / f"{sub}.csv"
            code, _, _ = _run(
                capsys,
                "risk-curve", "--kind", "trig", "--method", "lst",
                "--reps", "6", "--seed", "4", "--workers", workers,
                "--out", str(out), "--no-figures",
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestVerify:
    def test_quick_suite_passes(self, capsys, tmp_path):
        report_path = tmp_path / "report.json"
        code, stdout, _ = _run(
            capsys, "verify", "--seed", "0", "--quick", "--json", str(report_path)
        )
        assert code == 0
        assert "[PASS]" in stdout and "[FAIL]" not in stdout
        payload = json.loads(report_path.read_text())
        assert payload["all_passed"] is True

    def test_quick_suite_detects_biased_convention(self, capsys):
        code, stdout, _ = _run(
            capsys, "verify", "--seed", "0", "--quick",
            "--df-convention", "paper-literal",
        )
        assert code == 1
        assert "[FAIL] sure-unbiasedness-lst" in stdout

    def test_report_bytes_deterministic(self, capsys, tmp_path):
        paths = []
        for name in ("r1.json", "r2.json"):
            path = tmp_path / name
            code, _, _ = _run(
                capsys, "verify", "--seed", "3", "--quick", "--json", str(path)
            )
            assert code == 0
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]
