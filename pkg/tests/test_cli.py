import json

import pytest

from nowcast.cli import main

CLEAN_CLAIMS = """week_ending,initial_claims,continued_claims
2017-01-07,200000,1700000
2017-01-14,210000,1700000
"""


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidateCommand:
    def test_clean_file_exits_zero(self, tmp_path, capsys):
        path = tmp_path / "claims.csv"
        path.write_text(CLEAN_CLAIMS)
        code, out, _ = run(["validate", str(path), "--schema", "claims"], capsys)
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_defective_file_exits_one_with_findings(self, tmp_path, capsys):
        path = tmp_path / "claims.csv"
        path.write_text(CLEAN_CLAIMS.replace("210000", ""))
        code, out, _ = run(["validate", str(path), "--schema", "claims"], capsys)
        assert code == 1
        doc = json.loads(out)
        assert doc["passed"] is False and doc["findings"]

    def test_missing_file_exits_two(self, tmp_path, capsys):
        code, _, err = run(
            ["validate", str(tmp_path / "nope.csv"), "--schema", "claims"], capsys
        )
        assert code == 2
        assert "error" in err


def synth_args(out_dir, months=48, seed=3, extra=()):
    return [
        "synth",
        "--months",
        str(months),
        "--seed",
        str(seed),
        "--out-dir",
        str(out_dir),
        *extra,
    ]


class TestSynthCommand:
    def test_writes_expected_files(self, tmp_path, capsys):
        code, _, _ = run(synth_args(tmp_path / "d", extra=["--n-features", "3"]), capsys)
        assert code == 0
        names = sorted(p.name for p in (tmp_path / "d").iterdir())
        assert names == [
            "feature_01.csv",
            "feature_02.csv",
            "feature_03.csv",
            "target.csv",
            "truth.json",
        ]
        truth = json.loads((tmp_path / "d" / "truth.json").read_text())
        assert truth["schema_version"] == 1

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        run(synth_args(tmp_path / "a"), capsys)
        run(synth_args(tmp_path / "b"), capsys)
        for name in ["target.csv", "truth.json", "feature_01.csv"]:
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_below_minimum_months_exits_one(self, tmp_path, capsys):
        code, _, err = run(synth_args(tmp_path / "d", months=12), capsys)
        assert code == 1
        assert "36" in err


@pytest.fixture()
def synth_dir(tmp_path, capsys):
    out = tmp_path / "data"
    assert main(synth_args(out, months=48, seed=3, extra=["--n-features", "2"])) == 0
    capsys.readouterr()
    return out


def backtest_args(synth_dir, out_dir, approach="B", min_train="30", extra=()):
    return [
        "backtest",
        "--target",
        str(synth_dir / "target.csv"),
        "--features",
        str(synth_dir / "feature_01.csv"),
        str(synth_dir / "feature_02.csv"),
        "--approach",
        approach,
        "--min-train",
        min_train,
        "--seed",
        "3",
        "--out",
        str(out_dir),
        "--n-trees",
        "20",
        *extra,
    ]


class TestBacktestCommand:
    def test_writes_report_files(self, synth_dir, tmp_path, capsys):
        out = tmp_path / "run"
        code, stdout, _ = run(backtest_args(synth_dir, out), capsys)
        assert code == 0
        doc = json.loads((out / "report.json").read_text())
        assert doc["schema_version"] == 1
        assert "r_squared_level" in doc["metrics"]
        assert "directional_accuracy" in doc["metrics"]
        assert (out / "predictions.csv").exists()
        plot_header = (out / "plot.csv").read_text().splitlines()[0]
        assert plot_header == "month,actual_level,predicted_level"
        assert "r_squared_level" in stdout

    def test_both_approaches_run(self, synth_dir, tmp_path, capsys):
        for approach in ["A", "B"]:
            out = tmp_path / approach
            code, _, _ = run(
                backtest_args(synth_dir, out, approach=approach), capsys
            )
            assert code == 0
            assert (out / "report.json").exists()

    def test_min_train_beyond_span_exits_one(self, synth_dir, tmp_path, capsys):
        code, _, err = run(
            backtest_args(synth_dir, tmp_path / "x", min_train="48"), capsys
        )
        assert code == 1
        assert "min_train_months + 1" in err

    def test_disjoint_inputs_exit_one(self, synth_dir, tmp_path, capsys):
        # a feature series that shares no months with the target
        (tmp_path / "far.csv").write_text(
            "month,value\n" + "\n".join(f"2000-{m:02d},1.0" for m in range(1, 13)) + "\n"
        )
        args = [
            "backtest",
            "--target",
            str(synth_dir / "target.csv"),
            "--features",
            str(tmp_path / "far.csv"),
            "--approach",
            "B",
            "--min-train",
            "30",
            "--seed",
            "3",
            "--out",
            str(tmp_path / "y"),
        ]
        code, _, err = run(args, capsys)
        assert code == 1
        assert "common months" in err

    def test_thread_env_does_not_change_report(self, synth_dir, tmp_path, capsys, monkeypatch):
        outputs = []
        for threads in ["1", "4"]:
            monkeypatch.setenv("NOWCAST_THREADS", threads)
            out = tmp_path / f"t{threads}"
            assert run(backtest_args(synth_dir, out), capsys)[0] == 0
            outputs.append((out / "report.json").read_bytes())
        assert outputs[0] == outputs[1]
