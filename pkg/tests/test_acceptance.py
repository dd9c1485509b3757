"""Acceptance gate: one test per release criterion.

Each test prints a single summary line so a full run reads as a
criterion-by-criterion checklist; thresholds are fixed here and must not
be loosened.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from nowcast.backtest import BacktestConfig, directional_accuracy, r_squared, run_backtest
from nowcast.extratrees import (
    ExtraTreesParams,
    RandomSplitSampler,
    fit,
    grow_tree,
    predict,
)
from nowcast.ingest import aggregate_claims_monthly, matched_panel_aggregate, read_claims_csv, read_employer_csv
from nowcast.synth import SynthConfig, generate, sinusoidal_amplitudes
from nowcast.timeseries import FeatureTable, MonthKey, MonthlySeries, align
from nowcast.transforms import (
    Approach,
    first_difference,
    invert_first_difference,
    invert_seasonal_difference,
    one_hot_month,
    seasonal_difference,
)

from reference_tree import RecordingSampler, Trace, assert_trees_equal, reference_grow
from test_ingest import DATA_DIR

BENCHMARK = SynthConfig(
    months=96,
    seed=7,
    trend_per_month=200.0,
    seasonal_amplitudes=sinusoidal_amplitudes(300.0),  # values within [-300, 300]
    noise_sd=25.0,
    n_features=6,
    feature_noise_sd=10.0,
)
BENCHMARK_MIN_TRAIN = 60

# peak-600 pattern whose month-over-month steps leave four months with a
# small negative expected change, the regime where the seasonal-difference
# approach's one-year-old anchor costs it directional calls
VARIANT_AMPLITUDES = (
    -600.0, -340.0, -600.0, -340.0, -600.0, -340.0,
    -80.0, 180.0, 440.0, 600.0, 340.0, -340.0,
)
VARIANT_SEEDS = (1, 2, 3, 4, 5)


def benchmark_table(config=BENCHMARK):
    result = generate(config)
    return align([result.target, *result.features]).with_target("target")


def run_benchmark(table, approach, seed, min_train=BENCHMARK_MIN_TRAIN, on_window=None):
    config = BacktestConfig(
        min_train_months=min_train,
        approach=Approach(approach),
        model_params=ExtraTreesParams(seed=seed),
    )
    return run_backtest(table, config, n_threads=1, on_window=on_window)


@pytest.fixture(scope="module")
def bench_table():
    return benchmark_table()


def announce(criterion, detail):
    print(f"\nACCEPTANCE {criterion}: PASS — {detail}")


class TestCriterion1SyntheticBenchmark:
    def test_benchmark_scores_and_runtime(self, bench_table):
        started = time.perf_counter()
        report_a = run_benchmark(bench_table, "A", BENCHMARK.seed)
        report_b = run_benchmark(bench_table, "B", BENCHMARK.seed)
        elapsed = time.perf_counter() - started
        assert report_a.r_squared_level >= 0.99
        assert report_b.directional_accuracy >= 0.95
        assert elapsed < 60.0
        announce(
            "1a",
            f"approach A r2_level={report_a.r_squared_level:.6f} (>=0.99), "
            f"approach B directional_accuracy={report_b.directional_accuracy:.4f} "
            f"(>=0.95), runtime {elapsed:.1f}s (<60s)",
        )

    def test_onehot_approach_leads_on_seasonal_variant(self):
        wins = 0
        details = []
        for seed in VARIANT_SEEDS:
            config = SynthConfig(
                months=96,
                seed=seed,
                trend_per_month=200.0,
                seasonal_amplitudes=VARIANT_AMPLITUDES,
                noise_sd=25.0,
                n_features=6,
                feature_noise_sd=10.0,
            )
            table = benchmark_table(config)
            da_a = run_benchmark(table, "A", seed).directional_accuracy
            da_b = run_benchmark(table, "B", seed).directional_accuracy
            wins += da_b >= da_a
            details.append(f"seed {seed}: B {da_b:.4f} vs A {da_a:.4f}")
        assert wins >= 4, details
        announce("1b", f"B >= A on {wins}/5 seeds ({'; '.join(details)})")


class TestCriterion2ShockBehavior:
    def test_shock_month_error_dwarfs_the_rest(self):
        shock_month = MonthKey(2018, 3)
        config = SynthConfig(
            months=96,
            seed=7,
            trend_per_month=200.0,
            seasonal_amplitudes=sinusoidal_amplitudes(300.0),
            noise_sd=25.0,
            n_features=6,
            feature_noise_sd=10.0,
            shock_month=shock_month,
            shock_size=-20.0 * 200.0,
        )
        report = run_benchmark(benchmark_table(config), "A", config.seed)
        errors = {r.month: abs(r.predicted_level - r.actual_level) for r in report.records}
        shock_error = errors.pop(shock_month)
        median_other = float(np.median(list(errors.values())))
        assert shock_error > 5.0 * median_other
        announce(
            "2",
            f"shock-month error {shock_error:.1f} vs 5x median other "
            f"{5 * median_other:.1f} (ratio {shock_error / median_other:.0f})",
        )


class TestCriterion3TransformRoundTrips:
    def test_thousand_random_round_trips(self):
        rng = np.random.default_rng(2024)
        started = time.perf_counter()
        worst = 0.0
        for i in range(1000):
            n = int(rng.integers(13, 241))
            scale = float(rng.choice([1.0, 100.0, 1000.0]))
            values = rng.uniform(-scale, scale, size=n)
            s = MonthlySeries(MonthKey(2000, 1), values, "s")

            d1 = first_difference(s)
            back = invert_first_difference(d1, float(values[0]), s.start)
            worst = max(worst, float(np.abs(back.values - values[1:]).max()))

            d12 = seasonal_difference(s)
            anchor = s.window(s.start, s.start.shift(11))
            back12 = invert_seasonal_difference(d12, anchor)
            worst = max(worst, float(np.abs(back12.values - values[12:]).max()))
        elapsed = time.perf_counter() - started
        assert worst <= 1e-9
        assert elapsed < 5.0
        announce(
            "3",
            f"1000 series round-tripped, worst error {worst:.2e} (<=1e-9), "
            f"{elapsed:.2f}s (<5s)",
        )


def oracle_fixture_datasets():
    """Small integer-valued datasets: <= 8 rows, <= 2 features."""
    rng = np.random.default_rng(404)
    datasets = []
    for n_rows in (2, 3, 4, 5, 6, 7, 8):
        for n_features in (1, 2):
            X = rng.integers(0, 10, size=(n_rows, n_features)).astype(float)
            y = rng.integers(-8, 9, size=n_rows).astype(float)
            datasets.append((X, y))
    # degenerate shapes: constant targets, a constant column, repeated values
    datasets.append((np.array([[1.0], [2.0], [3.0]]), np.array([4.0, 4.0, 4.0])))
    datasets.append(
        (np.column_stack([np.zeros(6), np.arange(6.0)]), rng.integers(0, 5, 6).astype(float))
    )
    datasets.append(
        (np.array([[1.0, 3.0]] * 4 + [[2.0, 3.0]] * 4), rng.integers(0, 9, 8).astype(float))
    )
    return datasets


class TestCriterion4OracleEquivalence:
    def test_every_fixture_matches_the_reference_builder(self):
        checked = 0
        for idx, (X, y) in enumerate(oracle_fixture_datasets()):
            for k in (1, X.shape[1]):
                for min_split in (2, 3):
                    rng = np.random.Generator(np.random.PCG64(9000 + idx * 7 + k + min_split))
                    recorder = RecordingSampler(RandomSplitSampler(rng))
                    tree = grow_tree(X, y, k, min_split, recorder)
                    trace = Trace(recorder.feature_draws, recorder.threshold_draws)
                    ref = reference_grow(X.tolist(), y.tolist(), min_split, trace)
                    assert_trees_equal(tree, ref)
                    assert trace.exhausted()
                    checked += 1
        announce("4", f"{checked} recorded-trace trees matched the reference node-for-node")


class TestCriterion5Memorization:
    def test_training_r_squared_at_least_point999(self):
        rng = np.random.default_rng(55)
        months = tuple(MonthKey(2015, 1).shift(i) for i in range(20))
        cols = {f"f{i}": rng.normal(size=20) for i in range(5)}
        cols["y"] = rng.normal(size=20)
        table = FeatureTable(months, cols, target="y")
        params = ExtraTreesParams(n_trees=200, min_samples_split=2, seed=55)
        model = fit(table, params, n_threads=1)
        score = r_squared(table.target_values(), predict(model, table))
        assert score >= 0.999
        announce("5", f"train R^2 = {score:.6f} (>=0.999) with 200 trees on 20 rows")


class TestCriterion6CliDeterminism:
    def test_reports_identical_across_threads_and_reruns(self, tmp_path):
        env_base = {**os.environ, "PYTHONHASHSEED": "0"}
        data_dir = tmp_path / "data"
        subprocess.run(
            [
                sys.executable, "-m", "nowcast", "synth",
                "--months", "48", "--seed", "11", "--out-dir", str(data_dir),
                "--n-features", "3",
            ],
            check=True, env=env_base, capture_output=True,
        )
        reports = []
        for run_id, threads in enumerate(["1", "8", "1", "8"]):
            out_dir = tmp_path / f"run{run_id}"
            cmd = [
                sys.executable, "-m", "nowcast", "backtest",
                "--target", str(data_dir / "target.csv"),
                "--features",
                str(data_dir / "feature_01.csv"),
                str(data_dir / "feature_02.csv"),
                str(data_dir / "feature_03.csv"),
                "--approach", "A", "--min-train", "30", "--seed", "11",
                "--out", str(out_dir),
            ]
            subprocess.run(
                cmd, check=True, env={**env_base, "NOWCAST_THREADS": threads},
                capture_output=True,
            )
            reports.append((out_dir / "report.json").read_bytes())
        assert all(r == reports[0] for r in reports[1:])
        announce("6", "4 CLI runs (threads 1/8, twice each) produced byte-identical report.json")


class TestCriterion7NoLookahead:
    def test_every_window_trains_strictly_before_its_month(self, bench_table):
        violations = 0
        windows = 0

        def hook(test_month, train_months):
            nonlocal violations, windows
            windows += 1
            if max(train_months) >= test_month:
                violations += 1

        for approach in ("A", "B"):
            run_benchmark(bench_table, approach, BENCHMARK.seed, on_window=hook)
        assert windows == 2 * (BENCHMARK.months - BENCHMARK_MIN_TRAIN)
        assert violations == 0
        announce("7", f"{windows} windows instrumented, 0 lookahead violations")


class TestCriterion8MetricUnits:
    def test_r_squared_hand_value(self):
        assert r_squared([1, 2, 3], [1, 2, 4]) == 0.5
        announce("8a", "r_squared([1,2,3],[1,2,4]) == 0.5 exactly")

    def test_directional_accuracy_hand_value(self):
        prior = [0.0, 0.0, 0.0, 0.0]
        predicted = [1.0, -2.0, 3.0, 0.0]
        actual = [2.0, -1.0, -3.0, 0.0]  # signs: match, match, miss, match
        assert directional_accuracy(predicted, actual, prior) == 0.75
        announce("8b", "hand-counted 3-of-4 directional case == 0.75 exactly")

    def test_one_hot_every_month(self):
        for m in range(1, 13):
            v = one_hot_month(MonthKey(2020, m)).components
            assert sum(v) == 1
            assert v[m - 1] == 1
        announce("8c", "all 12 one-hot encodings sum to 1 with the 1 at the right index")


class TestCriterion9IngestAggregation:
    def test_matched_panel_fixture(self):
        series = matched_panel_aggregate(read_employer_csv(DATA_DIR / "employer_panel.csv"))
        assert series.months() == (MonthKey(2021, 2),)
        assert series.values[0] == 2.0
        announce("9a", "matched-panel fixture reproduces +2 for 2021-02")

    def test_claims_fixture(self):
        initial, continued = aggregate_claims_monthly(
            read_claims_csv(DATA_DIR / "claims_jan2017.csv")
        )
        assert initial.value_at(MonthKey(2017, 1)) == 800000.0
        assert continued.value_at(MonthKey(2017, 1)) == 1700000.0
        announce("9b", "claims fixture reproduces 800000 summed / 1700000 averaged")
