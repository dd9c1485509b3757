"""Expanding-window walk-forward evaluation.

Each test month gets a fresh model trained on everything strictly before
it; the transformed one-month-ahead prediction is turned back into a level
using actual history as anchors, and the whole run is scored with
R-squared (level and transformed scale) plus directional accuracy.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateActualsError,
    InvalidParamsError,
    LengthMismatchError,
    TooShortError,
)
from .extratrees import ExtraTreesParams, fit, predict
from .timeseries import FeatureTable, MonthKey
from .transforms import Approach, apply_pipeline, reconstruct_level, required_history

REPORT_SCHEMA_VERSION = 1

MIN_TRAIN_FLOOR = {Approach.SEASONAL_DIFF: 24, Approach.MONTH_ONEHOT: 13}


def r_squared(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Coefficient of determination: 1 - SS_res / SS_tot.

    ``actual`` must vary; a constant actual sequence has no variance to
    explain and raises :class:`DegenerateActualsError`.
    """
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != p.shape:
        raise LengthMismatchError(f"length mismatch: {a.shape} vs {p.shape}")
    ss_tot = float(np.sum((a - a.mean()) ** 2)) if a.size else 0.0
    if ss_tot == 0.0:
        raise DegenerateActualsError("actual values have zero variance")
    ss_res = float(np.sum((a - p) ** 2))
    return 1.0 - ss_res / ss_tot


def directional_accuracy(
    predicted_levels: Sequence[float],
    actual_levels: Sequence[float],
    prior_actual_levels: Sequence[float],
) -> float:
    """Fraction of months whose predicted change has the realized sign.

    Signs are three-valued (-, 0, +) against the prior month's actual
    level, so a correctly predicted "no change" counts as a match.
    """
    p = np.asarray(predicted_levels, dtype=np.float64)
    a = np.asarray(actual_levels, dtype=np.float64)
    prior = np.asarray(prior_actual_levels, dtype=np.float64)
    if not (p.shape == a.shape == prior.shape):
        raise LengthMismatchError(
            f"length mismatch: {p.shape}, {a.shape}, {prior.shape}"
        )
    if p.size == 0:
        raise ValueError("directional accuracy needs at least one record")
    return float(np.mean(np.sign(p - prior) == np.sign(a - prior)))


@dataclass(frozen=True)
class BacktestConfig:
    """Walk-forward settings; the horizon is fixed at one month."""

    min_train_months: int
    approach: Approach
    model_params: ExtraTreesParams
    horizon_months: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "approach", Approach(self.approach))
        if self.horizon_months != 1:
            raise InvalidParamsError("only a one-month horizon is supported")
        floor = MIN_TRAIN_FLOOR[self.approach]
        if self.min_train_months < floor:
            raise InvalidParamsError(
                f"approach {self.approach.value} needs min_train_months >= {floor}, "
                f"got {self.min_train_months}"
            )

    def to_dict(self) -> dict:
        return {
            "min_train_months": self.min_train_months,
            "horizon_months": self.horizon_months,
            "approach": self.approach.value,
            "model_params": {
                "n_trees": self.model_params.n_trees,
                "k_features": self.model_params.k_features,
                "min_samples_split": self.model_params.min_samples_split,
                "seed": self.model_params.seed,
            },
        }


@dataclass(frozen=True)
class PredictionRecord:
    """One test month's forecast on both scales."""

    month: MonthKey
    predicted_transformed: float
    actual_transformed: float
    predicted_level: float
    actual_level: float
    train_rows_used: int


CSV_COLUMNS = (
    "month",
    "predicted_level",
    "actual_level",
    "predicted_transformed",
    "actual_transformed",
    "train_rows_used",
)


@dataclass(frozen=True)
class BacktestReport:
    """All per-month records plus summary metrics and the config echo."""

    records: tuple[PredictionRecord, ...]
    r_squared_level: float
    directional_accuracy: float
    r_squared_transformed: float
    config: BacktestConfig

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "metrics": {
                "r_squared_level": self.r_squared_level,
                "directional_accuracy": self.directional_accuracy,
                "r_squared_transformed": self.r_squared_transformed,
            },
            "predictions": [
                {
                    "month": str(r.month),
                    "predicted_transformed": r.predicted_transformed,
                    "actual_transformed": r.actual_transformed,
                    "predicted_level": r.predicted_level,
                    "actual_level": r.actual_level,
                    "train_rows_used": r.train_rows_used,
                }
                for r in self.records
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def write_csv(self, path) -> None:
        """Flat per-month records."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in self.records:
                writer.writerow(
                    [
                        str(r.month),
                        r.predicted_level,
                        r.actual_level,
                        r.predicted_transformed,
                        r.actual_transformed,
                        r.train_rows_used,
                    ]
                )

    def write_plot_csv(self, path) -> None:
        """Plot-ready actual-vs-predicted levels by month."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["month", "actual_level", "predicted_level"])
            for r in self.records:
                writer.writerow([str(r.month), r.actual_level, r.predicted_level])


WindowHook = Callable[[MonthKey, tuple[MonthKey, ...]], None]


def run_backtest(
    table: FeatureTable,
    config: BacktestConfig,
    n_threads: int | None = None,
    on_window: WindowHook | None = None,
) -> BacktestReport:
    """Walk forward through ``table``, one test month at a time.

    ``table`` holds level-scale columns with the target set and an empty
    ledger. For each test month the training set is rebuilt from all months
    strictly before it, transformed per the configured approach, and a
    fresh model is fitted; windows therefore expand by one row per step and
    nothing from the test month or later ever reaches the model.

    ``on_window`` (when given) is called with the test month and the tuple
    of training months before each fit, which is how the no-lookahead
    property is instrumented in tests.
    """
    if table.target is None:
        raise ValueError("run_backtest requires the table's target to be set")
    if not table.ledger.is_empty:
        raise ValueError("run_backtest expects a level-scale table (empty ledger)")
    n = len(table)
    if n < config.min_train_months + 1:
        raise TooShortError(
            f"table spans {n} months; need at least min_train_months + 1 = "
            f"{config.min_train_months + 1}"
        )

    months = table.months
    target_levels = table.target_values()
    records: list[PredictionRecord] = []
    for t in range(config.min_train_months, n):
        window = table.slice(months[0], months[t])
        transformed = apply_pipeline(window, config.approach)
        train = transformed.slice(transformed.months[0], transformed.months[-2])
        test_row = transformed.slice(transformed.months[-1], transformed.months[-1])

        if on_window is not None:
            on_window(months[t], train.months)
        assert train.months[-1] < months[t]  # no lookahead, by construction

        model = fit(train, config.model_params, n_threads=n_threads)
        predicted_transformed = float(predict(model, test_row)[0])
        actual_transformed = float(transformed.target_values()[-1])

        history = table.target_series().window(
            months[t - required_history(transformed.ledger)], months[t - 1]
        )
        predicted_level = reconstruct_level(
            transformed.ledger, predicted_transformed, history, months[t]
        )
        records.append(
            PredictionRecord(
                month=months[t],
                predicted_transformed=predicted_transformed,
                actual_transformed=actual_transformed,
                predicted_level=predicted_level,
                actual_level=float(target_levels[t]),
                train_rows_used=len(train),
            )
        )

    predicted_levels = [r.predicted_level for r in records]
    actual_levels = [r.actual_level for r in records]
    prior_actuals = [float(target_levels[(r.month - months[0]) - 1]) for r in records]
    return BacktestReport(
        records=tuple(records),
        r_squared_level=r_squared(actual_levels, predicted_levels),
        directional_accuracy=directional_accuracy(
            predicted_levels, actual_levels, prior_actuals
        ),
        r_squared_transformed=r_squared(
            [r.actual_transformed for r in records],
            [r.predicted_transformed for r in records],
        ),
        config=config,
    )
