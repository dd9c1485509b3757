"""Payroll-employment nowcasting toolkit.

Monthly-series containers, differencing transforms with exact inverses,
a from-scratch extremely randomized trees regressor, and an
expanding-window backtest harness, plus CSV ingestion and a synthetic
benchmark generator.
"""

from .backtest import (
    BacktestConfig,
    BacktestReport,
    PredictionRecord,
    directional_accuracy,
    r_squared,
    run_backtest,
)
from .errors import NowcastError
from .extratrees import (
    ExtraTreesModel,
    ExtraTreesParams,
    feature_importances,
    fit,
    predict,
)
from .ledger import FirstDifference, MonthOneHot, SeasonalDifference, TransformLedger
from .synth import SynthConfig, SynthResult, generate, sinusoidal_amplitudes
from .timeseries import FeatureTable, MonthKey, MonthlySeries, align
from .transforms import (
    Approach,
    OneHotVector,
    apply_pipeline,
    first_difference,
    invert_first_difference,
    invert_seasonal_difference,
    one_hot_month,
    reconstruct_level,
    seasonal_difference,
)

__all__ = [
    "Approach",
    "BacktestConfig",
    "BacktestReport",
    "ExtraTreesModel",
    "ExtraTreesParams",
    "FeatureTable",
    "FirstDifference",
    "MonthKey",
    "MonthOneHot",
    "MonthlySeries",
    "NowcastError",
    "OneHotVector",
    "PredictionRecord",
    "SeasonalDifference",
    "SynthConfig",
    "SynthResult",
    "TransformLedger",
    "align",
    "apply_pipeline",
    "directional_accuracy",
    "feature_importances",
    "first_difference",
    "fit",
    "generate",
    "invert_first_difference",
    "invert_seasonal_difference",
    "one_hot_month",
    "predict",
    "r_squared",
    "reconstruct_level",
    "run_backtest",
    "seasonal_difference",
    "sinusoidal_amplitudes",
]

__version__ = "0.1.0"
