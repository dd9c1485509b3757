"""Differencing transforms and their exact inverses.

Builds a small employment-like series, removes its trend and seasonality
by differencing, then reconstructs the original levels exactly from the
ledgered anchors.
"""

import numpy as np

from nowcast import (
    MonthKey,
    MonthlySeries,
    first_difference,
    invert_first_difference,
    invert_seasonal_difference,
    one_hot_month,
    seasonal_difference,
)

# three years of monthly levels: trend 200/month plus a summer bump
months = 36
t = np.arange(months)
seasonal = np.where((t % 12 >= 5) & (t % 12 <= 7), 400.0, 0.0)
levels = MonthlySeries(
    MonthKey(2015, 1),
    130_000 + 200.0 * t + seasonal,
    name="employment",
    units="thousands of persons",
)
print(f"levels: {levels.start}..{levels.end}, first 6 values {levels.values[:6]}")

changes = first_difference(levels)
print(f"\nmonth-over-month changes start {changes.start}: {changes.values[:8]}")

deseasoned = seasonal_difference(changes, period=12)
print(f"after 12-month differencing ({deseasoned.start}..): {deseasoned.values[:8]}")
print("(a stable trend + stable seasonality differences away to zeros)")

# invert both steps; anchors come from the original series
anchor12 = changes.window(changes.start, changes.start.shift(11))
rebuilt_changes = invert_seasonal_difference(deseasoned, anchor12)
rebuilt_levels = invert_first_difference(
    rebuilt_changes, levels.value_at(rebuilt_changes.start.shift(-1)),
    rebuilt_changes.start.shift(-1),
)
original_tail = levels.values[13:]
print(f"\nround-trip max error: {np.abs(rebuilt_levels.values - original_tail).max():.2e}")

print("\ncalendar one-hots (model input for the seasonal-indicator pipeline):")
for m in (1, 6, 12):
    print(f"  month {m:2d} -> {one_hot_month(MonthKey(2020, m)).components}")
