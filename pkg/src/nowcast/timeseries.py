"""Month-indexed series and tables used by every other module.

All types are immutable after construction and therefore safe to share
across threads. Values are 64-bit floats throughout; gaps in a monthly
index are construction-time errors, never silently interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyIntersectionError, NonFiniteError, OutOfRangeError
from .ledger import TransformLedger


@dataclass(frozen=True, order=True)
class MonthKey:
    """A Gregorian calendar month. Ordering is (year, month) lexicographic."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def parse(cls, text: str) -> "MonthKey":
        """Parse a ``YYYY-MM`` string."""
        parts = text.strip().split("-")
        if len(parts) != 2:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def shift(self, months: int) -> "MonthKey":
        """The month ``months`` steps after this one (negative steps back)."""
        total = self.year * 12 + (self.month - 1) + months
        year, rem = divmod(total, 12)
        return MonthKey(year, rem + 1)

    def __add__(self, months: int) -> "MonthKey":
        if not isinstance(months, int):
            return NotImplemented
        return self.shift(months)

    def __sub__(self, other: "MonthKey") -> int:
        """Number of months from ``other`` to ``self``."""
        if not isinstance(other, MonthKey):
            return NotImplemented
        return (self.year - other.year) * 12 + (self.month - other.month)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def _freeze(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"values must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("values contain NaN or infinite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """A contiguous month-indexed sequence of finite real values.

    Index ``i`` maps to ``start + i``; there are no gaps by construction.
    """

    start: MonthKey
    values: np.ndarray
    name: str = ""
    units: str = ""

    def __post_init__(self) -> None:
        arr = _freeze(self.values)
        if arr.size == 0:
            raise ValueError("a MonthlySeries must contain at least one value")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> MonthKey:
        """Last month covered (inclusive)."""
        return self.start.shift(len(self) - 1)

    def months(self) -> tuple[MonthKey, ...]:
        return tuple(self.start.shift(i) for i in range(len(self)))

    def index_of(self, month: MonthKey) -> int:
        i = month - self.start
        if not 0 <= i < len(self):
            raise OutOfRangeError(
                f"{month} outside series range {self.start}..{self.end}"
            )
        return i

    def value_at(self, month: MonthKey) -> float:
        return float(self.values[self.index_of(month)])

    def window(self, first: MonthKey, last: MonthKey) -> "MonthlySeries":
        """Sub-series covering [first, last] inclusive."""
        if first > last:
            raise OutOfRangeError(f"inverted window {first}..{last}")
        lo, hi = self.index_of(first), self.index_of(last)
        return MonthlySeries(first, self.values[lo : hi + 1], self.name, self.units)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return (
            self.start == other.start
            and self.name == other.name
            and self.units == other.units
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Month-aligned named columns, an optional target column, and a ledger.

    Every column has exactly one value per month; months are strictly
    increasing and contiguous.
    """

    months: tuple[MonthKey, ...]
    columns: Mapping[str, np.ndarray]
    target: str | None = None
    ledger: TransformLedger = field(default_factory=TransformLedger)

    def __post_init__(self) -> None:
        months = tuple(self.months)
        if not months:
            raise ValueError("a FeatureTable must cover at least one month")
        for prev, cur in zip(months, months[1:]):
            if cur - prev != 1:
                raise ValueError(f"months must be contiguous; gap between {prev} and {cur}")
        if not self.columns:
            raise ValueError("a FeatureTable must have at least one column")
        frozen: dict[str, np.ndarray] = {}
        for name, values in self.columns.items():
            arr = _freeze(values)
            if arr.size != len(months):
                raise ValueError(
                    f"column {name!r} has {arr.size} values for {len(months)} months"
                )
            frozen[name] = arr
        if self.target is not None and self.target not in frozen:
            raise ValueError(f"target {self.target!r} is not a column")
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "columns", MappingProxyType(frozen))

    def __len__(self) -> int:
        return len(self.months)

    @property
    def start(self) -> MonthKey:
        return self.months[0]

    @property
    def end(self) -> MonthKey:
        return self.months[-1]

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    @property
    def feature_names(self) -> tuple[str, ...]:
        """Column names excluding the target, in table order."""
        return tuple(name for name in self.columns if name != self.target)

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def target_values(self) -> np.ndarray:
        if self.target is None:
            raise ValueError("table has no target column set")
        return self.columns[self.target]

    def target_series(self) -> MonthlySeries:
        return MonthlySeries(self.start, self.target_values(), name=self.target or "")

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        """Stack the named columns into an (n_rows, len(names)) array."""
        return np.column_stack([self.columns[name] for name in names])

    def with_target(self, target: str) -> "FeatureTable":
        """Same table with the target column set to ``target``."""
        return FeatureTable(self.months, dict(self.columns), target, self.ledger)

    def slice(self, first: MonthKey, last: MonthKey) -> "FeatureTable":
        """Rows restricted to [first, last] inclusive; ledger copied unchanged."""
        if first > last:
            raise OutOfRangeError(f"inverted bounds {first}..{last}")
        if first < self.start or last > self.end:
            raise OutOfRangeError(
                f"requested {first}..{last} outside table range {self.start}..{self.end}"
            )
        lo = first - self.start
        hi = last - self.start
        cols = {name: arr[lo : hi + 1] for name, arr in self.columns.items()}
        return FeatureTable(self.months[lo : hi + 1], cols, self.target, self.ledger)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (
            self.months == other.months
            and self.target == other.target
            and self.ledger == other.ledger
            and self.column_names == other.column_names
            and all(np.array_equal(self.columns[n], other.columns[n]) for n in self.columns)
        )


def align(series_list: Sequence[MonthlySeries]) -> FeatureTable:
    """Join series on the intersection of their month ranges.

    Each series becomes one column named after the series; the resulting
    ledger is empty. Raises :class:`EmptyIntersectionError` when the ranges
    share no months.
    """
    if not series_list:
        raise ValueError("align requires at least one series")
    names = [s.name for s in series_list]
    if any(not n for n in names):
        raise ValueError("every series needs a non-empty name to become a column")
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate series names: {names}")
    first = max(s.start for s in series_list)
    last = min(s.end for s in series_list)
    if first > last:
        raise EmptyIntersectionError("series share no common months")
    n = last - first + 1
    months = tuple(first.shift(i) for i in range(n))
    cols = {}
    for s in series_list:
        lo = first - s.start
        cols[s.name] = s.values[lo : lo + n]
    return FeatureTable(months, cols)
