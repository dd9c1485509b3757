"""Ordered record of the transforms applied to a feature table.

The ledger is what makes level-scale reconstruction possible: forward steps
are listed in application order, and inverses are applied in reverse order
(see :func:`nowcast.transforms.reconstruct_level`).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FirstDifference:
    """value(t) = observation(t) - observation(t - 1)."""


@dataclass(frozen=True)
class SeasonalDifference:
    """value(t) = observation(t) - observation(t - period)."""

    period: int = 12

    def __post_init__(self) -> None:
        if self.period < 2:
            raise ValueError(f"seasonal period must be >= 2, got {self.period}")


@dataclass(frozen=True)
class MonthOneHot:
    """Calendar-month indicator columns; identity on the target scale."""


TransformStep = FirstDifference | SeasonalDifference | MonthOneHot


@dataclass(frozen=True)
class TransformLedger:
    """Transform steps in the order they were applied."""

    steps: tuple[TransformStep, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.steps

    def record(self, step: TransformStep) -> "TransformLedger":
        """Return a new ledger with ``step`` appended."""
        return TransformLedger(self.steps + (step,))

    def describe(self) -> list[str]:
        """Human-readable step names, e.g. for report JSON."""
        out = []
        for step in self.steps:
            if isinstance(step, FirstDifference):
                out.append("first_difference")
            elif isinstance(step, SeasonalDifference):
                out.append(f"seasonal_difference({step.period})")
            else:
                out.append("month_one_hot")
        return out
