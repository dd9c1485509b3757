"""CSV ingestion, schema validation, and monthly aggregation.

Four file schemas are supported (UTF-8, comma-separated, one header row,
months as YYYY-MM, dates as YYYY-MM-DD):

* employer  — ``employer_id,month,active_employees,sector,size_band``
* storm     — ``state,event_type,begin_date,injuries,damage_usd``
* claims    — ``week_ending,initial_claims,continued_claims``
* monthly-series — ``month,value``

``validate`` produces a deterministic findings report without raising on
bad rows; the ``read_*`` functions are strict and raise on the first
malformed row, so validate first when provenance is uncertain.
"""

from __future__ import annotations

import calendar
import csv
import datetime as dt
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, TooShortError, UnreadableFileError
from .timeseries import MonthKey, MonthlySeries

logger = logging.getLogger(__name__)

VALIDATION_SCHEMA_VERSION = 1

# robust z-score threshold: values more than this many MADs from the
# column median are flagged (as warnings, not errors)
OUTLIER_MAD_THRESHOLD = 5.0

SCHEMA_HEADERS = {
    "employer": ["employer_id", "month", "active_employees", "sector", "size_band"],
    "storm": ["state", "event_type", "begin_date", "injuries", "damage_usd"],
    "claims": ["week_ending", "initial_claims", "continued_claims"],
    "monthly-series": ["month", "value"],
}


@dataclass(frozen=True)
class EmployerRecord:
    employer_id: str
    month: MonthKey
    active_employees: int
    sector: str
    size_band: str


@dataclass(frozen=True)
class StormEvent:
    state: str
    event_type: str
    begin_date: dt.date
    injuries: int
    damage_usd: float


@dataclass(frozen=True)
class WeeklyClaims:
    week_ending: dt.date
    initial_claims: int
    continued_claims: int


@dataclass(frozen=True)
class Finding:
    """One validation issue. ``row`` is the 1-based file line (header = 1)."""

    column: str
    row: int
    kind: str
    severity: str  # "error" | "warning"
    message: str


@dataclass(frozen=True)
class ValidationReport:
    schema: str
    path: str
    findings: tuple[Finding, ...]

    @property
    def passed(self) -> bool:
        """True iff no error-severity findings (warnings do not fail a file)."""
        return not any(f.severity == "error" for f in self.findings)

    def column_summary(self) -> dict[str, dict[str, int]]:
        """Finding counts per column, keyed by finding kind."""
        out: dict[str, dict[str, int]] = {}
        for f in self.findings:
            kinds = out.setdefault(f.column, {})
            kinds[f.kind] = kinds.get(f.kind, 0) + 1
        return out

    def to_dict(self) -> dict:
        return {
            "schema_version": VALIDATION_SCHEMA_VERSION,
            "schema": self.schema,
            "path": self.path,
            "passed": self.passed,
            "findings": [
                {
                    "column": f.column,
                    "row": f.row,
                    "kind": f.kind,
                    "severity": f.severity,
                    "message": f.message,
                }
                for f in self.findings
            ],
            "column_summary": self.column_summary(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableFileError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise UnreadableFileError(f"{path} is empty (missing header)")
    return rows[0], rows[1:]


class _Collector:
    """Accumulates findings and per-column numeric values during validation."""

    def __init__(self) -> None:
        self.findings: list[Finding] = []
        self.numeric: dict[str, list[tuple[int, float]]] = {}

    def error(self, column: str, row: int, kind: str, message: str) -> None:
        self.findings.append(Finding(column, row, kind, "error", message))

    def warn(self, column: str, row: int, kind: str, message: str) -> None:
        self.findings.append(Finding(column, row, kind, "warning", message))

    def cell(
        self,
        column: str,
        row: int,
        text: str | None,
        kind: str,
        minimum: float | None = None,
        integer: bool = False,
    ) -> float | None:
        """Validate one cell; returns the parsed value when usable.

        ``kind`` is "int", "float", "date", or "month". Missing cells and
        parse failures are error findings; range violations too.
        """
        if text is None or not text.strip():
            self.error(column, row, "missing_value", "cell is empty")
            return None
        text = text.strip()
        if kind == "date":
            try:
                _parse_date(text)
            except ValueError:
                self.error(column, row, "non_parseable", f"not a YYYY-MM-DD date: {text!r}")
            return None
        if kind == "month":
            try:
                MonthKey.parse(text)
            except ValueError:
                self.error(column, row, "non_parseable", f"not a YYYY-MM month: {text!r}")
            return None
        try:
            value = float(text)
        except ValueError:
            self.error(column, row, "non_parseable", f"not a number: {text!r}")
            return None
        if integer and not value.is_integer():
            self.error(column, row, "type_mismatch", f"expected an integer: {text!r}")
            return None
        if minimum is not None and value < minimum:
            self.error(column, row, "out_of_range", f"value {value} below {minimum}")
            return None
        self.numeric.setdefault(column, []).append((row, value))
        return value

    def flag_outliers(self) -> None:
        """Robust z-score pass: |value - median| / MAD above the threshold."""
        for column, pairs in self.numeric.items():
            values = np.array([v for _, v in pairs])
            median = float(np.median(values))
            deviations = np.abs(values - median)
            mad = float(np.median(deviations))
            for (row, value), deviation in zip(pairs, deviations):
                # with zero MAD any deviation is infinitely many MADs out
                z = deviation / mad if mad > 0 else (np.inf if deviation > 0 else 0.0)
                if z > OUTLIER_MAD_THRESHOLD:
                    self.warn(
                        column,
                        row,
                        "outlier",
                        f"value {value} is {z:.1f} MADs from the median {median}",
                    )


def validate(path, schema: str) -> ValidationReport:
    """Check one CSV file against a named schema; never raises on content.

    Missing and unparseable cells are errors; outliers (more than five MADs
    from the column median) are warnings; violated file invariants
    (duplicates, ordering, gaps) are errors. Idempotent and
    side-effect-free: the same file yields the same report.
    """
    if schema not in SCHEMA_HEADERS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {sorted(SCHEMA_HEADERS)}")
    header, rows = _read_rows(path)
    expected = SCHEMA_HEADERS[schema]
    col = _Collector()
    if header != expected:
        col.error(
            "<header>",
            1,
            "header_mismatch",
            f"expected {','.join(expected)!r}, got {','.join(header)!r}",
        )
        return ValidationReport(schema, str(path), tuple(col.findings))

    seen_employer_months: dict[tuple[str, str], int] = {}
    seen_weeks: dict[str, int] = {}
    prev_week: dt.date | None = None
    prev_month: MonthKey | None = None
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != len(expected):
            col.error("<row>", line, "field_count", f"expected {len(expected)} fields, got {len(row)}")
            continue
        cells = dict(zip(expected, row))

        if schema == "employer":
            col.cell("month", line, cells["month"], "month")
            col.cell("active_employees", line, cells["active_employees"], "int", minimum=0, integer=True)
            if not cells["employer_id"].strip():
                col.error("employer_id", line, "missing_value", "cell is empty")
            else:
                key = (cells["employer_id"].strip(), cells["month"].strip())
                if key in seen_employer_months:
                    col.error(
                        "employer_id",
                        line,
                        "duplicate",
                        f"employer {key[0]!r} repeated for {key[1]} (first at line {seen_employer_months[key]})",
                    )
                else:
                    seen_employer_months[key] = line

        elif schema == "storm":
            col.cell("begin_date", line, cells["begin_date"], "date")
            col.cell("injuries", line, cells["injuries"], "int", minimum=0, integer=True)
            col.cell("damage_usd", line, cells["damage_usd"], "float", minimum=0)

        elif schema == "claims":
            col.cell("week_ending", line, cells["week_ending"], "date")
            col.cell("initial_claims", line, cells["initial_claims"], "int", minimum=0, integer=True)
            col.cell("continued_claims", line, cells["continued_claims"], "int", minimum=0, integer=True)
            text = cells["week_ending"].strip()
            try:
                week = _parse_date(text)
            except ValueError:
                week = None
            if week is not None:
                if text in seen_weeks:
                    col.error("week_ending", line, "duplicate", f"week {text} repeated (first at line {seen_weeks[text]})")
                else:
                    seen_weeks[text] = line
                if prev_week is not None and week <= prev_week:
                    col.error("week_ending", line, "ordering", f"{week} not after {prev_week}")
                if week.weekday() != 5:
                    col.warn("week_ending", line, "convention", f"{week} is not a Saturday")
                prev_week = week

        elif schema == "monthly-series":
            col.cell("value", line, cells["value"], "float")
            try:
                month = MonthKey.parse(cells["month"])
            except ValueError:
                month = None
                col.error("month", line, "non_parseable", f"not a YYYY-MM month: {cells['month']!r}")
            if month is not None:
                if prev_month is not None and month - prev_month != 1:
                    col.error("month", line, "gap", f"{month} does not immediately follow {prev_month}")
                prev_month = month

    col.flag_outliers()
    return ValidationReport(schema, str(path), tuple(col.findings))


def read_employer_csv(path) -> list[EmployerRecord]:
    header, rows = _read_rows(path)
    _require_header(path, header, "employer")
    records = []
    for i, row in enumerate(rows):
        employer_id, month, active, sector, size_band = _fields(path, i, row, 5)
        records.append(
            EmployerRecord(
                employer_id=employer_id.strip(),
                month=MonthKey.parse(month),
                active_employees=_strict_count(path, i, active),
                sector=sector.strip(),
                size_band=size_band.strip(),
            )
        )
    return records


def read_storm_csv(path) -> list[StormEvent]:
    header, rows = _read_rows(path)
    _require_header(path, header, "storm")
    events = []
    for i, row in enumerate(rows):
        state, event_type, begin, injuries, damage = _fields(path, i, row, 5)
        events.append(
            StormEvent(
                state=state.strip(),
                event_type=event_type.strip(),
                begin_date=_parse_date(begin),
                injuries=_strict_count(path, i, injuries),
                damage_usd=float(damage),
            )
        )
    return events


def read_claims_csv(path) -> list[WeeklyClaims]:
    header, rows = _read_rows(path)
    _require_header(path, header, "claims")
    claims = []
    for i, row in enumerate(rows):
        week, initial, continued = _fields(path, i, row, 3)
        claims.append(
            WeeklyClaims(
                week_ending=_parse_date(week),
                initial_claims=_strict_count(path, i, initial),
                continued_claims=_strict_count(path, i, continued),
            )
        )
    return claims


def read_monthly_series_csv(path, name: str | None = None, units: str = "") -> MonthlySeries:
    """Read a ``month,value`` file into a series (name defaults to the file stem)."""
    header, rows = _read_rows(path)
    _require_header(path, header, "monthly-series")
    if not rows:
        raise ValueError(f"{path} has no data rows")
    months = []
    values = []
    for i, row in enumerate(rows):
        month, value = _fields(path, i, row, 2)
        months.append(MonthKey.parse(month))
        values.append(float(value))
    for prev, cur in zip(months, months[1:]):
        if cur - prev != 1:
            raise ValueError(f"{path}: months not contiguous between {prev} and {cur}")
    return MonthlySeries(
        months[0], np.array(values), name=name or Path(path).stem, units=units
    )


def write_monthly_series_csv(series: MonthlySeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "value"])
        for month, value in zip(series.months(), series.values):
            writer.writerow([str(month), float(value)])


def _require_header(path, header: list[str], schema: str) -> None:
    if header != SCHEMA_HEADERS[schema]:
        raise ValueError(f"{path}: expected header {SCHEMA_HEADERS[schema]}, got {header}")


def _fields(path, i: int, row: list[str], n: int) -> list[str]:
    if len(row) != n:
        raise ValueError(f"{path} line {i + 2}: expected {n} fields, got {len(row)}")
    return row


def _strict_count(path, i: int, text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"{path} line {i + 2}: negative count {value}")
    return value


def matched_panel_aggregate(records: Sequence[EmployerRecord]) -> MonthlySeries:
    """Month-over-month employment change on a constant two-month panel.

    For each month the comparison is restricted to employers present in
    both that month and the one before, so entrants and exits from the
    provider's client base never masquerade as employment change. The
    result is a change series, not a level.
    """
    by_month: dict[MonthKey, dict[str, int]] = {}
    for r in records:
        month = by_month.setdefault(r.month, {})
        if r.employer_id in month:
            raise ValueError(f"duplicate record for employer {r.employer_id!r} in {r.month}")
        month[r.employer_id] = r.active_employees
    if not by_month:
        raise TooShortError("no employer records")
    first, last = min(by_month), max(by_month)
    if last - first < 1:
        raise TooShortError("matched-panel aggregation needs at least 2 months")

    values = []
    for i in range(1, last - first + 1):
        cur_month = first.shift(i)
        prev = by_month.get(cur_month.shift(-1), {})
        cur = by_month.get(cur_month, {})
        panel = prev.keys() & cur.keys()
        if not panel:
            logger.warning("no employer spans %s..%s; emitting 0", cur_month.shift(-1), cur_month)
            values.append(0.0)
        else:
            values.append(float(sum(cur[e] for e in panel) - sum(prev[e] for e in panel)))
    return MonthlySeries(
        first.shift(1),
        np.array(values),
        name="matched_panel_change",
        units="persons (matched-panel change)",
    )


def _saturdays_in(year: int, month: int) -> list[dt.date]:
    days = calendar.monthrange(year, month)[1]
    return [
        d
        for d in (dt.date(year, month, day) for day in range(1, days + 1))
        if d.weekday() == 5
    ]


def aggregate_claims_monthly(
    claims: Sequence[WeeklyClaims],
) -> tuple[MonthlySeries, MonthlySeries]:
    """Roll weekly claims up to the months their week-ending dates fall in.

    Initial claims are a flow and are summed; continued claims are a stock
    and are averaged. A month counts as covered only when every Saturday in
    it appears as a week-ending date; partially covered boundary months are
    dropped rather than extrapolated.
    """
    if not claims:
        raise EmptyInputError("no weekly claims to aggregate")
    seen: set[dt.date] = set()
    for c in claims:
        if c.week_ending in seen:
            raise ValueError(f"duplicate week_ending {c.week_ending}")
        seen.add(c.week_ending)

    ordered = sorted(claims, key=lambda c: c.week_ending)
    by_month: dict[MonthKey, list[WeeklyClaims]] = {}
    for c in ordered:
        by_month.setdefault(MonthKey(c.week_ending.year, c.week_ending.month), []).append(c)

    covered = [
        month
        for month, weeks in by_month.items()
        if {c.week_ending for c in weeks} >= set(_saturdays_in(month.year, month.month))
    ]
    if not covered:
        raise EmptyInputError("no month is fully covered by the supplied weeks")
    covered.sort()
    for prev, cur in zip(covered, covered[1:]):
        if cur - prev != 1:
            raise ValueError(f"covered months have a gap between {prev} and {cur}")

    initial = [float(sum(c.initial_claims for c in by_month[m])) for m in covered]
    continued = [
        float(sum(c.continued_claims for c in by_month[m])) / len(by_month[m])
        for m in covered
    ]
    start = covered[0]
    return (
        MonthlySeries(start, np.array(initial), name="initial_claims", units="claims (monthly total)"),
        MonthlySeries(start, np.array(continued), name="continued_claims", units="persons (weekly mean)"),
    )


def aggregate_storms_monthly(
    events: Sequence[StormEvent],
) -> tuple[MonthlySeries, MonthlySeries]:
    """National monthly storm-event counts and total damage.

    Events are keyed by their begin date's month; months inside the spanned
    range with no events are zeros, since absence of storms is data, not a
    gap.
    """
    if not events:
        raise EmptyInputError("no storm events to aggregate")
    months = [MonthKey(e.begin_date.year, e.begin_date.month) for e in events]
    first, last = min(months), max(months)
    n = last - first + 1
    counts = np.zeros(n)
    damage = np.zeros(n)
    for e, month in zip(events, months):
        i = month - first
        counts[i] += 1
        damage[i] += e.damage_usd
    return (
        MonthlySeries(first, counts, name="storm_events", units="events"),
        MonthlySeries(first, damage, name="storm_damage", units="USD"),
    )
