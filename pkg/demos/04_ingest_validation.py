"""CSV validation and the monthly aggregation operations.

Writes small employer-panel, storm, and weekly-claims files to a
temporary directory, validates them (including a planted defect and an
outlier), and rolls them up to monthly series.
"""

import tempfile
from pathlib import Path

from nowcast.ingest import (
    aggregate_claims_monthly,
    aggregate_storms_monthly,
    matched_panel_aggregate,
    read_claims_csv,
    read_employer_csv,
    read_storm_csv,
    validate,
)

work = Path(tempfile.mkdtemp(prefix="nowcast_ingest_"))

employer = work / "employer.csv"
employer.write_text(
    "employer_id,month,active_employees,sector,size_band\n"
    "X,2021-01,10,services,small\n"
    "Y,2021-01,20,manufacturing,medium\n"
    "X,2021-02,12,services,small\n"
    "Z,2021-02,50,services,large\n"
)

claims = work / "claims.csv"
claims.write_text(
    "week_ending,initial_claims,continued_claims\n"
    "2017-01-07,200000,1700000\n"
    "2017-01-14,210000,1700000\n"
    "2017-01-21,190000,1700000\n"
    "2017-01-28,200000,1700000\n"
)

storms = work / "storms.csv"
storms.write_text(
    "state,event_type,begin_date,injuries,damage_usd\n"
    "TX,hail,2017-09-02,0,1000000\n"
    "FL,hurricane,2017-09-10,4,2000000\n"
    "OK,tornado,2017-09-28,1,0\n"
)

broken = work / "broken_claims.csv"
broken.write_text(
    "week_ending,initial_claims,continued_claims\n"
    "2017-01-07,200000,1700000\n"
    "2017-01-14,,1700000\n"
)

for path, schema in [
    (employer, "employer"),
    (claims, "claims"),
    (storms, "storm"),
    (broken, "claims"),
]:
    report = validate(path, schema)
    status = "pass" if report.passed else "FAIL"
    print(f"{path.name:18s} [{schema}] -> {status}, {len(report.findings)} finding(s)")
    for f in report.findings:
        print(f"    line {f.row}, {f.column}: {f.severity} {f.kind} ({f.message})")

print("\nmatched-panel change (only employers present in both months count):")
panel = matched_panel_aggregate(read_employer_csv(employer))
for month, value in zip(panel.months(), panel.values):
    print(f"  {month}: {value:+.0f} {panel.units}")

initial, continued = aggregate_claims_monthly(read_claims_csv(claims))
print(f"\nJanuary 2017 initial claims (sum of weeks):   {initial.values[0]:,.0f}")
print(f"January 2017 continued claims (weekly mean):  {continued.values[0]:,.0f}")

counts, damage = aggregate_storms_monthly(read_storm_csv(storms))
print(f"\nSeptember 2017 storms: {counts.values[0]:.0f} events, ${damage.values[0]:,.0f} damage")
