# Count line mentions and estimate how many passengers the incidents touched.
"""
Each weekday incident adds the passenger count of its survey region for the
local hour it was posted.  Weekend incidents are left out.

    python3 demos/03_lines_and_impact.py
"""

from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from tim.impact import estimate_impact, frequency_stats, point_in_region
from tim.ingest import load_regions_and_flows
from tim.lines import count_line_mentions, load_registry

fixture = Path(str(resources.files("tim").joinpath("data/fixture")))
registry = load_registry(fixture / "lines.csv")
posts = [
    "Awaria na ul. Legnickiej, linie 3, 10 i 20 kursują objazdem.",
    "Kolizja na Placu Grunwaldzkim, linie 2, 10 i 33 stoją.",
    "Wykolejenie tramwaju linii 10 na ul. Hallera.",
    "Autobus linii 145 zablokowany przy ul. Kasprowicza.",
]
print("most mentioned lines:")
for c in count_line_mentions(posts, registry)[:6]:
    print(f"  {c.line_id:>4} {c.mode:<5} {c.post_count}")

regions, flows = load_regions_and_flows(fixture / "regions.geojson", fixture / "flows.csv")
incidents = [
    ((51.11, 16.98), datetime(2018, 3, 6, 7, 0, tzinfo=timezone.utc)),
    ((51.11, 17.03), datetime(2018, 3, 7, 15, 30, tzinfo=timezone.utc)),
    ((51.11, 17.08), datetime(2018, 3, 8, 6, 45, tzinfo=timezone.utc)),
    ((51.11, 17.03), datetime(2018, 3, 10, 12, 0, tzinfo=timezone.utc)),  # Saturday
    ((51.30, 17.00), datetime(2018, 3, 9, 12, 0, tzinfo=timezone.utc)),   # outside
]
for point, ts in incidents:
    print(f"  {point} {ts:%a %H:%M}Z -> region {point_in_region(point, regions)}")

report = estimate_impact(incidents, regions, flows, "Europe/Warsaw")
print(f"passengers affected: {report.total_passengers} {report.per_region}")
print(f"average per incident weekday: {report.per_day_average:.1f}, unmapped: {report.unmapped_incidents}")
freq = frequency_stats([ts for _, ts in incidents])
print(f"one incident every {freq.days_per_incident:.2f} days over {freq.span_days:.2f} days")
