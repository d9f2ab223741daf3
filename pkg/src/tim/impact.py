"""Passenger-impact estimation and disruption frequency.

Incidents are placed in survey mobility regions by a planar point-in-polygon
test (latitude/longitude used as Euclidean coordinates, fine at city scale)
and each weekday incident adds the region's passenger count for the hour it
was reported.  Disruptions are assumed to be cleared within that hour, so the
total is a lower bound.
"""

import logging
from dataclasses import dataclass
from datetime import datetime
from zoneinfo import ZoneInfo

log = logging.getLogger(__name__)

DEFAULT_TZ = "Europe/Warsaw"
SECONDS_PER_DAY = 86400.0
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class ImpactReport:
    total_passengers: int
    per_region: dict
    per_day_average: float
    distinct_incident_weekdays: int
    unmapped_incidents: int
    weekday_incidents: int = 0
    missing_flow_rows: int = 0

    def to_dict(self):
        return {
            "total_passengers": self.total_passengers,
            "per_region": dict(self.per_region),
            "per_day_average": self.per_day_average,
            "distinct_incident_weekdays": self.distinct_incident_weekdays,
            "unmapped_incidents": self.unmapped_incidents,
            "weekday_incidents": self.weekday_incidents,
            "missing_flow_rows": self.missing_flow_rows,
        }


@dataclass(frozen=True)
class FrequencyStats:
    incident_count: int
    span_days: float
    days_per_incident: float


def _zone(tz):
    return ZoneInfo(tz) if isinstance(tz, str) else tz


def local_time(ts, tz=DEFAULT_TZ):
    if ts.tzinfo is None:
        raise ValueError("timestamp must be timezone-aware")
    return ts.astimezone(_zone(tz))


def day_kind(ts, tz=DEFAULT_TZ):
    """``"weekday"`` for Monday-Friday by the civil date in ``tz``, else ``"weekend"``."""
    return "weekday" if local_time(ts, tz).weekday() < 5 else "weekend"


def _on_edge(lat, lon, a, b):
    (alat, alon), (blat, blon) = a, b
    if not (min(alat, blat) - _EDGE_TOL <= lat <= max(alat, blat) + _EDGE_TOL
            and min(alon, blon) - _EDGE_TOL <= lon <= max(alon, blon) + _EDGE_TOL):
        return False
    cross = (blon - alon) * (lat - alat) - (blat - alat) * (lon - alon)
    length = max(abs(blon - alon), abs(blat - alat), 1.0)
    return abs(cross) <= _EDGE_TOL * length


def polygon_contains(polygon, point):
    """Ray-casting containment; points on an edge or vertex count as inside."""
    lat, lon = point
    n = len(polygon)
    inside = False
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        if _on_edge(lat, lon, a, b):
            return True
        (alat, alon), (blat, blon) = a, b
        if (alat > lat) != (blat > lat):
            crossing = alon + (lat - alat) * (blon - alon) / (blat - alat)
            if lon < crossing:
                inside = not inside
    return inside


def point_in_region(point, regions):
    """Id of the first region (in input order) containing ``point``, else ``None``."""
    for region in regions:
        if polygon_contains(region.polygon, point):
            return region.region_id
    return None


def passengers_at(region_id, timestamp, flows, tz=DEFAULT_TZ):
    """Passengers in the region for the local hour and day kind of ``timestamp``.

    A missing flow row yields 0 and a logged warning.
    """
    local = local_time(timestamp, tz)
    key = (region_id, local.hour, day_kind(timestamp, tz))
    value = flows.get(*key)
    if value is None:
        log.warning("no flow row for %s; counting 0 passengers", key)
        return 0
    return value


def _first_point(locations):
    if locations is None:
        return None
    if hasattr(locations, "lat"):
        return (locations.lat, locations.lon)
    if isinstance(locations, tuple) and len(locations) == 2 and \
            all(isinstance(v, (int, float)) for v in locations):
        return locations
    for loc in locations:
        return _first_point(loc)
    return None


def estimate_impact(incidents, regions, flows, tz=DEFAULT_TZ):
    """Aggregate weekday incidents into an :class:`ImpactReport`.

    ``incidents`` holds ``(locations, timestamp)`` pairs where ``locations`` is
    an ``IncidentLocation``, a ``(lat, lon)`` pair or a sequence of those; only
    the first location of a post is used.  Weekend incidents are ignored.
    Weekday incidents without a location or outside every region are counted
    as unmapped.
    """
    per_region = {}
    days = set()
    unmapped = missing = weekday_count = 0
    for locations, ts in incidents:
        if day_kind(ts, tz) != "weekday":
            continue
        weekday_count += 1
        days.add(local_time(ts, tz).date())
        point = _first_point(locations)
        region_id = point_in_region(point, regions) if point is not None else None
        if region_id is None:
            unmapped += 1
            continue
        local = local_time(ts, tz)
        value = flows.get(region_id, local.hour, "weekday")
        if value is None:
            missing += 1
            log.warning("no flow row for %s; counting 0 passengers",
                        (region_id, local.hour, "weekday"))
            value = 0
        per_region[region_id] = per_region.get(region_id, 0) + value

    order = {r.region_id: i for i, r in enumerate(regions)}
    per_region = dict(sorted(per_region.items(), key=lambda kv: order[kv[0]]))
    total = sum(per_region.values())
    return ImpactReport(
        total_passengers=total,
        per_region=per_region,
        per_day_average=total / max(1, len(days)),
        distinct_incident_weekdays=len(days),
        unmapped_incidents=unmapped,
        weekday_incidents=weekday_count,
        missing_flow_rows=missing,
    )


def frequency_stats(timestamps):
    """Days between the first and last incident divided by the number of incidents."""
    timestamps = list(timestamps)
    if not timestamps:
        raise ValueError("frequency_stats needs at least one incident")
    if any(not isinstance(t, datetime) or t.tzinfo is None for t in timestamps):
        raise ValueError("timestamps must be timezone-aware datetimes")
    seconds = (max(timestamps) - min(timestamps)).total_seconds()
    # single division keeps the ratio correctly rounded
    per_incident = seconds / (SECONDS_PER_DAY * len(timestamps))
    return FrequencyStats(len(timestamps), seconds / SECONDS_PER_DAY, per_incident)
