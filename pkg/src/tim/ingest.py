"""Readers for the pipeline's input files and the core data model.

All loaders are pure functions of their input files.  Malformed input raises
:class:`InputError` carrying the file and the offending line or row number.
"""

import csv
import json
import logging
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from tim.text import normalize_name

log = logging.getLogger(__name__)

PLATFORMS = ("facebook", "twitter")
TOPONYM_KINDS = ("stop", "street", "intersection")
TOPONYM_SOURCES = ("gtfs", "osm", "manual")
DAY_KINDS = ("weekday", "weekend")


class InputError(ValueError):
    """Invalid input file content."""

    def __init__(self, message, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = self.path + (f":{line}" if line is not None else "") + ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Comment:
    id: str
    text: str
    author_hash: str = ""
    published_at: datetime | None = None


@dataclass(frozen=True)
class Post:
    id: str
    platform: str
    published_at: datetime
    text: str
    hashtags: tuple = ()
    reactions: dict = field(default_factory=dict)
    comments: tuple = ()

    def to_dict(self):
        return {
            "id": self.id,
            "platform": self.platform,
            "published_at": format_timestamp(self.published_at),
            "text": self.text,
            "hashtags": list(self.hashtags),
            "reactions": dict(self.reactions),
            "comments": [
                {
                    "id": c.id,
                    "text": c.text,
                    "author_hash": c.author_hash,
                    "published_at": (
                        format_timestamp(c.published_at) if c.published_at else None
                    ),
                }
                for c in self.comments
            ],
        }


@dataclass(frozen=True)
class Toponym:
    name: str
    kind: str
    lat: float
    lon: float
    source: str = "manual"

    def __post_init__(self):
        if not self.name or not self.name.strip():
            raise ValueError("toponym name must be non-empty")
        if self.kind not in TOPONYM_KINDS:
            raise ValueError(f"unknown toponym kind {self.kind!r}")
        if self.source not in TOPONYM_SOURCES:
            raise ValueError(f"unknown toponym source {self.source!r}")
        _check_coordinates(self.lat, self.lon)


@dataclass(frozen=True)
class Gazetteer:
    """Toponyms plus an index from normalized name to entry positions."""

    entries: tuple
    normalized_index: dict

    def lookup(self, name):
        """Entries whose normalized name equals ``normalize_name(name)``."""
        return [self.entries[i] for i in self.normalized_index.get(normalize_name(name), ())]

    def __len__(self):
        return len(self.entries)

    def bounding_box(self):
        """``(min_lat, min_lon, max_lat, max_lon)`` over all entries."""
        lats = [e.lat for e in self.entries]
        lons = [e.lon for e in self.entries]
        return min(lats), min(lons), max(lats), max(lons)


@dataclass(frozen=True)
class MobilityRegion:
    """Survey region; ``polygon`` is an open ring of ``(lat, lon)`` vertices."""

    region_id: str
    polygon: tuple


@dataclass(frozen=True)
class FlowTable:
    """Passengers keyed by ``(region_id, hour, day_kind)``."""

    rows: dict

    def get(self, region_id, hour, day_kind):
        return self.rows.get((region_id, hour, day_kind))

    def __len__(self):
        return len(self.rows)


def _check_coordinates(lat, lon):
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise ValueError("coordinates must be finite")
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude {lon} outside [-180, 180]")


def parse_timestamp(value):
    """Parse an ISO-8601 timestamp with an explicit offset into UTC (whole seconds)."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None or ts.utcoffset() is None:
        raise ValueError(f"timestamp {value!r} has no timezone")
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts):
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _require(record, key, kind):
    if key not in record:
        raise ValueError(f"missing field {key!r}")
    value = record[key]
    if not isinstance(value, kind):
        raise ValueError(f"field {key!r} must be {kind.__name__}")
    return value


def _parse_comment(raw):
    if not isinstance(raw, dict):
        raise ValueError("comment must be an object")
    cid = _require(raw, "id", str)
    if not cid:
        raise ValueError("comment id must be non-empty")
    published = raw.get("published_at")
    return Comment(
        id=cid,
        text=_require(raw, "text", str),
        author_hash=str(raw.get("author_hash") or ""),
        published_at=parse_timestamp(published) if published is not None else None,
    )


def parse_post(record):
    """Build a :class:`Post` from one decoded JSON record; unknown keys are ignored."""
    if not isinstance(record, dict):
        raise ValueError("record must be a JSON object")
    pid = _require(record, "id", str)
    if not pid:
        raise ValueError("post id must be non-empty")
    platform = _require(record, "platform", str)
    if platform not in PLATFORMS:
        raise ValueError(f"unknown platform {platform!r}")
    published_at = parse_timestamp(_require(record, "published_at", str))
    text = _require(record, "text", str)

    hashtags = record.get("hashtags") or []
    if not isinstance(hashtags, list) or not all(isinstance(h, str) for h in hashtags):
        raise ValueError("hashtags must be a list of strings")

    reactions = record.get("reactions") or {}
    if not isinstance(reactions, dict):
        raise ValueError("reactions must be an object")
    for kind, count in reactions.items():
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ValueError(f"reaction count for {kind!r} must be a non-negative integer")

    comments = tuple(_parse_comment(c) for c in record.get("comments") or [])
    seen = set()
    for c in comments:
        if c.id in seen:
            raise ValueError(f"duplicate comment id {c.id!r}")
        seen.add(c.id)

    return Post(
        id=pid,
        platform=platform,
        published_at=published_at,
        text=text,
        hashtags=tuple(hashtags),
        reactions=dict(reactions),
        comments=comments,
    )


def has_hashtag(post, tag):
    """Case-insensitive hashtag test over the post text and its hashtag list."""
    bare = tag.lstrip("#").lower()
    if any(h.lstrip("#").lower() == bare for h in post.hashtags):
        return True
    return re.search("#" + re.escape(bare) + r"(?!\w)", post.text.lower()) is not None


def iter_jsonl(path):
    """Yield ``(line_number, record)`` for every non-blank line of a JSONL file."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"malformed JSON: {exc.msg}", path, lineno) from None


def load_posts(path, hashtag_filter=None):
    """Read posts from a JSONL file, sorted by publication time.

    With ``hashtag_filter`` only posts carrying that hashtag (case-insensitive,
    in the text or the hashtag list) are kept.
    """
    posts = []
    seen = {}
    for lineno, record in iter_jsonl(path):
        try:
            post = parse_post(record)
        except ValueError as exc:
            raise InputError(f"malformed post: {exc}", path, lineno) from None
        if post.id in seen:
            raise InputError(
                f"duplicate post id {post.id!r} (first seen on line {seen[post.id]})",
                path,
                lineno,
            )
        seen[post.id] = lineno
        posts.append(post)
    if hashtag_filter:
        posts = [p for p in posts if has_hashtag(p, hashtag_filter)]
    posts.sort(key=lambda p: p.published_at)
    return posts


def _read_csv(path, required):
    f = open(path, encoding="utf-8-sig", newline="")
    reader = csv.DictReader(f)
    columns = [c.strip() for c in reader.fieldnames or []]
    reader.fieldnames = columns
    for col in required:
        if col not in columns:
            f.close()
            raise InputError(f"missing column {col!r}", path)
    return f, reader


def _float(row, key):
    value = float(row[key])
    if not math.isfinite(value):
        raise ValueError(f"{key} is not finite")
    return value


def load_gtfs_stops(path):
    """Stops from a GTFS ``stops.txt`` as stop-kind toponyms.

    Rows sharing a name and coordinates (to 1e-6 degrees) collapse into one.
    """
    f, reader = _read_csv(path, ("stop_id", "stop_name", "stop_lat", "stop_lon"))
    stops = []
    seen = set()
    with f:
        # header is line 1
        for rowno, row in enumerate(reader, start=2):
            try:
                lat, lon = _float(row, "stop_lat"), _float(row, "stop_lon")
                stop = Toponym(row["stop_name"].strip(), "stop", lat, lon, "gtfs")
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad stop row: {exc}", path, rowno) from None
            key = (stop.name, round(lat, 6), round(lon, 6))
            if key not in seen:
                seen.add(key)
                stops.append(stop)
    return stops


def load_gazetteer(path):
    """Toponyms from a ``name,kind,lat,lon,source`` CSV."""
    f, reader = _read_csv(path, ("name", "kind", "lat", "lon", "source"))
    entries = []
    with f:
        for rowno, row in enumerate(reader, start=2):
            try:
                entries.append(
                    Toponym(
                        row["name"].strip(),
                        row["kind"].strip(),
                        _float(row, "lat"),
                        _float(row, "lon"),
                        row["source"].strip(),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad gazetteer row: {exc}", path, rowno) from None
    return entries


def build_gazetteer(toponyms):
    index = defaultdict(list)
    entries = tuple(toponyms)
    for i, entry in enumerate(entries):
        index[normalize_name(entry.name)].append(i)
    return Gazetteer(entries, {k: tuple(v) for k, v in index.items()})


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and on_segment(p1, p2, q1)) or (o2 == 0 and on_segment(p1, p2, q2))
            or (o3 == 0 and on_segment(q1, q2, p1)) or (o4 == 0 and on_segment(q1, q2, p2)))


def _is_simple_ring(ring):
    n = len(ring)
    edges = [(ring[i], ring[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False
    return True


def make_region(region_id, ring):
    """Validate a ``(lat, lon)`` ring and return an open-ring :class:`MobilityRegion`."""
    ring = [(float(lat), float(lon)) for lat, lon in ring]
    if len(ring) > 1 and ring[0] == ring[-1]:
        ring = ring[:-1]
    deduped = [v for i, v in enumerate(ring) if i == 0 or v != ring[i - 1]]
    if len(set(deduped)) < 3:
        raise ValueError(f"region {region_id!r} has fewer than 3 distinct vertices")
    for lat, lon in deduped:
        _check_coordinates(lat, lon)
    if not _is_simple_ring(deduped):
        raise ValueError(f"region {region_id!r} ring is self-intersecting")
    return MobilityRegion(str(region_id), tuple(deduped))


def load_regions(path):
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc.msg}", path, exc.lineno) from None
    if doc.get("type") != "FeatureCollection":
        raise InputError("expected a FeatureCollection", path)
    regions = []
    seen = set()
    for n, feature in enumerate(doc.get("features", []), start=1):
        props = feature.get("properties") or {}
        geometry = feature.get("geometry") or {}
        region_id = props.get("region_id")
        if region_id is None:
            raise InputError(f"feature {n} has no region_id property", path)
        if geometry.get("type") != "Polygon":
            raise InputError(f"region {region_id!r} geometry must be a Polygon", path)
        rings = geometry.get("coordinates") or []
        if not rings:
            raise InputError(f"region {region_id!r} has no coordinates", path)
        try:
            # GeoJSON positions are [lon, lat]; only the exterior ring is used
            region = make_region(region_id, [(pos[1], pos[0]) for pos in rings[0]])
        except (TypeError, IndexError, ValueError) as exc:
            raise InputError(str(exc), path) from None
        if region.region_id in seen:
            raise InputError(f"duplicate region_id {region.region_id!r}", path)
        seen.add(region.region_id)
        regions.append(region)
    return regions


def load_flows(path, region_ids=None):
    f, reader = _read_csv(path, ("region_id", "hour", "day_kind", "passengers"))
    rows = {}
    with f:
        for rowno, row in enumerate(reader, start=2):
            region_id = row["region_id"].strip()
            try:
                hour = int(row["hour"])
                passengers = int(row["passengers"])
            except (TypeError, ValueError):
                raise InputError("hour and passengers must be integers", path, rowno) from None
            day_kind = row["day_kind"].strip()
            if not 0 <= hour <= 23:
                raise InputError(f"hour {hour} outside valid range 0-23", path, rowno)
            if day_kind not in DAY_KINDS:
                raise InputError(f"unknown day_kind {day_kind!r}", path, rowno)
            if passengers < 0:
                raise InputError("passengers must be non-negative", path, rowno)
            if region_ids is not None and region_id not in region_ids:
                raise InputError(f"flow row references unknown region {region_id}", path, rowno)
            key = (region_id, hour, day_kind)
            if key in rows:
                raise InputError(f"duplicate flow row for {key}", path, rowno)
            rows[key] = passengers
    return FlowTable(rows)


def load_regions_and_flows(regions_path, flows_path):
    regions = load_regions(regions_path)
    flows = load_flows(flows_path, {r.region_id for r in regions})
    return regions, flows


def load_registry_rows(path):
    """Rows of a ``line_id,mode[,aliases]`` CSV as ``(line_id, mode, aliases)``."""
    f, reader = _read_csv(path, ("line_id", "mode"))
    out = []
    with f:
        for rowno, row in enumerate(reader, start=2):
            aliases = tuple(a.strip() for a in (row.get("aliases") or "").split(";") if a.strip())
            out.append((row["line_id"].strip(), row["mode"].strip(), aliases, rowno))
    return out


def read_lines(path):
    """Non-blank, non-comment lines of a UTF-8 text file."""
    text = Path(path).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
