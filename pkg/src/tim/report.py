"""End-to-end pipeline and report export.

Runs ingest, classification, the analysis filter, geoparsing, line counting,
impact estimation and engagement statistics, and writes the results as
GeoJSON, JSONL, CSV and JSON files.  Every artifact is a deterministic
function of the inputs and the seed.
"""

import csv
import io
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from tim import classifier, engagement, geoparse, impact, ingest, lines
from tim.classifier import INCIDENT_LABELS, NON_DISRUPTION_LABELS, SENTIMENT_LABELS
from tim.ingest import InputError, format_timestamp

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

GEOJSON_NAME = "incidents.geojson"
INCIDENTS_NAME = "incidents.jsonl"
POST_TYPES_NAME = "post_types.csv"
LINES_NAME = "line_mentions.csv"
SENTIMENT_NAME = "sentiment.csv"
REACTIONS_NAME = "reactions.csv"
IMPACT_NAME = "impact.json"


class PipelineError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` is the original error."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")

    @property
    def is_input_error(self):
        return isinstance(self.cause, (InputError, OSError, ValueError, KeyError))


@dataclass(frozen=True)
class IncidentRecord:
    post_id: str
    label: str
    published_at: object
    locations: tuple = ()
    lines: frozenset = frozenset()
    region_id: str | None = None
    interactions: engagement.InteractionSummary | None = None

    def __post_init__(self):
        if self.label not in INCIDENT_LABELS:
            raise ValueError(f"label {self.label!r} is not an incident label")

    def to_dict(self):
        inter = self.interactions
        return {
            "post_id": self.post_id,
            "label": self.label,
            "published_at": format_timestamp(self.published_at),
            "locations": [loc.to_dict() for loc in self.locations],
            "lines": sorted_lines(self.lines),
            "region_id": self.region_id,
            "interactions": None if inter is None else {
                "reactions_total": inter.reactions_total,
                "comments_total": inter.comments_total,
                "interactions": inter.interactions,
                "reaction_breakdown": dict(sorted(inter.reaction_breakdown.items())),
            },
        }

    @classmethod
    def from_dict(cls, d):
        inter = d.get("interactions")
        return cls(
            post_id=d["post_id"],
            label=d["label"],
            published_at=ingest.parse_timestamp(d["published_at"]),
            locations=tuple(geoparse.IncidentLocation.from_dict(x) for x in d.get("locations", [])),
            lines=frozenset(d.get("lines", [])),
            region_id=d.get("region_id"),
            interactions=None if inter is None else engagement.InteractionSummary(
                d["post_id"], inter["reactions_total"], inter["comments_total"],
                inter["interactions"], dict(inter.get("reaction_breakdown", {})),
            ),
        )


def sorted_lines(line_ids):
    return sorted(line_ids, key=lambda x: (0, int(x), "") if x.isdigit() else (1, 0, x))


def analysis_filter(records):
    """Drop planned-change and restoration notices, keeping disruptions."""
    return [r for r in records if r.label not in NON_DISRUPTION_LABELS]


def export_geojson(records):
    """Point FeatureCollection of the first location of each record, sorted by post id.

    Returns ``(document, skipped)`` where ``skipped`` counts records without a location.
    """
    features = []
    skipped = 0
    for rec in sorted(records, key=lambda r: r.post_id):
        if not rec.locations:
            skipped += 1
            continue
        loc = rec.locations[0]
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [loc.lon, loc.lat]},
            "properties": {
                "post_id": rec.post_id,
                "label": rec.label,
                "interactions": rec.interactions.interactions if rec.interactions else 0,
                "lines": sorted_lines(rec.lines),
                "region_id": rec.region_id,
            },
        })
    return {"type": "FeatureCollection", "features": features}, skipped


def _csv_text(header_note, columns, rows):
    buf = io.StringIO()
    buf.write(f"# {header_note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def post_types_csv(records):
    counts = Counter(r.label for r in records)
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return _csv_text("columns: label,posts; rows: posts descending, then label", ("label", "posts"), rows)


def line_mentions_csv(line_counts):
    rows = [(c.line_id, c.mode, c.post_count) for c in line_counts]
    return _csv_text(
        "columns: line_id,mode,posts; rows: posts descending, then line id (numeric first)",
        ("line_id", "mode", "posts"), rows,
    )


def sentiment_csv(labels):
    dist = engagement.sentiment_distribution(labels) if labels else {}
    rows = [(lab, n) for lab, n in dist.items()]
    return _csv_text("columns: sentiment,comments; rows: positive, neutral, negative",
                     ("sentiment", "comments"), rows)


def reactions_csv(table):
    kinds = sorted({k for row in table.values() for k in row})
    rows = [[label, *(row.get(k, 0) for k in kinds), sum(row.values())]
            for label, row in table.items()]
    return _csv_text(
        "columns: label, one per reaction kind (sorted), total; rows: typology order",
        ("label", *kinds, "total"), rows,
    )


def export_summaries(out_dir, records, line_counts, impact_report=None,
                     sentiment_labels=(), reactions=None, extra_impact=None):
    """Write the four summary CSVs (and ``impact.json`` when a report is given).

    Returns the written paths in a fixed order.
    """
    out_dir = Path(out_dir)
    if reactions is None:
        reactions = {}
    contents = {
        POST_TYPES_NAME: post_types_csv(records),
        LINES_NAME: line_mentions_csv(line_counts),
        SENTIMENT_NAME: sentiment_csv(list(sentiment_labels)),
        REACTIONS_NAME: reactions_csv(reactions),
    }
    if impact_report is not None:
        doc = impact_report.to_dict()
        doc.update(extra_impact or {})
        contents[IMPACT_NAME] = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    written = []
    for name, text in contents.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


@dataclass(frozen=True)
class PipelineConfig:
    posts: Path
    gazetteer: Path
    registry: Path
    regions: Path
    flows: Path
    out_dir: Path
    incident_model: Path | None = None
    incident_corpus: Path | None = None
    sentiment_model: Path | None = None
    sentiment_corpus: Path | None = None
    stops: Path | None = None
    triggers: Path | None = None
    threshold: float = geoparse.DEFAULT_THRESHOLD
    seed: int = 0
    timezone: str = impact.DEFAULT_TZ
    hashtag: str | None = "#AlertMPK"
    analysis_filter: bool = True
    classifier: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.incident_model is None and self.incident_corpus is None:
            raise ValueError("config needs incident_model or incident_corpus")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")

    def input_paths(self):
        names = ("posts", "gazetteer", "registry", "regions", "flows", "incident_model",
                 "incident_corpus", "sentiment_model", "sentiment_corpus", "stops", "triggers")
        return {n: getattr(self, n) for n in names if getattr(self, n) is not None}


_PATH_KEYS = {"posts", "gazetteer", "registry", "regions", "flows", "out_dir", "incident_model",
              "incident_corpus", "sentiment_model", "sentiment_corpus", "stops", "triggers"}


def load_config(path, **overrides):
    """Read a TOML key/value pipeline config; relative paths resolve against its directory."""
    path = Path(path)
    with open(path, "rb") as f:
        try:
            raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"bad config: {exc}", path) from None
    raw.update({k: v for k, v in overrides.items() if v is not None})
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}", path)
    values = {}
    for key, value in raw.items():
        if key in _PATH_KEYS:
            p = Path(value)
            values[key] = p if p.is_absolute() else path.parent / p
        else:
            values[key] = value
    try:
        return PipelineConfig(**values)
    except TypeError as exc:
        raise InputError(f"bad config: {exc}", path) from None
    except ValueError as exc:
        raise InputError(str(exc), path) from None


def _model(model_path, corpus_path, labels, config, seed):
    if model_path is not None:
        model = classifier.load(model_path)
        if set(model.label_set) != set(labels):
            raise ValueError(f"model {model_path} has labels {model.label_set}, expected {labels}")
        return model
    docs = classifier.read_corpus(corpus_path, labels)
    params = {**config.classifier, "seed": seed}
    return classifier.train(docs, classifier.ClassifierConfig(**params), label_set=labels)


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        log.info("stage %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, exc) from exc
        return False


def run_pipeline(config):
    """Run every stage and write all artifacts into ``config.out_dir``.

    On failure the artifacts written so far are removed and a
    :class:`PipelineError` naming the stage is raised.
    """
    out_dir = Path(config.out_dir)
    written = []
    try:
        with _Stage("ingest"):
            for name, p in config.input_paths().items():
                if not Path(p).exists():
                    raise InputError(f"{name} file not found", p)
            posts = ingest.load_posts(config.posts, config.hashtag)
            toponyms = ingest.load_gazetteer(config.gazetteer)
            if config.stops is not None:
                toponyms += ingest.load_gtfs_stops(config.stops)
            gaz = ingest.build_gazetteer(toponyms)
            lexicon = (geoparse.load_triggers(config.triggers) if config.triggers
                       else geoparse.default_lexicon())
            registry = lines.load_registry(config.registry)
            regions, flows = ingest.load_regions_and_flows(config.regions, config.flows)

        with _Stage("classify"):
            model = _model(config.incident_model, config.incident_corpus,
                           INCIDENT_LABELS, config, config.seed)
            labeled = [(p, classifier.predict(model, p.text).label) for p in posts]

        with _Stage("filter"):
            if config.analysis_filter:
                labeled = [(p, lab) for p, lab in labeled if lab not in NON_DISRUPTION_LABELS]

        with _Stage("geoparse"):
            located = [(p, lab, geoparse.geocode_post(p, gaz, lexicon, config.threshold))
                       for p, lab in labeled]
            unmatched = sum(1 for _, _, locs in located if not locs)
            if unmatched:
                log.info("%d post(s) without a resolved location", unmatched)

        with _Stage("lines"):
            line_counts = lines.count_line_mentions(posts, registry)

        with _Stage("impact"):
            records = []
            for p, lab, locs in located:
                region = None
                if locs:
                    region = impact.point_in_region((locs[0].lat, locs[0].lon), regions)
                records.append(IncidentRecord(
                    post_id=p.id,
                    label=lab,
                    published_at=p.published_at,
                    locations=tuple(locs),
                    lines=frozenset(lines.extract_line_mentions(p.text, registry)),
                    region_id=region,
                    interactions=engagement.interaction_summary(p),
                ))
            report = impact.estimate_impact(
                [(r.locations, r.published_at) for r in records], regions, flows, config.timezone
            )
            freq = None
            if records:
                freq = impact.frequency_stats([r.published_at for r in records])

        with _Stage("engagement"):
            sentiment_labels = []
            if config.sentiment_model is not None or config.sentiment_corpus is not None:
                smodel = _model(config.sentiment_model, config.sentiment_corpus,
                                SENTIMENT_LABELS, config, config.seed)
                by_id = {p.id: p for p in posts}
                for rec in records:
                    kept = engagement.filter_comments(by_id[rec.post_id].comments)
                    sentiment_labels.extend(engagement.sentiment_classify(smodel, kept).values())
            groups = {}
            by_id = {p.id: p for p in posts}
            for rec in records:
                groups.setdefault(rec.label, []).append(by_id[rec.post_id])
            reactions = engagement.reaction_distribution(groups)

        with _Stage("export"):
            out_dir.mkdir(parents=True, exist_ok=True)
            doc, skipped = export_geojson(records)
            geo_path = out_dir / GEOJSON_NAME
            written.append(geo_path)
            geo_path.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
            inc_path = out_dir / INCIDENTS_NAME
            written.append(inc_path)
            inc_path.write_text(
                "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n"
                        for r in sorted(records, key=lambda r: r.post_id)),
                encoding="utf-8",
            )
            extra = {
                "posts": len(posts),
                "analysis_posts": len(records),
                "geocoded_posts": len(records) - skipped,
                "frequency": None if freq is None else {
                    "incident_count": freq.incident_count,
                    "span_days": freq.span_days,
                    "days_per_incident": freq.days_per_incident,
                },
            }
            written.extend(out_dir / n for n in (POST_TYPES_NAME, LINES_NAME, SENTIMENT_NAME,
                                                 REACTIONS_NAME, IMPACT_NAME))
            export_summaries(out_dir, records, line_counts, report, sentiment_labels,
                             reactions, extra)
    except PipelineError:
        for p in written:
            Path(p).unlink(missing_ok=True)
        raise
    return {
        "records": records,
        "geojson_features": len(doc["features"]),
        "skipped": skipped,
        "impact": report,
        "paths": written,
    }
