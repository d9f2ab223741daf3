"""Command line interface: one subcommand per pipeline stage plus ``run``.

Exit codes: 0 success, 1 input error, 2 internal error.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from zoneinfo import ZoneInfoNotFoundError

from tim import __version__, classifier, engagement, geoparse, impact, ingest, lines, report
from tim.classifier import INCIDENT_LABELS, NON_DISRUPTION_LABELS, SENTIMENT_LABELS
from tim.ingest import InputError

log = logging.getLogger("tim")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


def _write_text(path, text):
    Path(path).write_text(text, encoding="utf-8")


def cmd_train(args):
    labels = INCIDENT_LABELS if args.labels == "incident" else SENTIMENT_LABELS
    docs = classifier.read_corpus(args.input, labels)
    config = classifier.ClassifierConfig(
        embedding_dim=args.dim,
        ngram_order=args.ngrams,
        hash_buckets=args.buckets,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
    )
    model = classifier.train(docs, config, label_set=labels)
    classifier.save(model, args.model)
    log.info("trained on %d documents (%d skipped)", len(docs), model.skipped_docs)


def cmd_classify(args):
    model = classifier.load(args.model)
    posts = ingest.load_posts(args.input, args.hashtag)
    out = []
    for post in posts:
        pred = classifier.predict(model, post.text)
        record = post.to_dict()
        record["label"] = pred.label
        if pred.no_features:
            record["no_features"] = True
        out.append(json.dumps(record, ensure_ascii=False) + "\n")
    _write_text(args.out, "".join(out))


def _read_labeled(path):
    pairs = []
    for lineno, record in ingest.iter_jsonl(path):
        try:
            post = ingest.parse_post(record)
        except ValueError as exc:
            raise InputError(f"malformed post: {exc}", path, lineno) from None
        label = record.get("label")
        if label not in INCIDENT_LABELS:
            raise InputError(f"missing or unknown label {label!r}", path, lineno)
        pairs.append((post, label))
    return pairs


def cmd_geoparse(args):
    toponyms = ingest.load_gazetteer(args.gazetteer)
    if args.stops:
        toponyms += ingest.load_gtfs_stops(args.stops)
    gaz = ingest.build_gazetteer(toponyms)
    lexicon = geoparse.load_triggers(args.triggers) if args.triggers else geoparse.default_lexicon()
    registry = lines.load_registry(args.registry) if args.registry else None
    out = []
    unmatched = 0
    for post, label in _read_labeled(args.posts):
        if args.analysis_filter and label in NON_DISRUPTION_LABELS:
            continue
        locs = geoparse.geocode_post(post, gaz, lexicon, args.threshold)
        unmatched += not locs
        rec = report.IncidentRecord(
            post_id=post.id,
            label=label,
            published_at=post.published_at,
            locations=tuple(locs),
            lines=frozenset(lines.extract_line_mentions(post.text, registry)) if registry else frozenset(),
            interactions=engagement.interaction_summary(post),
        )
        out.append(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
    _write_text(args.out, "".join(out))
    log.info("%d post(s) without a resolved location", unmatched)


def cmd_lines(args):
    registry = lines.load_registry(args.registry)
    posts = ingest.load_posts(args.posts, args.hashtag)
    _write_text(args.out, report.line_mentions_csv(lines.count_line_mentions(posts, registry)))


def _read_incidents(path):
    records = []
    for lineno, raw in ingest.iter_jsonl(path):
        try:
            records.append(report.IncidentRecord.from_dict(raw))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed incident record: {exc}", path, lineno) from None
    return records


def cmd_impact(args):
    regions, flows = ingest.load_regions_and_flows(args.regions, args.flows)
    records = _read_incidents(args.incidents)
    rep = impact.estimate_impact([(r.locations, r.published_at) for r in records],
                                 regions, flows, args.tz)
    doc = rep.to_dict()
    if records:
        freq = impact.frequency_stats([r.published_at for r in records])
        doc["frequency"] = {
            "incident_count": freq.incident_count,
            "span_days": freq.span_days,
            "days_per_incident": freq.days_per_incident,
        }
    _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_agreement(args):
    annotations = engagement.load_annotations(args.input)
    pairs = engagement.pairwise_agreement(annotations)
    doc = {
        "pairs": [
            {
                "annotator_a": a,
                "annotator_b": b,
                "kappa": res.kappa,
                "observed_agreement": res.observed_agreement,
                "expected_agreement": res.expected_agreement,
            }
            for (a, b), res in pairs.items()
        ],
    }
    if pairs:
        doc["mean_kappa"] = sum(r.kappa for r in pairs.values()) / len(pairs)
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")


def cmd_sentiment(args):
    model = classifier.load(args.model)
    posts = ingest.load_posts(args.posts, args.hashtag)
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        f.write("# columns: post_id,comment_id,sentiment; rows: post time order, then comment order\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("post_id", "comment_id", "sentiment"))
        for post in posts:
            kept = engagement.filter_comments(post.comments)
            for cid, label in engagement.sentiment_classify(model, kept).items():
                writer.writerow((post.id, cid, label))


def cmd_run(args):
    overrides = {"seed": args.seed, "timezone": args.tz}
    if args.out_dir:
        overrides["out_dir"] = str(Path(args.out_dir).resolve())
    config = report.load_config(args.config, **overrides)
    result = report.run_pipeline(config)
    log.info("%d feature(s) written, %d record(s) without location",
             result["geojson_features"], result["skipped"])


def _global_options(defaults):
    parent = argparse.ArgumentParser(add_help=False)
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    parent.add_argument("--seed", type=int, help="random seed for training", **kw)
    parent.add_argument("--tz", help="timezone for civil dates and hours (e.g. Europe/Warsaw)", **kw)
    parent.add_argument("-v", "--verbose", action="store_true", **kw)
    return parent


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tim", description="Mine transit incident reports from social-media posts.",
        parents=[_global_options(defaults=True)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_options(defaults=False)]

    p = sub.add_parser("train", parents=common, help="train a classifier")
    p.add_argument("--labels", choices=("incident", "sentiment"), required=True)
    p.add_argument("--in", dest="input", required=True, help="JSONL of {text, label}")
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--ngrams", type=int, default=2)
    p.add_argument("--buckets", type=int, default=2**18)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=10)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", parents=common, help="label posts with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hashtag", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("geoparse", parents=common, help="geocode labeled posts")
    p.add_argument("--posts", required=True, help="labeled posts JSONL")
    p.add_argument("--gazetteer", required=True)
    p.add_argument("--stops", help="optional GTFS stops.txt")
    p.add_argument("--triggers", help="trigger lexicon (default: bundled)")
    p.add_argument("--registry", help="optional lines.csv to fill record line ids")
    p.add_argument("--threshold", type=float, default=geoparse.DEFAULT_THRESHOLD)
    p.add_argument("--no-analysis-filter", dest="analysis_filter", action="store_false")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_geoparse)

    p = sub.add_parser("lines", parents=common, help="count posts per transit line")
    p.add_argument("--posts", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--hashtag", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("impact", parents=common, help="estimate passenger impact")
    p.add_argument("--incidents", required=True)
    p.add_argument("--regions", required=True)
    p.add_argument("--flows", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("agreement", parents=common, help="pairwise Cohen's kappa")
    p.add_argument("--in", dest="input", required=True, help="CSV item_id,annotator_id,label")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("sentiment", parents=common, help="classify comment sentiment")
    p.add_argument("--model", required=True)
    p.add_argument("--posts", required=True)
    p.add_argument("--hashtag", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sentiment)

    p = sub.add_parser("run", parents=common, help="run the whole pipeline")
    p.add_argument("--config", required=True, help="TOML key/value config file")
    p.add_argument("--out-dir", help="override the configured output directory")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command != "run":
        if args.seed is None:
            args.seed = 0
        if args.tz is None:
            args.tz = impact.DEFAULT_TZ
    try:
        args.func(args)
    except report.PipelineError as exc:
        print(f"tim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT if exc.is_input_error else EXIT_INTERNAL
    except (InputError, OSError, ValueError, ZoneInfoNotFoundError) as exc:
        print(f"tim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"tim: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
