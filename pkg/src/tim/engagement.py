"""Comment filtering, sentiment labeling, annotator agreement and reaction statistics."""

import csv
import itertools
import re
from collections import Counter, defaultdict
from dataclasses import dataclass

from tim.classifier import INCIDENT_LABELS, SENTIMENT_LABELS, predict
from tim.ingest import InputError
from tim.text import tokenize

MIN_COMMENT_WORDS = 4

_EMOJI_RE = re.compile(
    "["
    "\U0001F1E6-\U0001F1FF"  # regional indicators (flags)
    "\U0001F300-\U0001F5FF"  # symbols and pictographs, skin tones
    "\U0001F600-\U0001F64F"  # emoticons
    "\U0001F680-\U0001F6FF"  # transport and map
    "\U0001F780-\U0001F7FF"  # geometric shapes extended
    "\U0001F900-\U0001F9FF"  # supplemental symbols and pictographs
    "\U0001FA70-\U0001FAFF"  # symbols and pictographs extended-A
    "\u2600-\u27BF"  # misc symbols, dingbats
    "\u200D\uFE0F\u20E3"  # zero-width joiner, emoji presentation, keycap
    "]"
)


@dataclass(frozen=True)
class InteractionSummary:
    post_id: str
    reactions_total: int
    comments_total: int
    interactions: int
    reaction_breakdown: dict


@dataclass(frozen=True)
class AgreementResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float


def strip_emoji(text):
    return _EMOJI_RE.sub("", text)


def _is_substantive(comment):
    return len(tokenize(strip_emoji(comment.text))) >= MIN_COMMENT_WORDS


def filter_comments(comments):
    """Drop comments with three or fewer words once emoji are removed.

    Emoji-only comments and image-only comments (empty text) are dropped by
    the same rule.
    """
    return [c for c in comments if _is_substantive(c)]


def sentiment_classify(model, comments):
    """Map comment id to sentiment label; comments must already pass :func:`filter_comments`."""
    if set(model.label_set) != set(SENTIMENT_LABELS):
        raise ValueError(f"model labels {model.label_set} are not sentiment labels")
    out = {}
    for c in comments:
        if not _is_substantive(c):
            raise ValueError(f"comment {c.id!r} is too short; filter comments first")
        out[c.id] = predict(model, c.text).label
    return out


def sentiment_distribution(labels):
    """Counts per sentiment label in the fixed order positive, neutral, negative."""
    counts = Counter(labels)
    return {lab: counts.get(lab, 0) for lab in SENTIMENT_LABELS}


def cohen_kappa(labels_a, labels_b):
    """Cohen's kappa for two annotators labeling the same items.

    When both annotators use one and the same label throughout, expected
    agreement is 1 and kappa is defined as 1.
    """
    labels_a, labels_b = list(labels_a), list(labels_b)
    if len(labels_a) != len(labels_b):
        raise ValueError(f"label lists differ in length ({len(labels_a)} != {len(labels_b)})")
    n = len(labels_a)
    if n == 0:
        raise ValueError("need at least one labeled item")
    po = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    ca, cb = Counter(labels_a), Counter(labels_b)
    pe = sum(ca[k] * cb[k] for k in ca) / (n * n)
    if pe >= 1.0:
        return AgreementResult(1.0, po, pe)
    return AgreementResult((po - pe) / (1.0 - pe), po, pe)


def load_annotations(path):
    """Read ``item_id,annotator_id,label`` rows into ``{annotator: {item: label}}``."""
    with open(path, encoding="utf-8-sig", newline="") as f:
        reader = csv.DictReader(f)
        fields = [c.strip() for c in reader.fieldnames or []]
        reader.fieldnames = fields
        for col in ("item_id", "annotator_id", "label"):
            if col not in fields:
                raise InputError(f"missing column {col!r}", path)
        table = defaultdict(dict)
        for rowno, row in enumerate(reader, start=2):
            annotator, item = row["annotator_id"].strip(), row["item_id"].strip()
            if item in table[annotator]:
                raise InputError(f"annotator {annotator!r} labels item {item!r} twice", path, rowno)
            table[annotator][item] = row["label"].strip()
    return dict(table)


def pairwise_agreement(annotations):
    """Kappa for every annotator pair over the items both labeled, keyed ``(a, b)`` sorted."""
    results = {}
    for a, b in itertools.combinations(sorted(annotations), 2):
        shared = sorted(set(annotations[a]) & set(annotations[b]))
        if not shared:
            continue
        results[(a, b)] = cohen_kappa(
            [annotations[a][i] for i in shared], [annotations[b][i] for i in shared]
        )
    return results


def interaction_summary(post):
    reactions = sum(post.reactions.values())
    comments = len(post.comments)
    return InteractionSummary(post.id, reactions, comments, reactions + comments, dict(post.reactions))


def reaction_distribution(groups, labels=INCIDENT_LABELS):
    """Sum of reaction counts per label and reaction kind.

    ``groups`` maps a label to its posts.  Every label in ``labels`` gets a row
    (all zeros when it has no posts); columns are the union of reaction kinds,
    sorted.
    """
    kinds = sorted({k for posts in groups.values() for p in posts for k in p.reactions})
    table = {}
    for label in list(labels) + sorted(set(groups) - set(labels)):
        row = dict.fromkeys(kinds, 0)
        for post in groups.get(label, ()):
            for kind, count in post.reactions.items():
                row[kind] += count
        table[label] = row
    return table
