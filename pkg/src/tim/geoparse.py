"""Spatial mention detection and gazetteer matching for operator posts.

Mentions are found with a trigger lexicon: words such as ``ul.`` or ``na``
that usually precede a place name.  The capitalized (or digit-bearing) token
run after a trigger is the candidate, and it is resolved against the
gazetteer by normalized Levenshtein distance.  Polish place names are heavily
inflected, so the gazetteer name may lose up to three trailing characters
before comparison.
"""

from dataclasses import dataclass
from importlib import resources

from tim.ingest import Toponym, read_lines
from tim.text import normalize_name, token_spans

DEFAULT_THRESHOLD = 0.3
DEFAULT_MAX_SPAN = 4
MAX_TRUNCATION = 3
KIND_PRIORITY = {"stop": 0, "intersection": 1, "street": 2}


@dataclass(frozen=True)
class TriggerLexicon:
    triggers: tuple
    max_span: int = DEFAULT_MAX_SPAN

    def __post_init__(self):
        if not self.triggers:
            raise ValueError("trigger lexicon is empty")
        if any(not t for t in self.triggers):
            raise ValueError("empty trigger")
        if self.max_span < 1:
            raise ValueError("max_span must be positive")

    @classmethod
    def from_strings(cls, lines, max_span=DEFAULT_MAX_SPAN):
        """Lexicon from trigger phrases; each phrase is split into lowercase tokens."""
        triggers = []
        for line in lines:
            toks = tuple(tok.lower() for tok, _, _ in token_spans(line))
            if not toks:
                raise ValueError(f"trigger {line!r} has no tokens")
            if toks not in triggers:
                triggers.append(toks)
        return cls(tuple(triggers), max_span)


@dataclass(frozen=True)
class SpatialMention:
    surface: tuple
    char_span: tuple
    trigger: tuple


@dataclass(frozen=True)
class MatchResult:
    toponym: Toponym
    score: float
    mention: SpatialMention


@dataclass(frozen=True)
class IncidentLocation:
    lat: float
    lon: float
    source_kind: str
    confidence: float
    name: str = ""

    def to_dict(self):
        return {
            "lat": self.lat,
            "lon": self.lon,
            "source_kind": self.source_kind,
            "confidence": self.confidence,
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["lat"]), float(d["lon"]), d["source_kind"],
                   float(d["confidence"]), d.get("name", ""))


def load_triggers(path, max_span=DEFAULT_MAX_SPAN):
    """Read a ``triggers.txt`` file (one trigger phrase per line)."""
    return TriggerLexicon.from_strings(read_lines(path), max_span)


def default_lexicon():
    text = resources.files("tim").joinpath("data/triggers.txt").read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return TriggerLexicon.from_strings(lines)


def edit_distance(a, b):
    """Levenshtein distance with unit costs over code points."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _candidate_token(tok):
    return tok[0].isupper() or any(ch.isdigit() for ch in tok)


def detect_mentions(text, lexicon):
    """Candidate place mentions following trigger phrases, scanned left to right."""
    spans = token_spans(text)
    lowered = [tok.lower() for tok, _, _ in spans]
    mentions = []
    for i in range(len(spans)):
        for trigger in lexicon.triggers:
            k = len(trigger)
            if tuple(lowered[i:i + k]) != trigger:
                continue
            j = i + k
            run_end = j
            while run_end < len(spans) and run_end - j < lexicon.max_span \
                    and _candidate_token(spans[run_end][0]):
                run_end += 1
            if run_end > j:
                mentions.append(SpatialMention(
                    tuple(lowered[j:run_end]),
                    (spans[j][1], spans[run_end - 1][2]),
                    trigger,
                ))
    return mentions


def name_score(mention_name, entry_name):
    """Normalized distance between two normalized names, minimized over suffix truncation.

    The entry name may drop 0..3 trailing characters; each variant's distance
    is divided by the longer of the two compared lengths.
    """
    if not mention_name and not entry_name:
        return 0.0
    best = None
    for t in range(MAX_TRUNCATION + 1):
        if t and len(entry_name) - t < 1:
            break
        stem = entry_name[:len(entry_name) - t] if t else entry_name
        score = edit_distance(mention_name, stem) / max(len(mention_name), len(stem))
        if best is None or score < best:
            best = score
    return best


def _rank(score, entry, position):
    return (score, KIND_PRIORITY[entry.kind], entry.name, position)


def match_toponym(mention, gaz, threshold=DEFAULT_THRESHOLD):
    """Best gazetteer entry for ``mention`` if its score is within ``threshold``.

    Ties are broken by score, then kind (stop, intersection, street), then
    name, then gazetteer order.
    """
    if not len(gaz):
        raise ValueError("gazetteer is empty")
    target = normalize_name(" ".join(mention.surface))
    best = None
    for key, positions in gaz.normalized_index.items():
        score = name_score(target, key)
        if score > threshold:
            continue
        for pos in positions:
            rank = _rank(score, gaz.entries[pos], pos)
            if best is None or rank < best[0]:
                best = (rank, pos)
    if best is None:
        return None
    (score, *_), pos = best
    return MatchResult(gaz.entries[pos], score, mention)


def _sub_mentions(mention):
    # the run after a trigger may swallow following capitalized words, so
    # shorter prefixes are tried when the full run has no match
    for n in range(len(mention.surface), 0, -1):
        if n == len(mention.surface):
            yield mention
        else:
            yield SpatialMention(mention.surface[:n], mention.char_span, mention.trigger)


def resolve_mention(mention, gaz, threshold=DEFAULT_THRESHOLD):
    """Match the longest prefix of the mention's token run that resolves."""
    for candidate in _sub_mentions(mention):
        result = match_toponym(candidate, gaz, threshold)
        if result is not None:
            return result
    return None


def geocode_text(text, gaz, lexicon, threshold=DEFAULT_THRESHOLD):
    """Match results for ``text``, one per distinct toponym, in mention order."""
    if not len(gaz):
        return []
    results = []
    seen = set()
    for mention in detect_mentions(text, lexicon):
        result = resolve_mention(mention, gaz, threshold)
        if result is None:
            continue
        if result.toponym not in seen:
            seen.add(result.toponym)
            results.append(result)
    return results


def geocode_post(post, gaz, lexicon, threshold=DEFAULT_THRESHOLD):
    return [
        IncidentLocation(r.toponym.lat, r.toponym.lon, r.toponym.kind, 1.0 - r.score, r.toponym.name)
        for r in geocode_text(post.text, gaz, lexicon, threshold)
    ]
