"""Tokenization and name normalization shared by the classifier and geoparser."""

import re

# Letters (with diacritics) and digits; underscore is a word char for \w so it is excluded.
_TOKEN_RE = re.compile(r"[^\W_]+")
_SPACE_RE = re.compile(r"\s+")

DEFAULT_STRIP_PREFIXES = ("ul", "pl", "al")


def tokenize(text):
    """Lowercased letter/digit runs of ``text``; everything else separates tokens."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def token_spans(text):
    """Tokens of ``text`` in their original case with ``(start, end)`` offsets."""
    return [(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def normalize_name(s, strip_prefixes=DEFAULT_STRIP_PREFIXES):
    """Canonical form of a place name used for gazetteer keys and matching.

    Lowercases, collapses whitespace runs and drops one leading generic
    abbreviation such as ``ul.`` (street) when it is followed by more text.
    Diacritics are kept.

    >>> normalize_name("Ul.  Legnicka")
    'legnicka'
    >>> normalize_name("PLAC GRUNWALDZKI")
    'plac grunwaldzki'
    """
    s = _SPACE_RE.sub(" ", s.lower()).strip()
    head, sep, rest = s.partition(" ")
    if sep and head.rstrip(".") in strip_prefixes:
        return rest
    if "." in head:
        # "ul.legnicka" written without a space
        word, _, tail = head.partition(".")
        if word in strip_prefixes and tail:
            return (tail + sep + rest).strip()
    return s
