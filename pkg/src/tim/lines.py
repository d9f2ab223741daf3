"""Transit line mentions: which lines a post names and how many posts name each line."""

from collections import Counter
from dataclasses import dataclass

from tim.ingest import InputError, load_registry_rows
from tim.text import tokenize

MODES = ("tram", "bus")


@dataclass(frozen=True)
class LineRegistry:
    lines: dict
    aliases: dict

    def __post_init__(self):
        for line_id, mode in self.lines.items():
            if mode not in MODES:
                raise ValueError(f"line {line_id!r} has unknown mode {mode!r}")
        # token -> line id, built once
        table = {}
        for line_id in self.lines:
            for spelling in (line_id, *self.aliases.get(line_id, ())):
                for tok in tokenize(spelling):
                    table.setdefault(tok, line_id)
        object.__setattr__(self, "_by_token", table)

    @classmethod
    def from_pairs(cls, pairs, aliases=None):
        lines = {}
        for line_id, mode in pairs:
            line_id = str(line_id)
            if line_id in lines:
                raise ValueError(f"duplicate line id {line_id!r}")
            lines[line_id] = mode
        return cls(lines, {str(k): tuple(v) for k, v in (aliases or {}).items()})

    def __len__(self):
        return len(self.lines)


@dataclass(frozen=True)
class LineMentionCount:
    line_id: str
    mode: str
    post_count: int


def load_registry(path):
    """Read a ``line_id,mode[,aliases]`` CSV; aliases are ``;``-separated."""
    lines, aliases = {}, {}
    for line_id, mode, alias, rowno in load_registry_rows(path):
        if line_id in lines:
            raise InputError(f"duplicate line id {line_id!r}", path, rowno)
        if mode not in MODES:
            raise InputError(f"unknown mode {mode!r}", path, rowno)
        lines[line_id] = mode
        if alias:
            aliases[line_id] = alias
    return LineRegistry(lines, aliases)


def extract_line_mentions(text, registry):
    """Set of registered line ids named by a token of ``text``.

    Numbers that are not registered lines (delay minutes, dates) are ignored.
    """
    table = registry._by_token
    return {table[tok] for tok in tokenize(text) if tok in table}


def _line_sort_key(line_id):
    # numeric ids in numeric order, then everything else lexicographically
    return (0, int(line_id), "") if line_id.isdigit() else (1, 0, line_id)


def count_line_mentions(posts, registry):
    """Distinct-post mention counts for every registered line, most mentioned first."""
    counts = Counter({line_id: 0 for line_id in registry.lines})
    for post in posts:
        text = post if isinstance(post, str) else post.text
        counts.update(extract_line_mentions(text, registry))
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], _line_sort_key(kv[0])))
    return [LineMentionCount(line_id, registry.lines[line_id], n) for line_id, n in ordered]
