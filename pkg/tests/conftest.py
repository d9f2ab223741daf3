import json
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import pytest

from tim.ingest import Comment, Post

DATA = Path(__file__).parent / "data"
FIXTURE = Path(str(resources.files("tim").joinpath("data/fixture")))


@pytest.fixture
def fixture_dir():
    return FIXTURE


@pytest.fixture
def data_dir():
    return DATA


def make_post(pid="p1", text="", when=None, reactions=None, comments=(), platform="twitter",
              hashtags=()):
    when = when or datetime(2018, 3, 6, 12, 0, tzinfo=timezone.utc)
    return Post(pid, platform, when, text, tuple(hashtags), dict(reactions or {}), tuple(comments))


def make_comments(n, prefix="c"):
    return tuple(Comment(f"{prefix}{i}", "komentarz") for i in range(n))


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
                    encoding="utf-8")
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
