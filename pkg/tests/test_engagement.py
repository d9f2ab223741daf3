import random

import pytest
from hypothesis import given, strategies as st

from tim import synth
from tim.classifier import SENTIMENT_LABELS, ClassifierConfig, evaluate, train
from tim.engagement import (
    cohen_kappa,
    filter_comments,
    interaction_summary,
    load_annotations,
    pairwise_agreement,
    reaction_distribution,
    sentiment_classify,
    sentiment_distribution,
    strip_emoji,
)
from tim.ingest import Comment, InputError

from conftest import make_comments, make_post


def labels_from_table(table, names=("y", "n")):
    """Two annotator label lists realizing a 2x2 contingency table."""
    a, b = [], []
    for i, row in enumerate(table):
        for j, count in enumerate(row):
            a += [names[i]] * count
            b += [names[j]] * count
    return a, b


def test_filter_examples():
    comments = [Comment("1", "ok"), Comment("2", "dlaczego znowu nie ma tramwaju"),
                Comment("3", "😂😂😂"), Comment("4", ""), Comment("5", "super 👍 szybka informacja dzięki")]
    assert [c.id for c in filter_comments(comments)] == ["2", "5"]


def test_filter_counts_words_after_emoji_removal():
    assert filter_comments([Comment("1", "no 😡 i 😡 co 😡")]) == []
    assert strip_emoji("brawo 👏🏻 MPK") == "brawo  MPK"


@given(st.lists(st.text(alphabet="ab 😀!", max_size=20), max_size=10))
def test_filter_idempotent(texts):
    comments = [Comment(str(i), t) for i, t in enumerate(texts)]
    once = filter_comments(comments)
    assert filter_comments(once) == once
    assert all(c in comments for c in once)


def test_kappa_chance_agreement():
    a, b = labels_from_table([[5, 5], [5, 5]])
    assert cohen_kappa(a, b).kappa == pytest.approx(0.0, abs=1e-12)


def test_kappa_table_example():
    # po = 35/50 = 0.7; pe = (25*30 + 25*20) / 2500 = 0.5; kappa = 0.2 / 0.5
    a, b = labels_from_table([[20, 5], [10, 15]])
    res = cohen_kappa(a, b)
    assert res.observed_agreement == pytest.approx(0.7)
    assert res.expected_agreement == pytest.approx(0.5)
    assert res.kappa == pytest.approx(0.4, abs=1e-9)


def test_kappa_perfect_and_constant():
    assert cohen_kappa(["a", "b", "c"], ["a", "b", "c"]).kappa == 1.0
    assert cohen_kappa(["a"] * 4, ["a"] * 4).kappa == 1.0


@given(st.lists(st.tuples(st.sampled_from("xyz"), st.sampled_from("xyz")), min_size=1, max_size=40))
def test_kappa_symmetric_and_bounded(pairs):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    k1, k2 = cohen_kappa(a, b).kappa, cohen_kappa(b, a).kappa
    assert k1 == pytest.approx(k2, abs=1e-12)
    assert -1.0 - 1e-12 <= k1 <= 1.0 + 1e-12


def test_kappa_errors():
    with pytest.raises(ValueError):
        cohen_kappa(["a"], ["a", "b"])
    with pytest.raises(ValueError):
        cohen_kappa([], [])


def test_annotations_and_pairs(tmp_path):
    path = tmp_path / "ann.csv"
    rows = ["item_id,annotator_id,label"]
    a, b = labels_from_table([[20, 5], [10, 15]])
    for i, (x, y) in enumerate(zip(a, b)):
        rows += [f"i{i},ann1,{x}", f"i{i},ann2,{y}"]
    rows.append("extra,ann3,y")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    pairs = pairwise_agreement(load_annotations(path))
    assert list(pairs) == [("ann1", "ann2")]
    assert pairs[("ann1", "ann2")].kappa == pytest.approx(0.4)


def test_annotations_duplicate_item(tmp_path):
    path = tmp_path / "ann.csv"
    path.write_text("item_id,annotator_id,label\n1,a,x\n1,a,y\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_annotations(path)


@pytest.mark.parametrize("reactions,n_comments,expected", [
    ({"Like": 82}, 144, 226),
    ({"Like": 60, "Haha": 31}, 109, 200),
    ({"Like": 100, "Angry": 5}, 35, 140),
    ({}, 0, 0),
])
def test_interactions(reactions, n_comments, expected):
    post = make_post(reactions=reactions, comments=make_comments(n_comments))
    summary = interaction_summary(post)
    assert summary.interactions == expected
    assert summary.comments_total == n_comments


def test_reaction_distribution_examples():
    groups = {
        "accident": [make_post("a", reactions={"Like": 3}), make_post("b", reactions={"Like": 4, "Sad": 1})],
        "event": [make_post("c", reactions={"Haha": 77, "Like": 28})],
    }
    table = reaction_distribution(groups)
    assert table["accident"] == {"Haha": 0, "Like": 7, "Sad": 1}
    assert table["event"]["Haha"] / sum(table["event"].values()) == 77 / 105
    assert table["fix"] == {"Haha": 0, "Like": 0, "Sad": 0}
    assert list(table)[:2] == ["accident", "event"]


@given(st.lists(st.tuples(st.sampled_from(["accident", "fix", "unknown"]),
                          st.dictionaries(st.sampled_from(["Like", "Wow", "Sad"]), st.integers(0, 50))),
                max_size=20))
def test_reaction_totals_conserved(items):
    groups = {}
    for i, (label, reactions) in enumerate(items):
        groups.setdefault(label, []).append(make_post(str(i), reactions=reactions))
    table = reaction_distribution(groups)
    assert sum(sum(r.values()) for r in table.values()) == sum(sum(r.values()) for _, r in items)


@pytest.fixture(scope="module")
def sentiment_model():
    docs = synth.sentiment_corpus(per_class=200, seed=4)
    tr, te = synth.split(docs)
    model = train(tr, ClassifierConfig(seed=4), label_set=SENTIMENT_LABELS)
    return model, te


def test_sentiment_accuracy(sentiment_model):
    model, test = sentiment_model
    assert evaluate(model, test).accuracy >= 0.95


def test_sentiment_classify(sentiment_model):
    model, _ = sentiment_model
    comments = [Comment("c1", "dziękujemy za szybką informację, świetna robota"),
                Comment("c2", "znowu awaria, skandal i kompletna porażka")]
    assert sentiment_classify(model, comments) == {"c1": "positive", "c2": "negative"}
    assert sentiment_classify(model, []) == {}
    with pytest.raises(ValueError):
        sentiment_classify(model, [Comment("c3", "ok")])


def test_sentiment_rejects_incident_model():
    model = train([("awaria na ul legnickiej", "malfunction"), ("kolizja", "accident")])
    with pytest.raises(ValueError):
        sentiment_classify(model, [])


def test_sentiment_distribution_order():
    dist = sentiment_distribution(["negative", "positive", "negative"])
    assert list(dist.items()) == [("positive", 1), ("neutral", 0), ("negative", 2)]
    rng = random.Random(0)
    labels = [rng.choice(SENTIMENT_LABELS) for _ in range(50)]
    assert sum(sentiment_distribution(labels).values()) == 50
