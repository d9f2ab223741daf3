# Comment sentiment, annotator agreement and reaction statistics.
"""
    python3 demos/04_engagement.py
"""

from datetime import datetime, timezone

from tim import synth
from tim.classifier import SENTIMENT_LABELS, ClassifierConfig, evaluate, train
from tim.engagement import (
    cohen_kappa,
    filter_comments,
    interaction_summary,
    reaction_distribution,
    sentiment_classify,
    sentiment_distribution,
)
from tim.ingest import Comment, Post

train_docs, test_docs = synth.split(synth.sentiment_corpus(per_class=200, seed=3))
model = train(train_docs, ClassifierConfig(seed=3), label_set=SENTIMENT_LABELS)
print(f"sentiment accuracy on held-out comments: {evaluate(model, test_docs).accuracy:.3f}")

comments = [
    Comment("c1", "ok"),
    Comment("c2", "😡😡😡"),
    Comment("c3", "dziękujemy za szybką informację, świetna robota 👍"),
    Comment("c4", "jak długo potrwa objazd przez to skrzyżowanie"),
    Comment("c5", "znowu awaria, skandal i kompletna porażka"),
]
kept = filter_comments(comments)
print(f"kept {len(kept)} of {len(comments)} comments (three words or fewer are dropped)")
labels = sentiment_classify(model, kept)
print(labels, sentiment_distribution(labels.values()))

# two annotators, 50 posts: 20 both yes, 15 both no, 15 disagreements
a = ["yes"] * 20 + ["yes"] * 5 + ["no"] * 10 + ["no"] * 15
b = ["yes"] * 20 + ["no"] * 5 + ["yes"] * 10 + ["no"] * 15
res = cohen_kappa(a, b)
print(f"kappa {res.kappa:.3f} (observed {res.observed_agreement:.2f}, chance {res.expected_agreement:.2f})")

when = datetime(2018, 3, 6, 12, tzinfo=timezone.utc)
post = Post("p1", "facebook", when, "Awaria na ul. Legnickiej", (), {"Like": 70, "Angry": 12},
            tuple(Comment(f"c{i}", "komentarz") for i in range(144)))
s = interaction_summary(post)
print(f"interactions: {s.reactions_total} reactions + {s.comments_total} comments = {s.interactions}")
print(reaction_distribution({"malfunction": [post]}, labels=("malfunction", "accident")))
