# Train the incident-type classifier on synthetic operator notices and inspect it.
"""
Trains on 200 generated notices per class, evaluates on a held-out fifth and
prints the confusion matrix.  Then round-trips the model through JSON.

    python3 demos/01_classify_posts.py
"""

import tempfile
from pathlib import Path

from tim import classifier as clf
from tim import synth

docs = synth.incident_corpus(per_class=200, seed=1)
train_docs, test_docs = synth.split(docs)
model = clf.train(train_docs, clf.ClassifierConfig(seed=1), label_set=clf.INCIDENT_LABELS)

result = clf.evaluate(model, test_docs)
print(f"held-out accuracy: {result.accuracy:.3f} on {len(test_docs)} notices")
print("confusion (rows gold, columns predicted):")
width = max(map(len, result.labels))
for label, row in zip(result.labels, result.confusion):
    print(f"  {label:>{width}} " + " ".join(f"{n:3d}" for n in row))

for text in ["Awaria zwrotnicy na ul. Legnickiej, tramwaje kursują objazdem.",
             "Przywrócono ruch tramwajowy na ul. Traugutta.",
             "Koncert na Placu Grunwaldzkim, zmiany tras linii 2 i 10."]:
    pred = clf.predict(model, text)
    print(f"{pred.label:>12} p={pred.probs.max():.2f}  {text}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "incident.model.json"
    clf.save(model, path)
    again = clf.load(path)
    same = all((clf.predict(again, d.text).probs == clf.predict(model, d.text).probs).all()
               for d in test_docs[:50])
    print(f"model file {path.stat().st_size // 1024} KiB, reloaded predictions identical: {same}")
