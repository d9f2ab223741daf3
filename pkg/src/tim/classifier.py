"""Linear text classifier over averaged word and hashed word-n-gram embeddings.

A document is represented by the mean of the embedding rows of its features:
one vocabulary row per token plus one hashed bucket row per contiguous word
n-gram of order 2..``ngram_order``.  A single softmax layer maps that mean to
class probabilities.  Training is plain per-document SGD on cross-entropy with
a linearly decaying learning rate, so a model is a deterministic function of
the corpus order, the configuration and the seed.

The same model type serves the seven-class incident typology and the
three-class comment sentiment task.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from tim.text import tokenize

log = logging.getLogger(__name__)

INCIDENT_LABELS = ("accident", "event", "fix", "incident", "malfunction", "renovation", "unknown")
SENTIMENT_LABELS = ("positive", "neutral", "negative")
# Planned-change and restoration notices, not disruptions.
NON_DISRUPTION_LABELS = frozenset({"event", "renovation", "fix"})

MODEL_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data):
    """64-bit FNV-1a hash of ``data`` (bytes or str, the latter UTF-8 encoded)."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class ClassifierConfig:
    embedding_dim: int = 32
    ngram_order: int = 2
    hash_buckets: int = 2**18
    learning_rate: float = 0.1
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("embedding_dim", "hash_buckets", "epochs"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.ngram_order < 1:
            raise ValueError("ngram_order must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class LabeledDoc:
    text: str
    label: str


@dataclass
class TextModel:
    label_set: tuple
    vocab: dict
    input_embeddings: np.ndarray
    output_weights: np.ndarray
    config: ClassifierConfig
    # Rows that differ from their seeded initial values; only these are serialized.
    trained_rows: frozenset = field(default_factory=frozenset)
    skipped_docs: int = 0


class Prediction(NamedTuple):
    label: str
    probs: np.ndarray
    no_features: bool = False


class Evaluation(NamedTuple):
    accuracy: float
    confusion: np.ndarray
    labels: tuple


def featurize(tokens, config, vocab):
    """Embedding row indices for ``tokens``.

    Each in-vocabulary token contributes its vocabulary row, immediately
    followed by one hashed row per n-gram (order 2..ngram_order) starting at
    that token.  Hashed rows are offset past the vocabulary rows.
    Out-of-vocabulary tokens contribute no unigram row but still take part
    in n-grams.
    """
    offset = len(vocab)
    out = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        row = vocab.get(tok)
        if row is not None:
            out.append(row)
        for order in range(2, config.ngram_order + 1):
            if i + order > n:
                break
            gram = " ".join(tokens[i:i + order])
            out.append(offset + fnv1a_64(gram) % config.hash_buckets)
    return out


def _initial_embeddings(n_rows, config):
    rng = np.random.default_rng(config.seed % 2**64)
    bound = 1.0 / config.embedding_dim
    return rng.uniform(-bound, bound, size=(n_rows, config.embedding_dim))


def softmax(z):
    z = z - np.max(z)
    e = np.exp(z)
    return e / e.sum()


def _as_doc(doc):
    if isinstance(doc, LabeledDoc):
        return doc
    text, label = doc
    return LabeledDoc(text, label)


def build_vocab(token_lists):
    vocab = {}
    for tokens in token_lists:
        for tok in tokens:
            if tok not in vocab:
                vocab[tok] = len(vocab)
    return vocab


def train(corpus, config=None, label_set=None):
    """Fit a :class:`TextModel` on labeled documents.

    ``label_set`` fixes the label order (and thus tie-breaking); by default it
    is the sorted set of labels seen in ``corpus``.  Documents without any
    feature are skipped and counted in ``model.skipped_docs``.
    """
    config = config or ClassifierConfig()
    docs = [_as_doc(d) for d in corpus]
    if not docs:
        raise ValueError("cannot train on an empty corpus")
    labels = tuple(label_set) if label_set is not None else tuple(sorted({d.label for d in docs}))
    if len(set(labels)) != len(labels):
        raise ValueError("label_set contains duplicates")
    label_index = {lab: i for i, lab in enumerate(labels)}
    for d in docs:
        if d.label not in label_index:
            raise ValueError(f"label {d.label!r} not in label set {labels}")

    token_lists = [tokenize(d.text) for d in docs]
    vocab = build_vocab(token_lists)
    examples = []
    skipped = 0
    for d, tokens in zip(docs, token_lists):
        feats = featurize(tokens, config, vocab)
        if not feats:
            skipped += 1
            continue
        examples.append((np.asarray(feats, dtype=np.int64), label_index[d.label]))
    if skipped:
        log.warning("skipped %d document(s) with no features", skipped)
    if not examples:
        raise ValueError("no document in the corpus has any feature")

    E = _initial_embeddings(len(vocab) + config.hash_buckets, config)
    W = np.zeros((len(labels), config.embedding_dim))
    total = config.epochs * len(examples)
    step = 0
    for _ in range(config.epochs):
        for feats, y in examples:
            lr = config.learning_rate * (1.0 - step / total)
            step += 1
            h = E[feats].mean(axis=0)
            g = softmax(W @ h)
            g[y] -= 1.0
            grad_h = W.T @ g
            W -= lr * np.outer(g, h)
            np.add.at(E, feats, -(lr / len(feats)) * grad_h)

    touched = frozenset(int(i) for feats, _ in examples for i in feats)
    E.setflags(write=False)
    W.setflags(write=False)
    return TextModel(labels, vocab, E, W, config, touched, skipped)


def document_vector(model, text):
    """Mean feature embedding of ``text`` or ``None`` when it has no features."""
    feats = featurize(tokenize(text), model.config, model.vocab)
    if not feats:
        return None
    return model.input_embeddings[feats].mean(axis=0)


def predict(model, text):
    """Most probable label for ``text`` with the full probability vector.

    Ties go to the earliest label in ``model.label_set``.  Text with no known
    feature gets uniform probabilities, the first label and ``no_features``.
    """
    h = document_vector(model, text)
    k = len(model.label_set)
    if h is None:
        return Prediction(model.label_set[0], np.full(k, 1.0 / k), True)
    probs = softmax(model.output_weights @ h)
    return Prediction(model.label_set[int(np.argmax(probs))], probs)


def evaluate(model, test):
    """Accuracy and confusion matrix (rows: gold, columns: predicted)."""
    docs = [_as_doc(d) for d in test]
    if not docs:
        raise ValueError("test set is empty")
    index = {lab: i for i, lab in enumerate(model.label_set)}
    confusion = np.zeros((len(index), len(index)), dtype=np.int64)
    for d in docs:
        if d.label not in index:
            raise ValueError(f"label {d.label!r} not in model label set")
        confusion[index[d.label], index[predict(model, d.text).label]] += 1
    return Evaluation(float(np.trace(confusion)) / len(docs), confusion, model.label_set)


def cross_entropy(model, docs, output_weights=None):
    """Mean cross-entropy of ``docs`` under the model (optionally other output weights)."""
    W = model.output_weights if output_weights is None else output_weights
    index = {lab: i for i, lab in enumerate(model.label_set)}
    losses = []
    for d in map(_as_doc, docs):
        h = document_vector(model, d.text)
        if h is None:
            continue
        z = W @ h
        zmax = np.max(z)
        losses.append(zmax + np.log(np.exp(z - zmax).sum()) - z[index[d.label]])
    return float(np.mean(losses))


def output_weight_gradient(model, docs, output_weights=None):
    """Analytic gradient of :func:`cross_entropy` with respect to the output weights."""
    W = model.output_weights if output_weights is None else output_weights
    index = {lab: i for i, lab in enumerate(model.label_set)}
    grad = np.zeros_like(W, dtype=float)
    n = 0
    for d in map(_as_doc, docs):
        h = document_vector(model, d.text)
        if h is None:
            continue
        g = softmax(W @ h)
        g[index[d.label]] -= 1.0
        grad += np.outer(g, h)
        n += 1
    return grad / n


def to_json(model):
    """Serialize ``model`` to the JSON model document (deterministic text)."""
    rows = sorted(model.trained_rows)
    doc = {
        "version": MODEL_VERSION,
        "config": asdict(model.config),
        "label_set": list(model.label_set),
        "vocab": dict(model.vocab),
        "input_embeddings": {
            "shape": list(model.input_embeddings.shape),
            "init": "seeded-uniform",
            "rows": {str(r): model.input_embeddings[r].tolist() for r in rows},
        },
        "output_weights": model.output_weights.tolist(),
    }
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def from_json(text):
    doc = json.loads(text)
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    config = ClassifierConfig(**doc["config"])
    emb = doc["input_embeddings"]
    n_rows, dim = emb["shape"]
    vocab = doc["vocab"]
    if n_rows != len(vocab) + config.hash_buckets or dim != config.embedding_dim:
        raise ValueError("embedding shape does not match vocab and config")
    E = _initial_embeddings(n_rows, config)
    for r, values in emb["rows"].items():
        E[int(r)] = values
    W = np.asarray(doc["output_weights"], dtype=float).reshape(len(doc["label_set"]), dim)
    E.setflags(write=False)
    W.setflags(write=False)
    return TextModel(
        tuple(doc["label_set"]), vocab, E, W, config,
        frozenset(int(r) for r in emb["rows"]),
    )


def save(model, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_json(model))


def load(path):
    with open(path, encoding="utf-8") as f:
        return from_json(f.read())


def read_corpus(path, label_set=None):
    """Labeled documents from a JSONL file of ``{"text": ..., "label": ...}`` objects."""
    from tim.ingest import InputError, iter_jsonl

    docs = []
    for lineno, record in iter_jsonl(path):
        if not isinstance(record, dict) or not isinstance(record.get("text"), str) \
                or not isinstance(record.get("label"), str):
            raise InputError("record needs string fields 'text' and 'label'", path, lineno)
        if label_set is not None and record["label"] not in label_set:
            raise InputError(f"unknown label {record['label']!r}", path, lineno)
        docs.append(LabeledDoc(record["text"], record["label"]))
    return docs
