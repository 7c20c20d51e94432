"""Corpus ingestion: documents, tokenization, and the TF-IDF matrix.

Documents arrive as newline-delimited JSON records with string fields
``id``, ``title``, ``abstract``, and an ``attributes`` map of facet
name to a list of string values (country, author, material, ...).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DataError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# enough to keep glue words out of topic signatures without losing
# domain terms; callers can pass their own list
DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again all also an and any are as at be because been
    before being below between both but by can could did do does doing down
    during each few first for from further had has have having here how if
    in into is it its itself more most no nor not of off on once only or
    other our out over own same several should so some such than that the
    their theirs them then there these they this those through to too under
    until up very was we were what when where which while who whom why will
    with would
    """.split()
)


@dataclass(frozen=True)
class Document:
    """One corpus record; ``attributes`` maps facet name to value list."""

    doc_id: str
    title: str
    abstract: str
    attributes: dict = field(default_factory=dict)

    @property
    def text(self) -> str:
        return f"{self.title} {self.abstract}".strip()

    def facet_values(self, facet: str) -> tuple:
        return tuple(self.attributes.get(facet, ()))


@dataclass(frozen=True)
class Vocabulary:
    """Ordered unique term list with per-term document frequencies."""

    terms: tuple
    document_frequency: dict

    def __len__(self):
        return len(self.terms)

    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.terms)}


def tokenize(text: str, stopwords=DEFAULT_STOPWORDS) -> list:
    """Lowercase alphanumeric tokens, letters and digits kept together
    (so formula-like tokens such as "nbse2" survive whole); tokens
    shorter than 2 characters and stopwords are dropped."""
    if not text:
        return []
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) >= 2 and t not in stopwords]


def build_tfidf(
    docs,
    min_df: int = 1,
    max_df_fraction: float = 1.0,
    stopwords=DEFAULT_STOPWORDS,
):
    """TF-IDF matrix (documents x terms) and its vocabulary.

    tf is the raw in-document count, idf = ln((1+N)/(1+df)) + 1, and
    rows are L2-normalized. Terms with df < min_df or df >
    max_df_fraction * N are dropped. Term columns are ordered by sorted
    term string, so the output is independent of document order up to
    row permutation.
    """
    docs = list(docs)
    n_docs = len(docs)
    if n_docs < 2:
        raise ArgumentError("need at least 2 documents")
    if min_df < 1:
        raise ArgumentError("min_df must be >= 1")
    if not (0 < max_df_fraction <= 1):
        raise ArgumentError("max_df_fraction must be in (0, 1]")

    doc_tokens = [tokenize(doc.text, stopwords) for doc in docs]
    df = {}
    for tokens in doc_tokens:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1

    max_df = max_df_fraction * n_docs
    terms = tuple(sorted(t for t, d in df.items() if min_df <= d <= max_df))
    if not terms:
        raise DataError("no terms survive the document-frequency filters")
    term_idx = {t: i for i, t in enumerate(terms)}

    X = np.zeros((n_docs, len(terms)))
    for i, tokens in enumerate(doc_tokens):
        for term in tokens:
            j = term_idx.get(term)
            if j is not None:
                X[i, j] += 1.0

    idf = np.log((1.0 + n_docs) / (1.0 + np.array([df[t] for t in terms]))) + 1.0
    X *= idf
    norms = np.linalg.norm(X, axis=1)
    nonzero = norms > 0
    X[nonzero] /= norms[nonzero, None]

    vocab = Vocabulary(terms=terms, document_frequency={t: df[t] for t in terms})
    return X, vocab


def _validate_record(record, line_no: int) -> Document:
    if not isinstance(record, dict):
        raise ArgumentError(f"line {line_no}: record is not an object")
    for key in ("id", "title", "abstract"):
        if not isinstance(record.get(key), str):
            raise ArgumentError(f"line {line_no}: missing or non-string field {key!r}")
    if not (record["title"].strip() or record["abstract"].strip()):
        raise ArgumentError(f"line {line_no}: title and abstract are both empty")
    attributes = record.get("attributes", {})
    if not isinstance(attributes, dict):
        raise ArgumentError(f"line {line_no}: attributes must be an object")
    clean = {}
    for facet, values in attributes.items():
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise ArgumentError(
                f"line {line_no}: attribute {facet!r} must be a list of strings"
            )
        clean[str(facet)] = tuple(values)
    return Document(
        doc_id=record["id"],
        title=record["title"],
        abstract=record["abstract"],
        attributes=clean,
    )


def load_corpus(path) -> list:
    """Parse a newline-delimited JSON corpus file.

    Malformed records are rejected with their line number.
    """
    docs = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ArgumentError(f"line {line_no}: invalid JSON ({exc.msg})") from None
            doc = _validate_record(record, line_no)
            if doc.doc_id in seen:
                raise ArgumentError(f"line {line_no}: duplicate doc id {doc.doc_id!r}")
            seen.add(doc.doc_id)
            docs.append(doc)
    if not docs:
        raise DataError(f"corpus file {path} contains no records")
    return docs


def save_corpus(docs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps(
                    {
                        "id": doc.doc_id,
                        "title": doc.title,
                        "abstract": doc.abstract,
                        "attributes": {k: list(v) for k, v in doc.attributes.items()},
                    },
                    sort_keys=True,
                )
                + "\n"
            )
