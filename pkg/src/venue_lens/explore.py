"""Corpus exploration backend: scatter points, related papers, term suggestions.

Related papers are ranked by exact cosine similarity over the raw 768-d
embeddings (full scan, no approximate index). Suggested search terms are the
word 1-3-grams shared by at least two of a document's neighbors, scored by
how much rarer they are in the corpus at large. Search is lexical: the query
is normalized to a token phrase and documents are ranked by phrase-occurrence
count, then recency, then doc_id.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DocumentNotFoundError

# Fixed English stopword list used for span boundary filtering. Terms may
# contain interior stopwords ("state of the art") but not start or end with
# one.
STOPWORDS = frozenset(
    """
    a about above after again against all also am an and any are as at be
    because been before being below between both but by can could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    may me might more most must my myself no nor not of off on once only or
    other our ours ourselves out over own shall she should so some such than
    that the their theirs them themselves then there these they this those
    through to too under until up upon very was we were what when where which
    while who whom why will with would you your yours yourself yourselves
    """.split()
)

TOKEN_PATTERN = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")

MAX_SPAN_WORDS = 3
MIN_NEIGHBORHOOD_FREQ = 2
CORPUS_RATE_EPSILON = 1e-6


def tokenize(text):
    return TOKEN_PATTERN.findall(text.lower())


@dataclass(frozen=True)
class PointProjection:
    """One document's position in the 2-D scatter (first two PCA coordinates)."""

    doc_id: str
    x: float
    y: float
    venue: str
    year: int


@dataclass(frozen=True)
class TermSuggestion:
    term: str
    neighborhood_freq: int
    corpus_rate: float
    score: float


def _spans(tokens):
    """All 1-3 word spans with no stopword at either boundary."""
    out = set()
    n = len(tokens)
    for width in range(1, MAX_SPAN_WORDS + 1):
        for i in range(n - width + 1):
            if tokens[i] in STOPWORDS or tokens[i + width - 1] in STOPWORDS:
                continue
            out.add(" ".join(tokens[i : i + width]))
    return out


class CorpusExplorer:
    """Read-only exploration index over a loaded corpus.

    Built once at load; queries share the immutable index without locking.
    """

    def __init__(self, records, reduced=None):
        self._records = list(records)
        self._index = {r.doc_id: i for i, r in enumerate(self._records)}
        if len(self._index) != len(self._records):
            raise ValueError("duplicate doc_ids in corpus")
        self._reduced = reduced

        # normalized embedding matrix for cosine scans
        dim = 0
        for r in self._records:
            if r.embedding is not None:
                dim = r.embedding.shape[0]
                break
        matrix = np.zeros((len(self._records), dim))
        self._has_embedding = np.zeros(len(self._records), dtype=bool)
        for i, r in enumerate(self._records):
            if r.embedding is not None:
                matrix[i] = r.embedding
                self._has_embedding[i] = True
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0] = 1.0
        self._unit = matrix / norms[:, None]

        # token-sequence texts (" tok tok ... ") and a token -> doc postings map
        self._texts = []
        postings = {}
        for i, r in enumerate(self._records):
            tokens = tokenize(r.title + " " + r.abstract)
            self._texts.append(" " + " ".join(tokens) + " ")
            for token in set(tokens):
                postings.setdefault(token, []).append(i)
        self._postings = {t: np.asarray(ids) for t, ids in postings.items()}

    def __len__(self):
        return len(self._records)

    def record(self, doc_id):
        try:
            return self._records[self._index[doc_id]]
        except KeyError:
            raise DocumentNotFoundError(doc_id) from None

    def points(self):
        """PointProjection per document; requires the reduced coordinates."""
        if self._reduced is None:
            raise ValueError("explorer was built without reduced coordinates")
        out = []
        for i, r in enumerate(self._records):
            coords = self._reduced.X[i]
            out.append(
                PointProjection(
                    doc_id=r.doc_id,
                    x=float(coords[0]),
                    y=float(coords[1]),
                    venue=r.venue,
                    year=r.year,
                )
            )
        return out

    def related(self, doc_id, k):
        """Top-k most cosine-similar documents, self excluded.

        Descending similarity; exact ties break by doc_id so rankings are
        reproducible.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        idx = self._index.get(doc_id)
        if idx is None:
            raise DocumentNotFoundError(doc_id)
        sims = self._unit @ self._unit[idx]
        candidates = [
            (-sims[i], self._records[i].doc_id, i)
            for i in range(len(self._records))
            if i != idx and self._has_embedding[i]
        ]
        candidates.sort()
        return [(self._records[i], float(-neg)) for neg, _, i in candidates[:k]]

    def _contains_count(self, span):
        """Number of corpus documents containing the token span."""
        tokens = span.split()
        rarest = min(tokens, key=lambda t: len(self._postings.get(t, ())))
        docs = self._postings.get(rarest)
        if docs is None:
            return 0
        needle = " " + span + " "
        return sum(1 for i in docs if needle in self._texts[i])

    def suggest_terms(self, doc_id, k, m):
        """Top-m spans common to the k related documents, rare-in-corpus first.

        score = neighborhood_freq * ln(1 / (corpus_rate + 1e-6)); ties break
        by term. neighborhood_freq counts documents, not occurrences.
        """
        if doc_id not in self._index:
            raise DocumentNotFoundError(doc_id)
        if k < 1 or m < 1:
            return []
        neighborhood = [rec for rec, _ in self.related(doc_id, k)]
        span_docs = {}
        for rec in neighborhood:
            for span in _spans(tokenize(rec.title + " " + rec.abstract)):
                span_docs[span] = span_docs.get(span, 0) + 1
        total = len(self._records)
        suggestions = []
        for span, freq in span_docs.items():
            if freq < MIN_NEIGHBORHOOD_FREQ:
                continue
            rate = self._contains_count(span) / total
            score = freq * math.log(1.0 / (rate + CORPUS_RATE_EPSILON))
            suggestions.append(
                TermSuggestion(
                    term=span, neighborhood_freq=freq, corpus_rate=rate, score=score
                )
            )
        suggestions.sort(key=lambda s: (-s.score, s.term))
        return suggestions[:m]

    def search(self, query):
        """Documents containing the query token phrase, most occurrences first.

        Occurrences count non-overlapping matches of the normalized phrase in
        title+abstract; ranking is (count desc, year desc, doc_id asc).
        Repeated identical queries return identical rankings.
        """
        if not query or not query.strip():
            raise ValueError("query must be non-empty")
        tokens = tokenize(query)
        if not tokens:
            return []
        docs = None
        for token in tokens:
            hits = self._postings.get(token)
            if hits is None:
                return []
            docs = hits if docs is None else np.intersect1d(docs, hits)
        needle = " " + " ".join(tokens) + " "
        matches = []
        for i in docs:
            count = self._texts[i].count(needle)
            if count > 0:
                rec = self._records[i]
                matches.append((-count, -rec.year, rec.doc_id, i))
        matches.sort()
        return [(self._records[i], -neg_count) for neg_count, _, _, i in matches]
