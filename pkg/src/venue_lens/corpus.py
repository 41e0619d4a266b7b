"""Document records, venue configuration, corpus finalization, and JSONL persistence.

The corpus file format is JSON Lines, one document per line, with the fields
``doc_id, external_ids, title, abstract, venue, year, embedding`` in that
order, UTF-8 encoded. Embedding components are written as decimals with nine
significant digits; values that already carry at most nine significant digits
round-trip bit-stably.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import CorpusFormatError

EMBEDDING_DIM = 768
DEFAULT_YEAR_FROM = 2015
DEFAULT_YEAR_TO = 2023

CORPUS_FIELDS = ("doc_id", "external_ids", "title", "abstract", "venue", "year", "embedding")


@dataclass(frozen=True)
class VenueSpec:
    """One publication venue: short code, category label, listing-API key."""

    code: str
    category: str
    listing_query: str


# The nine venues used throughout; listing_query is the DBLP stream key.
# Name variants (workshops, "Findings of ...") are not folded in: each spec
# maps to exactly one DBLP stream, and additional variants need their own
# VenueSpec entries.
DEFAULT_VENUES = (
    VenueSpec("NeurIPS", "Artificial Intelligence", "nips"),
    VenueSpec("AAAI", "Artificial Intelligence", "aaai"),
    VenueSpec("CHI", "Human-Computer Interaction", "chi"),
    VenueSpec("ACL", "Natural Language Processing", "acl"),
    VenueSpec("EMNLP", "Natural Language Processing", "emnlp"),
    VenueSpec("NAACL", "Natural Language Processing", "naacl"),
    VenueSpec("USS", "Privacy and Security", "uss"),
    VenueSpec("OOPSLA", "Programming Languages", "oopsla"),
    VenueSpec("POPL", "Programming Languages", "popl"),
)


def venue_by_code(code, venues=DEFAULT_VENUES):
    for spec in venues:
        if spec.code == code:
            return spec
    raise KeyError(code)


@dataclass(frozen=True, eq=False)
class DocumentRecord:
    """One paper: identifiers, text, venue attribution, and raw embedding."""

    doc_id: str
    external_ids: dict
    title: str
    abstract: str
    venue: str
    year: int
    embedding: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, DocumentRecord):
            return NotImplemented
        if (
            self.doc_id != other.doc_id
            or self.external_ids != other.external_ids
            or self.title != other.title
            or self.abstract != other.abstract
            or self.venue != other.venue
            or self.year != other.year
        ):
            return False
        if self.embedding is None or other.embedding is None:
            return self.embedding is None and other.embedding is None
        return np.array_equal(self.embedding, other.embedding)

    def has_abstract(self):
        return bool(self.abstract and self.abstract.strip())

    def has_embedding(self):
        return (
            self.embedding is not None
            and self.embedding.shape == (EMBEDDING_DIM,)
            and bool(np.all(np.isfinite(self.embedding)))
        )

    def is_valid(self, venue_codes=None, year_from=None, year_to=None):
        """Check every record invariant that does not need corpus-level context."""
        if not self.doc_id or not isinstance(self.year, int):
            return False
        if venue_codes is not None and self.venue not in venue_codes:
            return False
        if year_from is not None and self.year < year_from:
            return False
        if year_to is not None and self.year > year_to:
            return False
        if self.embedding is not None and not self.has_embedding():
            return False
        return True


def dedup_key(record):
    """Metadata-service id when present, else lowercase-normalized title + year."""
    s2_id = record.external_ids.get("s2")
    if s2_id:
        return ("s2", s2_id)
    return ("title", " ".join(record.title.lower().split()), record.year)


@dataclass
class VenueCounts:
    listed: int = 0
    enriched: int = 0
    dropped: int = 0
    deduplicated: int = 0
    retained: int = 0

    def reconciles(self):
        return (
            self.retained + self.dropped + self.deduplicated == self.listed
            and self.listed >= self.enriched >= self.retained
        )


@dataclass
class IngestManifest:
    """Per-venue bookkeeping for one harvest run."""

    venues: dict = field(default_factory=dict)
    fetched_at: str = ""

    def counts(self, venue):
        return self.venues.setdefault(venue, VenueCounts())

    def reconciles(self):
        return all(c.reconciles() for c in self.venues.values())

    def total_retained(self):
        return sum(c.retained for c in self.venues.values())

    def to_dict(self):
        return {
            "fetched_at": self.fetched_at,
            "venues": {
                code: {
                    "listed": c.listed,
                    "enriched": c.enriched,
                    "dropped": c.dropped,
                    "deduplicated": c.deduplicated,
                    "retained": c.retained,
                }
                for code, c in sorted(self.venues.items())
            },
            "total_retained": self.total_retained(),
        }


def finalize(records, venue_codes=None, year_from=None, year_to=None):
    """Deduplicate and filter harvested records into a publishable corpus.

    Duplicates (same dedup key) collapse to the first occurrence. Records
    without a usable abstract or embedding, or failing the optional venue/year
    filters, are dropped and counted. Returns ``(corpus, manifest)``; the
    manifest counts reconcile exactly with the input.
    """
    manifest = IngestManifest(fetched_at=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    seen = set()
    retained = []
    for record in records:
        counts = manifest.counts(record.venue)
        counts.listed += 1
        if record.has_abstract() and record.has_embedding():
            counts.enriched += 1
        key = dedup_key(record)
        if key in seen:
            counts.deduplicated += 1
            continue
        seen.add(key)
        keep = (
            record.has_abstract()
            and record.has_embedding()
            and record.is_valid(venue_codes, year_from, year_to)
        )
        if not keep:
            counts.dropped += 1
            continue
        counts.retained += 1
        retained.append(record)
    return retained, manifest


def _nine_digit(value):
    return float(f"{value:.9g}")


def save_corpus(records, path):
    """Write records to a JSONL corpus file (see module docstring for the schema)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            embedding = None
            if record.embedding is not None:
                embedding = [_nine_digit(v) for v in record.embedding]
            row = {
                "doc_id": record.doc_id,
                "external_ids": record.external_ids,
                "title": record.title,
                "abstract": record.abstract,
                "venue": record.venue,
                "year": record.year,
                "embedding": embedding,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def _parse_record(row, line_no):
    for name in CORPUS_FIELDS:
        if name not in row:
            raise CorpusFormatError(
                f"line {line_no}: missing field '{name}'", line_no=line_no, field=name
            )
    if not isinstance(row["doc_id"], str) or not row["doc_id"]:
        raise CorpusFormatError(
            f"line {line_no}: field 'doc_id' must be a non-empty string",
            line_no=line_no,
            field="doc_id",
        )
    if not isinstance(row["year"], int) or isinstance(row["year"], bool):
        raise CorpusFormatError(
            f"line {line_no}: field 'year' must be an integer", line_no=line_no, field="year"
        )
    if not isinstance(row["venue"], str) or not row["venue"]:
        raise CorpusFormatError(
            f"line {line_no}: field 'venue' must be a non-empty string",
            line_no=line_no,
            field="venue",
        )
    if not isinstance(row["external_ids"], dict):
        raise CorpusFormatError(
            f"line {line_no}: field 'external_ids' must be an object",
            line_no=line_no,
            field="external_ids",
        )
    embedding = row["embedding"]
    if embedding is not None:
        arr = np.asarray(embedding, dtype=np.float64)
        if arr.shape != (EMBEDDING_DIM,):
            raise CorpusFormatError(
                f"line {line_no}: field 'embedding' must have {EMBEDDING_DIM} components, "
                f"got {arr.shape[0] if arr.ndim == 1 else arr.shape}",
                line_no=line_no,
                field="embedding",
            )
        if not np.all(np.isfinite(arr)):
            raise CorpusFormatError(
                f"line {line_no}: field 'embedding' contains non-finite values",
                line_no=line_no,
                field="embedding",
            )
        embedding = arr
    return DocumentRecord(
        doc_id=row["doc_id"],
        external_ids=row["external_ids"],
        title=row["title"],
        abstract=row["abstract"],
        venue=row["venue"],
        year=row["year"],
        embedding=embedding,
    )


def load_corpus(path):
    """Read a JSONL corpus file; malformed lines raise CorpusFormatError."""
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(
                    f"line {line_no}: not valid JSON ({exc.msg})", line_no=line_no
                ) from exc
            records.append(_parse_record(row, line_no))
    return records


def load_vectors(path):
    """Read a sidecar vectors file: JSONL of ``{doc_id, embedding}`` keyed by doc_id."""
    vectors = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(
                    f"line {line_no}: not valid JSON ({exc.msg})", line_no=line_no
                ) from exc
            if "doc_id" not in row or "embedding" not in row:
                raise CorpusFormatError(
                    f"line {line_no}: vectors rows need 'doc_id' and 'embedding'",
                    line_no=line_no,
                )
            arr = np.asarray(row["embedding"], dtype=np.float64)
            if arr.shape != (EMBEDDING_DIM,) or not np.all(np.isfinite(arr)):
                raise CorpusFormatError(
                    f"line {line_no}: field 'embedding' must be {EMBEDDING_DIM} finite reals",
                    line_no=line_no,
                    field="embedding",
                )
            vectors[row["doc_id"]] = arr
    return vectors


def apply_vectors(records, vectors):
    """Fill missing embeddings from a sidecar mapping; never overwrites."""
    out = []
    for record in records:
        if record.embedding is None and record.doc_id in vectors:
            record = replace(record, embedding=vectors[record.doc_id])
        out.append(record)
    return out


def embedding_matrix(records):
    """Stack all embeddings into an (n, 768) matrix; every record must carry one."""
    missing = [r.doc_id for r in records if r.embedding is None]
    if missing:
        raise ValueError(
            f"{len(missing)} records have no embedding (first: {missing[0]}); "
            "finalize the corpus or supply a vectors sidecar"
        )
    return np.vstack([r.embedding for r in records])
