"""Harvest venue listings and abstract/embedding enrichment from literature APIs.

Listing comes from the DBLP publication search API (one stream per venue);
abstracts and SPECTER embeddings come from the Semantic Scholar Graph bulk
endpoint, keyed by DOI. The listing source stays authoritative for venue and
year: enrichment never overwrites either, since the metadata service is known
to mislabel venues.

All outbound requests go through one retrying client with a shared per-host
rate limiter, so venue fetches can run concurrently if a caller wants to.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, replace
from html import unescape
from urllib.parse import urlparse

import numpy as np
import requests

from .corpus import EMBEDDING_DIM, DocumentRecord, apply_vectors, finalize
from .errors import ConfigurationError, IngestError

DBLP_API_URL = "https://dblp.org/search/publ/api"
S2_API_URL = "https://api.semanticscholar.org/graph/v1"
S2_API_KEY_ENV = "SEMANTIC_SCHOLAR_API_KEY"

DBLP_PAGE_SIZE = 1000
S2_BATCH_SIZE = 500  # the bulk endpoint's id limit per request
S2_FIELDS = "title,abstract,externalIds,embedding"

RETRYABLE_STATUS = frozenset({408, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff: 1 s start, doubling, at most 5 attempts."""

    attempts: int = 5
    base_delay: float = 1.0
    factor: float = 2.0

    def delay(self, attempt):
        return self.base_delay * self.factor**attempt


class RateLimiter:
    """Minimum spacing between requests to the same host; thread-safe."""

    def __init__(self, min_interval=1.0, clock=time.monotonic, sleep=time.sleep):
        self.min_interval = min_interval
        self._clock = clock
        self._sleep = sleep
        self._last = {}
        self._lock = threading.Lock()

    def wait(self, host):
        with self._lock:
            now = self._clock()
            last = self._last.get(host)
            pause = 0.0
            if last is not None:
                pause = self.min_interval - (now - last)
            self._last[host] = now + max(pause, 0.0)
        if pause > 0:
            self._sleep(pause)


class HttpJsonClient:
    """JSON-over-HTTP with retry, backoff, and Retry-After handling."""

    def __init__(self, session=None, policy=None, limiter=None, sleep=time.sleep, timeout=30):
        self.session = session if session is not None else requests.Session()
        self.policy = policy if policy is not None else RetryPolicy()
        self.limiter = limiter if limiter is not None else RateLimiter()
        self.sleep = sleep
        self.timeout = timeout

    def request_json(self, method, url, params=None, json_body=None, headers=None, context=""):
        host = urlparse(url).netloc
        last_error = None
        for attempt in range(self.policy.attempts):
            self.limiter.wait(host)
            try:
                response = self.session.request(
                    method,
                    url,
                    params=params,
                    json=json_body,
                    headers=headers,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                self.sleep(self.policy.delay(attempt))
                continue
            if response.status_code == 200:
                return response.json()
            if response.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                self.sleep(self._retry_delay(attempt, response))
                continue
            raise IngestError(
                f"{context}: HTTP {response.status_code} from {url}", context=context
            )
        raise IngestError(
            f"{context}: retries exhausted ({last_error})", context=context
        )

    def _retry_delay(self, attempt, response):
        retry_after = response.headers.get("Retry-After")
        if retry_after:
            try:
                return max(float(retry_after), 0.0)
            except ValueError:
                pass
        return self.policy.delay(attempt)


class DblpListingClient:
    """List a venue's publications as stub records (no abstract, no embedding)."""

    def __init__(self, base_url=DBLP_API_URL, http=None, page_size=DBLP_PAGE_SIZE):
        self.base_url = base_url
        self.http = http if http is not None else HttpJsonClient()
        self.page_size = page_size

    def list_venue(self, venue, year_from, year_to):
        if year_from > year_to:
            raise ConfigurationError(
                f"empty year range: {year_from} > {year_to} for venue '{venue.code}'"
            )
        if not venue.listing_query:
            raise ConfigurationError(f"venue '{venue.code}' has no listing_query configured")
        stubs = []
        offset = 0
        while True:
            payload = self.http.request_json(
                "GET",
                self.base_url,
                params={
                    "q": f"stream:streams/conf/{venue.listing_query}:",
                    "format": "json",
                    "h": self.page_size,
                    "f": offset,
                },
                context=f"DBLP listing {venue.code} offset {offset}",
            )
            hits = payload.get("result", {}).get("hits", {})
            total = int(hits.get("@total", 0))
            for hit in _as_list(hits.get("hit")):
                stub = self._parse_hit(hit, venue)
                if stub is not None and year_from <= stub.year <= year_to:
                    stubs.append(stub)
            offset += self.page_size
            if offset >= total:
                break
        return stubs

    @staticmethod
    def _parse_hit(hit, venue):
        info = hit.get("info", {})
        key = info.get("key")
        title = info.get("title")
        year = info.get("year")
        if not key or not title or year is None:
            return None
        external_ids = {"dblp": key}
        if info.get("doi"):
            external_ids["doi"] = info["doi"]
        return DocumentRecord(
            doc_id=f"dblp:{key}",
            external_ids=external_ids,
            title=unescape(title).strip(),
            abstract="",
            venue=venue.code,  # listing source is authoritative
            year=int(year),
            embedding=None,
        )


def _as_list(value):
    if value is None:
        return []
    if isinstance(value, list):
        return value
    return [value]


class SemanticScholarClient:
    """Fill abstracts and embeddings via the bulk paper endpoint, keyed by DOI."""

    def __init__(self, base_url=S2_API_URL, http=None, api_key=None, batch_size=S2_BATCH_SIZE):
        self.base_url = base_url
        self.http = http if http is not None else HttpJsonClient()
        self.api_key = api_key if api_key is not None else os.environ.get(S2_API_KEY_ENV)
        self.batch_size = batch_size

    def enrich(self, stubs):
        """Populate what the service resolves; unresolved stubs pass through as-is.

        Venue and year are never touched, whatever the service reports.
        """
        stubs = list(stubs)
        resolvable = [i for i, s in enumerate(stubs) if s.external_ids.get("doi")]
        out = list(stubs)
        headers = {"x-api-key": self.api_key} if self.api_key else None
        for start in range(0, len(resolvable), self.batch_size):
            chunk = resolvable[start : start + self.batch_size]
            ids = [f"DOI:{stubs[i].external_ids['doi']}" for i in chunk]
            payload = self.http.request_json(
                "POST",
                f"{self.base_url}/paper/batch",
                params={"fields": S2_FIELDS},
                json_body={"ids": ids},
                headers=headers,
                context=f"S2 batch {start // self.batch_size}",
            )
            for record_index, item in zip(chunk, payload):
                if not item:
                    continue
                out[record_index] = self._merge(stubs[record_index], item)
        return out

    @staticmethod
    def _merge(stub, item):
        updates = {}
        external_ids = dict(stub.external_ids)
        if item.get("paperId"):
            external_ids["s2"] = item["paperId"]
            updates["external_ids"] = external_ids
        if item.get("abstract"):
            updates["abstract"] = item["abstract"]
        vector = (item.get("embedding") or {}).get("vector")
        if vector is not None:
            arr = np.asarray(vector, dtype=np.float64)
            if arr.shape == (EMBEDDING_DIM,) and np.all(np.isfinite(arr)):
                updates["embedding"] = arr
        return replace(stub, **updates) if updates else stub


def fetch_corpus(
    venues,
    year_from,
    year_to,
    dblp=None,
    s2=None,
    vectors=None,
    venue_codes=None,
    log=None,
):
    """List, enrich, and finalize a corpus for the given venue specs.

    Returns ``(records, manifest)``. ``vectors`` is an optional doc_id ->
    embedding mapping used to fill what the metadata service could not.
    """
    dblp = dblp if dblp is not None else DblpListingClient()
    s2 = s2 if s2 is not None else SemanticScholarClient()
    say = log if log is not None else (lambda msg: None)
    harvested = []
    for venue in venues:
        stubs = dblp.list_venue(venue, year_from, year_to)
        say(f"{venue.code}: listed {len(stubs)}")
        enriched = s2.enrich(stubs)
        harvested.extend(enriched)
    if vectors:
        harvested = apply_vectors(harvested, vectors)
    codes = venue_codes if venue_codes is not None else {v.code for v in venues}
    records, manifest = finalize(
        harvested, venue_codes=codes, year_from=year_from, year_to=year_to
    )
    say(f"retained {len(records)} of {len(harvested)} harvested records")
    return records, manifest
