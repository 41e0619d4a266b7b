import numpy as np
import pytest

from venue_lens.corpus import EMBEDDING_DIM, VenueSpec
from venue_lens.errors import ConfigurationError, IngestError
from venue_lens.harvest import (
    DblpListingClient,
    HttpJsonClient,
    RateLimiter,
    RetryPolicy,
    SemanticScholarClient,
    fetch_corpus,
)

from conftest import make_record

VENUE = VenueSpec("TESTA", "Testing", "testa")


class FakeResponse:
    def __init__(self, status_code, payload=None, headers=None):
        self.status_code = status_code
        self._payload = payload
        self.headers = headers or {}

    def json(self):
        return self._payload


class FakeSession:
    """Scripted responses, with every request recorded for inspection."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def request(self, method, url, params=None, json=None, headers=None, timeout=None):
        self.calls.append(
            {"method": method, "url": url, "params": params, "json": json, "headers": headers}
        )
        if not self.responses:
            raise AssertionError("no scripted response left")
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


def make_client(responses, sleeps=None):
    session = FakeSession(responses)
    recorder = sleeps if sleeps is not None else []
    http = HttpJsonClient(
        session=session,
        policy=RetryPolicy(),
        limiter=RateLimiter(min_interval=0),
        sleep=recorder.append,
    )
    return http, session, recorder


def dblp_page(total, hits):
    return {"result": {"hits": {"@total": str(total), "hit": hits}}}


def dblp_hit(key, title, year, doi=None):
    info = {"key": key, "title": title, "year": str(year)}
    if doi:
        info["doi"] = doi
    return {"info": info}


def s2_item(paper_id, abstract="An abstract.", vector_fill=0.5):
    return {
        "paperId": paper_id,
        "abstract": abstract,
        "embedding": {"model": "test", "vector": [vector_fill] * EMBEDDING_DIM},
    }


class TestRetryPolicy:
    def test_exponential_delays(self):
        policy = RetryPolicy()
        assert [policy.delay(i) for i in range(4)] == [1.0, 2.0, 4.0, 8.0]

    def test_retry_after_header_honored(self):
        responses = [
            FakeResponse(429, headers={"Retry-After": "7"}),
            FakeResponse(200, {"ok": True}),
        ]
        http, session, sleeps = make_client(responses)
        assert http.request_json("GET", "http://svc/x") == {"ok": True}
        assert sleeps == [7.0]
        assert len(session.calls) == 2

    def test_server_errors_retry_then_fail_with_context(self):
        http, session, sleeps = make_client([FakeResponse(500)] * 5)
        with pytest.raises(IngestError, match="DBLP TESTA offset 0"):
            http.request_json("GET", "http://svc/x", context="DBLP TESTA offset 0")
        assert len(session.calls) == 5
        assert sleeps == [1.0, 2.0, 4.0, 8.0, 16.0]

    def test_non_retryable_status_fails_immediately(self):
        http, session, _ = make_client([FakeResponse(404)])
        with pytest.raises(IngestError, match="HTTP 404"):
            http.request_json("GET", "http://svc/x", context="ctx")
        assert len(session.calls) == 1

    def test_connection_errors_retry(self):
        import requests

        responses = [requests.ConnectionError("boom"), FakeResponse(200, {"ok": 1})]
        http, _, sleeps = make_client(responses)
        assert http.request_json("GET", "http://svc/x") == {"ok": 1}
        assert len(sleeps) == 1


class TestRateLimiter:
    def test_spaces_requests_per_host(self):
        clock = iter([0.0, 0.1, 0.2]).__next__
        sleeps = []
        limiter = RateLimiter(min_interval=1.0, clock=clock, sleep=sleeps.append)
        limiter.wait("a")
        limiter.wait("a")
        assert sleeps == [pytest.approx(0.9)]

    def test_hosts_independent(self):
        clock = iter([0.0, 0.1]).__next__
        sleeps = []
        limiter = RateLimiter(min_interval=1.0, clock=clock, sleep=sleeps.append)
        limiter.wait("a")
        limiter.wait("b")
        assert sleeps == []


class TestDblpListing:
    def test_paginates_and_builds_stubs(self):
        pages = [
            dblp_page(3, [dblp_hit("conf/testa/One20", "One.", 2020, doi="10.1/one"),
                          dblp_hit("conf/testa/Two21", "Two.", 2021)]),
            dblp_page(3, [dblp_hit("conf/testa/Three19", "Three.", 2019)]),
        ]
        http, session, _ = make_client([FakeResponse(200, p) for p in pages])
        client = DblpListingClient(http=http, page_size=2)
        stubs = client.list_venue(VENUE, 2015, 2023)
        assert [s.doc_id for s in stubs] == [
            "dblp:conf/testa/One20",
            "dblp:conf/testa/Two21",
            "dblp:conf/testa/Three19",
        ]
        assert all(s.venue == "TESTA" for s in stubs)
        assert stubs[0].external_ids == {"dblp": "conf/testa/One20", "doi": "10.1/one"}
        assert stubs[1].external_ids == {"dblp": "conf/testa/Two21"}
        assert session.calls[0]["params"]["q"] == "stream:streams/conf/testa:"
        assert [c["params"]["f"] for c in session.calls] == [0, 2]

    def test_year_range_filter(self):
        page = dblp_page(3, [
            dblp_hit("conf/testa/A14", "Old.", 2014),
            dblp_hit("conf/testa/B20", "In.", 2020),
            dblp_hit("conf/testa/C24", "New.", 2024),
        ])
        http, _, _ = make_client([FakeResponse(200, page)])
        stubs = DblpListingClient(http=http, page_size=10).list_venue(VENUE, 2015, 2023)
        assert [s.year for s in stubs] == [2020]

    def test_inverted_range_is_configuration_error(self):
        http, session, _ = make_client([])
        with pytest.raises(ConfigurationError, match="empty year range"):
            DblpListingClient(http=http).list_venue(VENUE, 2020, 2019)
        assert session.calls == []

    def test_zero_publication_venue_empty_no_error(self):
        http, _, _ = make_client([FakeResponse(200, {"result": {"hits": {"@total": "0"}}})])
        assert DblpListingClient(http=http).list_venue(VENUE, 2015, 2023) == []

    def test_missing_listing_query(self):
        http, _, _ = make_client([])
        bad = VenueSpec("TESTA", "Testing", "")
        with pytest.raises(ConfigurationError, match="listing_query"):
            DblpListingClient(http=http).list_venue(bad, 2015, 2023)

    def test_title_entities_unescaped(self):
        page = dblp_page(1, [dblp_hit("conf/testa/X20", "Graphs &amp; Trees.", 2020)])
        http, _, _ = make_client([FakeResponse(200, page)])
        stubs = DblpListingClient(http=http).list_venue(VENUE, 2015, 2023)
        assert stubs[0].title == "Graphs & Trees."


class TestEnrich:
    def make_stubs(self, n, with_doi=True):
        stubs = []
        for i in range(n):
            record = make_record(
                f"dblp:conf/testa/P{i}",
                venue="TESTA",
                year=2020,
                title=f"Paper {i}",
                abstract="",
                embedding=None,
            )
            if with_doi:
                record.external_ids["doi"] = f"10.1/p{i}"
            stubs.append(record)
        return stubs

    def test_happy_path_batch(self):
        stubs = self.make_stubs(3)
        payload = [s2_item(f"s2-{i}") for i in range(3)]
        http, session, _ = make_client([FakeResponse(200, payload)])
        enriched = SemanticScholarClient(http=http, api_key="k").enrich(stubs)
        assert all(r.has_abstract() and r.has_embedding() for r in enriched)
        assert [r.external_ids["s2"] for r in enriched] == ["s2-0", "s2-1", "s2-2"]
        call = session.calls[0]
        assert call["json"]["ids"] == ["DOI:10.1/p0", "DOI:10.1/p1", "DOI:10.1/p2"]
        assert call["headers"] == {"x-api-key": "k"}

    def test_one_unknown_id_among_k(self):
        stubs = self.make_stubs(4)
        payload = [s2_item("s2-0"), None, s2_item("s2-2"), s2_item("s2-3")]
        http, _, _ = make_client([FakeResponse(200, payload)])
        enriched = SemanticScholarClient(http=http).enrich(stubs)
        resolved = [r for r in enriched if r.has_abstract()]
        assert len(resolved) == 3
        assert enriched[1] == stubs[1]  # unresolved passthrough, not dropped

    def test_empty_batch(self):
        http, session, _ = make_client([])
        assert SemanticScholarClient(http=http).enrich([]) == []
        assert session.calls == []

    def test_respects_batch_size_limit(self):
        stubs = self.make_stubs(5)
        responses = [
            FakeResponse(200, [s2_item(f"s2-{i}") for i in range(2)]),
            FakeResponse(200, [s2_item(f"s2-{i}") for i in range(2, 4)]),
            FakeResponse(200, [s2_item("s2-4")]),
        ]
        http, session, _ = make_client(responses)
        SemanticScholarClient(http=http, batch_size=2).enrich(stubs)
        assert [len(c["json"]["ids"]) for c in session.calls] == [2, 2, 1]

    def test_stub_without_doi_passes_through(self):
        stubs = self.make_stubs(2, with_doi=False)
        http, session, _ = make_client([])
        enriched = SemanticScholarClient(http=http).enrich(stubs)
        assert enriched == stubs
        assert session.calls == []

    def test_venue_and_year_never_overwritten(self):
        stubs = self.make_stubs(1)
        item = s2_item("s2-0")
        item["venue"] = "SomethingElse"
        item["year"] = 1900
        http, _, _ = make_client([FakeResponse(200, [item])])
        enriched = SemanticScholarClient(http=http).enrich(stubs)
        assert enriched[0].venue == "TESTA"
        assert enriched[0].year == 2020

    def test_wrong_dim_vector_ignored(self):
        stubs = self.make_stubs(1)
        item = {
            "paperId": "s2-0",
            "abstract": "ok",
            "embedding": {"vector": [0.5] * 10},
        }
        http, _, _ = make_client([FakeResponse(200, [item])])
        enriched = SemanticScholarClient(http=http).enrich(stubs)
        assert enriched[0].embedding is None
        assert enriched[0].abstract == "ok"


class TestFetchCorpus:
    def test_end_to_end_with_fakes(self):
        listing = dblp_page(3, [
            dblp_hit("conf/testa/A", "Alpha.", 2020, doi="10.1/a"),
            dblp_hit("conf/testa/B", "Beta.", 2021, doi="10.1/b"),
            dblp_hit("conf/testa/C", "Gamma.", 2021),  # no DOI -> never enriched
        ])
        batch = [s2_item("s2-a"), None]  # B unresolved
        dblp_http, _, _ = make_client([FakeResponse(200, listing)])
        s2_http, _, _ = make_client([FakeResponse(200, batch)])
        records, manifest = fetch_corpus(
            [VENUE],
            2015,
            2023,
            dblp=DblpListingClient(http=dblp_http),
            s2=SemanticScholarClient(http=s2_http),
        )
        assert [r.doc_id for r in records] == ["dblp:conf/testa/A"]
        counts = manifest.counts("TESTA")
        assert counts.listed == 3
        assert counts.enriched == 1
        assert counts.retained == 1
        assert counts.dropped == 2
        assert manifest.reconciles()

    def test_vectors_sidecar_fills_embeddings(self):
        listing = dblp_page(1, [dblp_hit("conf/testa/A", "Alpha.", 2020, doi="10.1/a")])
        item = {"paperId": "s2-a", "abstract": "text", "embedding": None}
        dblp_http, _, _ = make_client([FakeResponse(200, listing)])
        s2_http, _, _ = make_client([FakeResponse(200, [item])])
        vectors = {"dblp:conf/testa/A": np.full(EMBEDDING_DIM, 0.25)}
        records, _ = fetch_corpus(
            [VENUE],
            2015,
            2023,
            dblp=DblpListingClient(http=dblp_http),
            s2=SemanticScholarClient(http=s2_http),
            vectors=vectors,
        )
        assert len(records) == 1
        assert records[0].embedding[0] == 0.25
