import numpy as np
import pytest

from venue_lens.corpus import EMBEDDING_DIM, DocumentRecord
from venue_lens.reduction import PcaReducer, ReducedCorpus


def make_record(doc_id, venue="X", year=2020, title="A Paper", abstract="Some text.",
                embedding=None, s2_id=None):
    external_ids = {"dblp": doc_id}
    if s2_id is not None:
        external_ids["s2"] = s2_id
    return DocumentRecord(
        doc_id=doc_id,
        external_ids=external_ids,
        title=title,
        abstract=abstract,
        venue=venue,
        year=year,
        embedding=embedding,
    )


def nine_digit_embedding(rng, loc=0.0):
    # values with <= 9 significant digits round-trip the corpus format exactly
    return np.round(rng.normal(loc, 1.0, EMBEDDING_DIM), 6)


def synthetic_corpus(seed=7, per_venue=8, venues=("X", "Y", "Z"), years=(2018, 2019, 2020)):
    """Small corpus with venue-specific embedding clusters and controlled text."""
    rng = np.random.default_rng(seed)
    phrases = {
        "X": "graph neural network models",
        "Y": "speech recognition pipelines",
        "Z": "type system soundness proofs",
    }
    records = []
    for v_index, venue in enumerate(venues):
        for i in range(per_venue):
            year = years[i % len(years)]
            doc_id = f"{venue.lower()}-{i:03d}"
            records.append(
                make_record(
                    doc_id,
                    venue=venue,
                    year=year,
                    title=f"{phrases[venue].title()} Study {i}",
                    abstract=(
                        f"We study {phrases[venue]} with experiments. "
                        f"Results for {venue} are reported."
                    ),
                    embedding=nine_digit_embedding(rng, loc=3.0 * v_index),
                    s2_id=f"s2-{doc_id}",
                )
            )
    return records


@pytest.fixture(scope="session")
def fixture_records():
    return synthetic_corpus()


@pytest.fixture(scope="session")
def fixture_model(fixture_records):
    X = np.vstack([r.embedding for r in fixture_records])
    return PcaReducer(n_components=4).fit(X)


@pytest.fixture(scope="session")
def fixture_reduced(fixture_records, fixture_model):
    return ReducedCorpus.from_records(fixture_records, fixture_model)
