#!/usr/bin/env python3
"""Record real service responses for the UI tests.

Builds the same synthetic corpus the Python suite uses, serves it through
the actual application, captures the request/response pairs the browser
explorer makes during the tested interaction flow, and freezes them into
tests/fixtures/api-recording.json. Re-run after changing the service API or
the corpus fixture generator.
"""

import json
import sys
import tempfile
from pathlib import Path
from urllib.parse import quote

FRONTEND = Path(__file__).resolve().parents[1]
REPO = FRONTEND.parent
sys.path.insert(0, str(REPO / "tests"))

import numpy as np
from fastapi.testclient import TestClient

from conftest import synthetic_corpus
from venue_lens.corpus import save_corpus
from venue_lens.reduction import PcaReducer, ReducedCorpus, save_model
from venue_lens.service import ApiConfig, create_app

CLICKED_DOC = "x-000"


def main():
    records = synthetic_corpus()
    with tempfile.TemporaryDirectory() as tmp:
        corpus_path = Path(tmp) / "corpus.jsonl"
        model_path = Path(tmp) / "model.json"
        save_corpus(records, corpus_path)
        X = np.vstack([r.embedding for r in records])
        model = PcaReducer(n_components=4).fit(X)
        save_model(model, model_path)
        client = TestClient(
            create_app(ApiConfig(corpus_path=str(corpus_path), model_path=str(model_path)))
        )

        paths = [
            "/api/points?offset=0&limit=500",
            f"/api/doc/{CLICKED_DOC}",
            f"/api/doc/{CLICKED_DOC}/related?k=10",
            f"/api/doc/{CLICKED_DOC}/terms?k=10&m=8",
        ]
        entries = []
        for path in paths:
            entries.append(record(client, path))

        terms = entries[-1]["body"]
        assert terms, "fixture corpus must yield suggested terms"
        top_term = terms[0]["term"]
        entries.append(record(client, f"/api/search?q={quote(top_term)}&offset=0&limit=500"))

        out = FRONTEND / "tests" / "fixtures" / "api-recording.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(
            json.dumps({"clicked_doc": CLICKED_DOC, "entries": entries}, indent=2) + "\n",
            encoding="utf-8",
        )
        print(f"recorded {len(entries)} responses to {out}")


def record(client, path):
    response = client.get(path)
    assert response.status_code == 200, f"{path}: {response.status_code} {response.text}"
    headers = {}
    if "X-Total-Count" in response.headers:
        headers["X-Total-Count"] = response.headers["X-Total-Count"]
    return {
        "method": "GET",
        "path": path,
        "status": response.status_code,
        "headers": headers,
        "body": response.json(),
    }


if __name__ == "__main__":
    main()
