"""venue-lens command line interface."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from . import divergence as div
from . import drift as drift_mod
from .corpus import (
    DEFAULT_VENUES,
    DEFAULT_YEAR_FROM,
    DEFAULT_YEAR_TO,
    embedding_matrix,
    load_corpus,
    load_vectors,
    save_corpus,
    venue_by_code,
)
from .errors import ConfigurationError, VenueLensError
from .harvest import (
    DBLP_API_URL,
    S2_API_URL,
    DblpListingClient,
    SemanticScholarClient,
    fetch_corpus,
)
from .probe import probe_pairs
from .reduction import (
    DEFAULT_COMPONENTS,
    PcaReducer,
    ReducedCorpus,
    load_model,
    load_reduced,
    save_model,
    save_reduced,
)

PROBE_CSV_COLUMNS = (
    "venue_a",
    "venue_b",
    "year",
    "n_train",
    "n_val",
    "val_accuracy",
    "converged",
    "skipped",
)


class DomainErrorGroup(click.Group):
    """Surface domain errors as clean CLI failures instead of tracebacks."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except VenueLensError as exc:
            raise click.ClickException(str(exc)) from exc


@click.group(cls=DomainErrorGroup)
@click.version_option(package_name="venue-lens")
def main():
    """Venue similarity and convergence analytics over document embeddings."""


def _resolve_venues(codes):
    if not codes:
        return list(DEFAULT_VENUES)
    specs = []
    for code in codes:
        try:
            specs.append(venue_by_code(code))
        except KeyError:
            known = ", ".join(v.code for v in DEFAULT_VENUES)
            raise ConfigurationError(f"unknown venue code '{code}' (known: {known})") from None
    return specs


@main.command()
@click.option("--venues", default="", help="Comma-separated venue codes; default: all nine.")
@click.option("--from", "year_from", type=int, default=DEFAULT_YEAR_FROM, show_default=True)
@click.option("--to", "year_to", type=int, default=DEFAULT_YEAR_TO, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--vectors",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Sidecar JSONL of {doc_id, embedding} to fill embeddings the service lacks.",
)
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None)
@click.option("--dblp-url", envvar="VENUE_LENS_DBLP_URL", default=DBLP_API_URL, hidden=True)
@click.option("--s2-url", envvar="VENUE_LENS_S2_URL", default=S2_API_URL, hidden=True)
def fetch(venues, year_from, year_to, out, vectors, manifest_path, dblp_url, s2_url):
    """Harvest a corpus from the listing and metadata APIs and write JSONL."""
    specs = _resolve_venues([c.strip() for c in venues.split(",") if c.strip()])
    sidecar = load_vectors(vectors) if vectors else None
    records, manifest = fetch_corpus(
        specs,
        year_from,
        year_to,
        dblp=DblpListingClient(base_url=dblp_url),
        s2=SemanticScholarClient(base_url=s2_url),
        vectors=sidecar,
        log=lambda msg: click.echo(msg, err=True),
    )
    save_corpus(records, out)
    manifest_json = json.dumps(manifest.to_dict(), indent=2)
    if manifest_path:
        Path(manifest_path).write_text(manifest_json + "\n", encoding="utf-8")
    else:
        click.echo(manifest_json)
    click.echo(f"wrote {len(records)} records to {out}", err=True)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=DEFAULT_COMPONENTS, show_default=True)
@click.option(
    "--out",
    required=True,
    help="Two comma-separated paths: model JSON, reduced JSONL.",
)
def reduce(corpus, k, out):
    """Fit PCA on the pooled corpus embeddings and write model + reduced vectors."""
    parts = [p.strip() for p in out.split(",")]
    if len(parts) != 2:
        raise click.UsageError("--out must name two paths: model.json,reduced.jsonl")
    model_path, reduced_path = parts
    records = load_corpus(corpus)
    model = PcaReducer(n_components=k).fit(embedding_matrix(records))
    reduced = ReducedCorpus.from_records(records, model)
    save_model(model, model_path)
    save_reduced(reduced, reduced_path)
    retained = float(model.explained_variance_ratio_.sum())
    click.echo(f"fit {k} components on {len(records)} documents")
    click.echo(f"retained variance ratio: {retained:.4f}")
    click.echo(f"leading component ratios: "
               + " ".join(f"{r:.4f}" for r in model.explained_variance_ratio_[:8]))


@main.command()
@click.option("--reduced", "reduced_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--year", type=int, default=None)
@click.option("--symmetrize", is_flag=True, default=False)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def divergence(reduced_path, model_path, year, symmetrize, out):
    """Pairwise variance-weighted KL matrix, written as CSV plus a JSON twin."""
    reduced = load_reduced(reduced_path)
    model = load_model(model_path)
    mode = div.MODE_SYMMETRIZED if symmetrize else div.MODE_DIRECTED
    dists = div.distributions_by_venue(reduced, year=year, model_id=model.model_id)
    matrix = div.divergence_matrix(dists, model.explained_variance_ratio_, mode=mode)
    csv_path, json_path = div.save_matrix(matrix, out)
    click.echo(f"wrote {mode} matrix for {len(matrix.venues)} venues to {csv_path} and {json_path}")


@main.command()
@click.option("--reduced", "reduced_path", required=True, type=click.Path(exists=True))
@click.option("--pairs", default="all", show_default=True, help="'all' or 'A:B'.")
@click.option("--per-year", is_flag=True, default=False)
@click.option("--seed", type=int, default=17, show_default=True)
@click.option("--seeds", "n_seeds", type=int, default=1, show_default=True,
              help="Average accuracy over this many consecutive seeds.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def probe(reduced_path, pairs, per_year, seed, n_seeds, out):
    """Logistic-regression separability probes over venue pairs."""
    reduced = load_reduced(reduced_path)
    if pairs == "all":
        wanted = None
    else:
        try:
            venue_a, venue_b = pairs.split(":")
        except ValueError:
            raise click.UsageError("--pairs must be 'all' or 'A:B'") from None
        wanted = [(venue_a, venue_b)]
    results = probe_pairs(reduced, pairs=wanted, per_year=per_year, seed=seed, n_seeds=n_seeds)
    with Path(out).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROBE_CSV_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.venue_a,
                    r.venue_b,
                    "" if r.year_filter is None else r.year_filter,
                    r.n_train,
                    r.n_val,
                    "" if r.val_accuracy is None else f"{r.val_accuracy:.6f}",
                    "" if r.converged is None else str(r.converged).lower(),
                    str(r.skipped).lower(),
                ]
            )
    click.echo(f"wrote {len(results)} probe rows to {out}")


@main.command()
@click.option("--reduced", "reduced_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--anchor", required=True)
@click.option("--metric", type=click.Choice(["kl", "probe"]), default="kl", show_default=True)
@click.option("--normalize", is_flag=True, default=False)
@click.option("--seed", type=int, default=17, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def drift(reduced_path, model_path, anchor, metric, normalize, seed, out):
    """Yearly series of the anchor venue against every other venue."""
    reduced = load_reduced(reduced_path)
    metric_name = drift_mod.METRIC_DIVERGENCE if metric == "kl" else drift_mod.METRIC_ACCURACY
    ratio = None
    model_id = None
    if metric == "kl":
        if model_path is None:
            raise click.UsageError("--model is required for --metric kl")
        model = load_model(model_path)
        ratio = model.explained_variance_ratio_
        model_id = model.model_id
    series = drift_mod.drift_series_for_anchor(
        reduced, anchor, metric_name, explained_ratio=ratio, seed=seed, model_id=model_id
    )
    payload = [s.to_dict(include_normalized=normalize) for s in series]
    Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(payload)} drift series for anchor {anchor} to {out}")


@main.command()
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Directory of built web UI assets to serve under /.")
@click.option("--cors", multiple=True, default=("*",), show_default=True)
def serve(port, host, corpus_path, model_path, static_dir, cors):
    """Serve the read-only exploration API (and optionally the web UI)."""
    import uvicorn

    from .service import ApiConfig, create_app

    config = ApiConfig(
        corpus_path=corpus_path,
        model_path=model_path,
        port=port,
        host=host,
        cors_origins=tuple(cors),
        static_dir=static_dir,
    )
    try:
        app = create_app(config)
    except (VenueLensError, FileNotFoundError, ValueError) as exc:
        click.echo(f"startup failed: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
