"""Variance-weighted KL divergence between venue feature distributions.

Each venue's reduced vectors are summarized feature-by-feature as univariate
Gaussians; the divergence between two venues is the per-feature closed-form
Gaussian KL combined as a dot product with the model's normalized
explained-variance ratios. A Laplace-smoothed histogram estimator ships as a
diagnostics cross-check for the Gaussian assumption.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientSamplesError, ModelMismatchError

VARIANCE_FLOOR = 1e-9

MODE_DIRECTED = "directed"
MODE_SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class VenueDistribution:
    """Per-feature Gaussian fit over one venue's reduced vectors."""

    venue: str
    year_filter: int | None
    n: int
    feature_mean: np.ndarray
    feature_var: np.ndarray
    model_id: str | None = None


def fit_distribution(X, venue="", year=None, model_id=None):
    """Sample moments per feature (variance denominator n-1, floored at 1e-9)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InsufficientSamplesError(
            f"insufficient samples: need at least 2 vectors for venue '{venue}', "
            f"got {0 if X.ndim != 2 else X.shape[0]}"
        )
    mean = X.mean(axis=0)
    var = np.maximum(X.var(axis=0, ddof=1), VARIANCE_FLOOR)
    return VenueDistribution(
        venue=venue,
        year_filter=year,
        n=X.shape[0],
        feature_mean=mean,
        feature_var=var,
        model_id=model_id,
    )


def kl_per_feature(p, q):
    """Closed-form KL(p_i || q_i) for each feature's Gaussian pair, natural log.

    Tiny negative rounding residue is clamped so Gibbs' inequality holds
    exactly in the output.
    """
    if p.model_id is not None and q.model_id is not None and p.model_id != q.model_id:
        raise ModelMismatchError(
            f"distributions were fit under different models: {p.model_id} vs {q.model_id}"
        )
    if p.feature_mean.shape != q.feature_mean.shape:
        raise ValueError("distributions have different feature counts")
    vp, vq = p.feature_var, q.feature_var
    dm = p.feature_mean - q.feature_mean
    kl = 0.5 * np.log(vq / vp) + (vp + dm * dm) / (2.0 * vq) - 0.5
    return np.maximum(kl, 0.0)


def variance_weighted(kl, explained_ratio):
    """Dot product of per-feature KL with explained-variance weights summing to 1."""
    kl = np.asarray(kl, dtype=np.float64)
    ratio = np.asarray(explained_ratio, dtype=np.float64)
    if kl.shape != ratio.shape:
        raise ValueError(
            f"length mismatch: {kl.shape[0]} KL values vs {ratio.shape[0]} variance ratios"
        )
    weights = ratio / ratio.sum()
    return float(weights @ kl)


@dataclass(frozen=True)
class DivergenceMatrix:
    """Pairwise venue divergences; diagonal zero, entries nonnegative."""

    venues: tuple
    values: np.ndarray
    mode: str
    year_filter: int | None = None

    def entry(self, a, b):
        return float(self.values[self.venues.index(a), self.venues.index(b)])

    def row(self, venue):
        return dict(zip(self.venues, self.values[self.venues.index(venue)].tolist()))

    def to_dict(self):
        return {
            "venues": list(self.venues),
            "mode": self.mode,
            "year": self.year_filter,
            "values": self.values.tolist(),
        }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["venue", *self.venues])
        for code, row in zip(self.venues, self.values):
            writer.writerow([code, *[f"{v:.6g}" for v in row]])
        return buf.getvalue()


def divergence_matrix(distributions, explained_ratio, mode=MODE_DIRECTED):
    """Pairwise variance-weighted KL over a list of venue distributions.

    Directed entry (i, j) is venue_i -> venue_j; symmetrized mode averages
    each entry with its transpose (Jeffreys). Any per-pair failure propagates:
    the matrix is all-or-nothing.
    """
    if mode not in (MODE_DIRECTED, MODE_SYMMETRIZED):
        raise ValueError(f"mode must be '{MODE_DIRECTED}' or '{MODE_SYMMETRIZED}', got '{mode}'")
    if len(distributions) < 2:
        raise ValueError("need at least 2 venues to build a divergence matrix")
    codes = [d.venue for d in distributions]
    if len(set(codes)) != len(codes):
        raise ValueError(f"duplicate venue codes in distributions: {codes}")
    years = {d.year_filter for d in distributions}
    year = years.pop() if len(years) == 1 else None
    size = len(distributions)
    values = np.zeros((size, size))
    for i, p in enumerate(distributions):
        for j, q in enumerate(distributions):
            if i == j:
                continue
            values[i, j] = variance_weighted(kl_per_feature(p, q), explained_ratio)
    if mode == MODE_SYMMETRIZED:
        values = 0.5 * (values + values.T)
    return DivergenceMatrix(venues=tuple(codes), values=values, mode=mode, year_filter=year)


def distributions_by_venue(reduced, year=None, model_id=None, venues=None):
    """Fit one VenueDistribution per venue code (sorted), optionally year-restricted."""
    codes = venues if venues is not None else reduced.venue_codes
    out = []
    for code in codes:
        X = reduced.select(venue=code, year=year)
        out.append(fit_distribution(X, venue=code, year=year, model_id=model_id))
    return out


def histogram_kl_per_feature(Xp, Xq, bins=64):
    """Diagnostics cross-check: per-feature KL from Laplace-smoothed histograms.

    Both samples share each feature's bin range; not the headline metric.
    """
    Xp = np.asarray(Xp, dtype=np.float64)
    Xq = np.asarray(Xq, dtype=np.float64)
    if Xp.shape[1] != Xq.shape[1]:
        raise ValueError("samples have different feature counts")
    out = np.empty(Xp.shape[1])
    for j in range(Xp.shape[1]):
        lo = min(Xp[:, j].min(), Xq[:, j].min())
        hi = max(Xp[:, j].max(), Xq[:, j].max())
        if hi <= lo:
            out[j] = 0.0
            continue
        cp, edges = np.histogram(Xp[:, j], bins=bins, range=(lo, hi))
        cq, _ = np.histogram(Xq[:, j], bins=bins, range=(lo, hi))
        p = (cp + 1.0) / (cp.sum() + bins)
        q = (cq + 1.0) / (cq.sum() + bins)
        out[j] = float(np.sum(p * np.log(p / q)))
    return out


def save_matrix(matrix, csv_path, json_path=None):
    csv_path = Path(csv_path)
    csv_path.write_text(matrix.to_csv(), encoding="utf-8")
    if json_path is None:
        json_path = csv_path.with_suffix(".json")
    Path(json_path).write_text(json.dumps(matrix.to_dict()), encoding="utf-8")
    return csv_path, Path(json_path)
