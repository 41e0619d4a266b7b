"""Principal component reduction of document embeddings.

``PcaReducer`` follows the scikit-learn estimator protocol (``fit`` /
``transform`` / ``get_params``) so it composes with pipelines, but the
decomposition itself is computed here: eigendecomposition of the sample
covariance (denominator n-1), components ordered by decreasing eigenvalue,
with each component's sign fixed so its largest-magnitude entry is positive.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import CorpusFormatError, InsufficientSamplesError
from .validation import as_matrix, as_vector

DEFAULT_COMPONENTS = 64


@dataclass(frozen=True)
class ReducedVector:
    """Projection of one document, coordinates ordered by explained variance."""

    doc_id: str
    coords: np.ndarray


class PcaReducer(BaseEstimator, TransformerMixin):
    """Project embeddings onto the top principal axes of the pooled corpus.

    Fitted attributes:
        mean_: (d,) training mean
        components_: (k, d) orthonormal principal axes, rows sorted by
            decreasing explained variance
        explained_variance_: (k,) covariance eigenvalues
        explained_variance_ratio_: (k,) eigenvalue / total variance
        total_variance_: trace of the training covariance
    """

    def __init__(self, n_components=DEFAULT_COMPONENTS):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        n, d = X.shape
        k = self.n_components
        if not 1 <= k <= d:
            raise ValueError(f"n_components must be in [1, {d}], got {k}")
        if n < k:
            raise InsufficientSamplesError(
                f"insufficient samples: n={n} rows cannot support {k} components"
            )
        mean = X.mean(axis=0)
        centered = X - mean
        cov = centered.T @ centered / (n - 1)
        total = float(np.trace(cov))
        if total <= 0.0:
            raise ValueError("zero-variance input: all rows are identical")
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][:k]
        eigvals = np.maximum(eigvals[order], 0.0)
        components = eigvecs[:, order].T
        for row in components:
            if row[np.argmax(np.abs(row))] < 0:
                row *= -1.0
        self.mean_ = mean
        self.components_ = components
        self.explained_variance_ = eigvals
        self.explained_variance_ratio_ = eigvals / total
        self.total_variance_ = total
        self.n_samples_ = n
        self.n_features_in_ = d
        return self

    def _check_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError("PcaReducer is not fitted; call fit first")

    def transform(self, X):
        self._check_fitted()
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"dimension mismatch: model expects {self.n_features_in_} features, "
                f"got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        self._check_fitted()
        Z = as_matrix(Z, "Z")
        return Z @ self.components_ + self.mean_

    @property
    def model_id(self):
        """Stable fingerprint of the fitted basis, used to guard comparisons."""
        self._check_fitted()
        digest = hashlib.sha256()
        digest.update(self.mean_.tobytes())
        digest.update(self.components_.tobytes())
        return digest.hexdigest()[:16]

    def to_dict(self):
        self._check_fitted()
        return {
            "n_components": int(self.components_.shape[0]),
            "mean": self.mean_.tolist(),
            "basis": self.components_.tolist(),
            "explained_variance": self.explained_variance_.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio_.tolist(),
            "total_variance": self.total_variance_,
            "n_samples": self.n_samples_,
        }

    @classmethod
    def from_dict(cls, payload):
        model = cls(n_components=payload["n_components"])
        model.components_ = np.asarray(payload["basis"], dtype=np.float64)
        model.mean_ = np.asarray(payload["mean"], dtype=np.float64)
        model.explained_variance_ = np.asarray(payload["explained_variance"], dtype=np.float64)
        model.explained_variance_ratio_ = np.asarray(
            payload["explained_variance_ratio"], dtype=np.float64
        )
        model.total_variance_ = float(payload["total_variance"])
        model.n_samples_ = int(payload["n_samples"])
        model.n_features_in_ = model.components_.shape[1]
        return model


def project(model, embedding):
    """Project a single embedding; returns the (k,) coordinate vector."""
    model._check_fitted()
    vec = as_vector(embedding, "embedding", size=model.n_features_in_)
    return model.transform(vec.reshape(1, -1))[0]


def save_model(model, path):
    Path(path).write_text(json.dumps(model.to_dict()), encoding="utf-8")
    return Path(path)


def load_model(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return PcaReducer.from_dict(payload)


class ReducedCorpus:
    """Column-oriented view of a reduced corpus: ids, venues, years, coordinates."""

    def __init__(self, doc_ids, venues, years, X):
        self.doc_ids = list(doc_ids)
        self.venues = np.asarray(venues, dtype=object)
        self.years = np.asarray(years, dtype=np.int64)
        self.X = np.asarray(X, dtype=np.float64)
        if not (len(self.doc_ids) == len(self.venues) == len(self.years) == self.X.shape[0]):
            raise ValueError("doc_ids, venues, years, and X must have equal length")

    def __len__(self):
        return self.X.shape[0]

    @property
    def venue_codes(self):
        return sorted(set(self.venues.tolist()))

    @property
    def year_range(self):
        return sorted(set(self.years.tolist()))

    def select(self, venue=None, year=None):
        """Rows for one venue and/or one year, as an (m, k) matrix."""
        mask = np.ones(len(self), dtype=bool)
        if venue is not None:
            mask &= self.venues == venue
        if year is not None:
            mask &= self.years == year
        return self.X[mask]

    @classmethod
    def from_records(cls, records, model):
        from .corpus import embedding_matrix

        X = model.transform(embedding_matrix(records))
        return cls(
            doc_ids=[r.doc_id for r in records],
            venues=[r.venue for r in records],
            years=[r.year for r in records],
            X=X,
        )


def save_reduced(reduced, path):
    """Write reduced vectors as JSONL rows of ``{doc_id, venue, year, coords}``."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for i in range(len(reduced)):
            row = {
                "doc_id": reduced.doc_ids[i],
                "venue": reduced.venues[i],
                "year": int(reduced.years[i]),
                "coords": reduced.X[i].tolist(),
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return Path(path)


def load_reduced(path):
    doc_ids, venues, years, coords = [], [], [], []
    width = None
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
            for name in ("doc_id", "venue", "year", "coords"):
                if name not in row:
                    raise CorpusFormatError(
                        f"line {line_no}: missing field '{name}'", line_no=line_no, field=name
                    )
            vec = np.asarray(row["coords"], dtype=np.float64)
            if width is None:
                width = vec.shape[0]
            if vec.ndim != 1 or vec.shape[0] != width or not np.all(np.isfinite(vec)):
                raise CorpusFormatError(
                    f"line {line_no}: field 'coords' must be {width} finite reals",
                    line_no=line_no,
                    field="coords",
                )
            doc_ids.append(row["doc_id"])
            venues.append(row["venue"])
            years.append(row["year"])
            coords.append(vec)
    if not doc_ids:
        return ReducedCorpus([], [], [], np.empty((0, 0)))
    return ReducedCorpus(doc_ids, venues, years, np.vstack(coords))
