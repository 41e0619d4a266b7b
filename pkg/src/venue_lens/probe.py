"""Logistic-regression separability probes between venue pairs.

The classifier is a bias-augmented L2-penalized logistic regression with the
loss and gradient written out analytically (see ``logistic_loss_grad``) and
driven by L-BFGS to a gradient tolerance of 1e-6 or 2000 iterations.
``train_probe`` wraps it in the evaluation protocol: downsample the larger
class to the smaller (seeded), stratified 80/20 split, per-fold
standardization, validation accuracy on the held-out split.

The split ratio, regularization strength, balancing rule, and seeding policy
are this package's defaults; all are overridable per call.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .errors import ConfigurationError
from .validation import as_matrix

MIN_CLASS_SIZE = 20
VAL_FRACTION = 0.2
L2_PENALTY = 1e-3
GRAD_TOL = 1e-6
MAX_ITER = 2000


def logistic_loss_grad(params, X, y, l2):
    """Mean logistic loss with L2 penalty on weights (not bias), and its gradient.

    ``params`` is the flat vector [w_1..w_d, b]. Loss uses the stable
    ``log(1 + e^z) - y*z`` form; gradient is X^T(sigma(z) - y)/n + l2*w.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    n = X.shape[0]
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    residual = expit(z) - y
    grad = np.empty_like(params)
    grad[:-1] = X.T @ residual / n + l2 * w
    grad[-1] = residual.mean()
    return loss, grad


class LogisticProbe(BaseEstimator, ClassifierMixin):
    """Binary logistic regression fit by L-BFGS over the analytic gradient."""

    def __init__(self, l2=L2_PENALTY, tol=GRAD_TOL, max_iter=MAX_ITER):
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = as_matrix(X, "X")
        y = np.asarray(y, dtype=np.float64)
        if set(np.unique(y)) - {0.0, 1.0}:
            raise ValueError("y must contain only labels 0 and 1")
        x0 = np.zeros(X.shape[1] + 1)
        result = minimize(
            logistic_loss_grad,
            x0,
            args=(X, y, self.l2),
            method="L-BFGS-B",
            jac=True,
            options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-15},
        )
        self.coef_ = result.x[:-1]
        self.intercept_ = float(result.x[-1])
        self.n_iter_ = int(result.nit)
        self.converged_ = bool(np.max(np.abs(result.jac)) <= self.tol)
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError("LogisticProbe is not fitted; call fit first")
        X = as_matrix(X, "X")
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p1 = expit(self.decision_function(X))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(int)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))


@dataclass(frozen=True)
class ProbeResult:
    """Validation accuracy of one venue-pair probe; counts are per class."""

    venue_a: str
    venue_b: str
    year_filter: int | None
    n_train: int
    n_val: int
    val_accuracy: float | None
    seed: int
    converged: bool | None
    skipped: bool = False
    skip_reason: str | None = None


def train_probe(
    Xa,
    Xb,
    seed,
    venue_a="A",
    venue_b="B",
    year=None,
    min_class_size=MIN_CLASS_SIZE,
    l2=L2_PENALTY,
    tol=GRAD_TOL,
    max_iter=MAX_ITER,
):
    """Balanced, standardized, held-out probe between two reduced-vector sets.

    Deterministic for a fixed seed, and invariant under exchanging the two
    classes: inputs are canonicalized by venue code before any random draw.
    Classes smaller than ``min_class_size`` yield a skipped marker rather
    than an accuracy.
    """
    if venue_b < venue_a:
        Xa, Xb = Xb, Xa
        first, second = venue_b, venue_a
    else:
        first, second = venue_a, venue_b

    if min(len(Xa), len(Xb)) < min_class_size:
        return ProbeResult(
            venue_a=venue_a,
            venue_b=venue_b,
            year_filter=year,
            n_train=0,
            n_val=0,
            val_accuracy=None,
            seed=seed,
            converged=None,
            skipped=True,
            skip_reason=(
                f"class below min size {min_class_size}: "
                f"{first}={len(Xa)}, {second}={len(Xb)}"
            ),
        )

    Xa = as_matrix(Xa, "Xa")
    Xb = as_matrix(Xb, "Xb")
    rng = np.random.default_rng(seed)
    m = min(Xa.shape[0], Xb.shape[0])
    n_val = max(1, int(m * VAL_FRACTION))
    n_train = m - n_val

    train_parts, val_parts = [], []
    for X in (Xa, Xb):
        order = rng.permutation(X.shape[0])[:m]
        val_parts.append(X[order[:n_val]])
        train_parts.append(X[order[n_val:]])
    X_train = np.vstack(train_parts)
    y_train = np.concatenate([np.zeros(n_train), np.ones(n_train)])
    X_val = np.vstack(val_parts)
    y_val = np.concatenate([np.zeros(n_val), np.ones(n_val)])

    # standardize with training-fold statistics only
    mu = X_train.mean(axis=0)
    sd = np.maximum(X_train.std(axis=0), 1e-12)
    model = LogisticProbe(l2=l2, tol=tol, max_iter=max_iter)
    model.fit((X_train - mu) / sd, y_train)
    accuracy = model.score((X_val - mu) / sd, y_val)

    return ProbeResult(
        venue_a=venue_a,
        venue_b=venue_b,
        year_filter=year,
        n_train=n_train,
        n_val=n_val,
        val_accuracy=accuracy,
        seed=seed,
        converged=model.converged_,
    )


def train_probe_averaged(Xa, Xb, seed, n_seeds=1, **kwargs):
    """Average val_accuracy over consecutive seeds for a steadier reading.

    Returns a single ProbeResult carrying the mean accuracy; converged is
    true only when every run converged. With n_seeds=1 this is train_probe.
    """
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    results = [train_probe(Xa, Xb, seed=seed + i, **kwargs) for i in range(n_seeds)]
    first = results[0]
    if first.skipped or n_seeds == 1:
        return first
    return replace(
        first,
        val_accuracy=float(np.mean([r.val_accuracy for r in results])),
        converged=all(r.converged for r in results),
    )


def probe_pairs(
    reduced, pairs=None, per_year=False, seed=17, n_seeds=1, min_class_size=MIN_CLASS_SIZE
):
    """Run probes for the requested venue pairs (all unordered pairs by default)."""
    codes = reduced.venue_codes
    if pairs is None:
        pairs = [(a, b) for i, a in enumerate(codes) for b in codes[i + 1 :]]
    results = []
    for venue_a, venue_b in pairs:
        for code in (venue_a, venue_b):
            if code not in codes:
                raise ConfigurationError(f"unknown venue code '{code}'")
        years = reduced.year_range if per_year else [None]
        for year in years:
            results.append(
                train_probe_averaged(
                    reduced.select(venue=venue_a, year=year),
                    reduced.select(venue=venue_b, year=year),
                    seed=seed,
                    n_seeds=n_seeds,
                    venue_a=venue_a,
                    venue_b=venue_b,
                    year=year,
                    min_class_size=min_class_size,
                )
            )
    return results
