"""Year-over-year venue-pair series: divergence, probe accuracy, and trends.

Raw series values are left untouched; the normalized view rescales each
series to [0, 1] by per-series min-max, matching the within-panel
normalization used for readability in the source figures. Missing years
(too few samples on either side) stay missing; nothing is interpolated.

A falling divergence and a falling probe accuracy both mean the two venues
are becoming harder to tell apart, so for both metrics a significantly
negative slope maps to ``converging``; the applicable convention string is
embedded in each series' output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .divergence import fit_distribution, kl_per_feature, variance_weighted
from .errors import ConfigurationError, InsufficientSamplesError
from .probe import MIN_CLASS_SIZE, train_probe

METRIC_DIVERGENCE = "divergence"
METRIC_ACCURACY = "accuracy"

CONVENTIONS = {
    METRIC_DIVERGENCE: "slope<0 means divergence is falling: venues converging",
    METRIC_ACCURACY: "slope<0 means separability is falling: venues converging",
}

DIRECTION_CONVERGING = "converging"
DIRECTION_DIVERGING = "diverging"
DIRECTION_FLAT = "flat"

# |slope| below this fraction of the series mean counts as flat
FLAT_SLOPE_FRACTION = 0.01


def min_max_normalize(values):
    """Per-series min-max to [0, 1]; constant series map to zeros, None stays None."""
    present = [v for v in values if v is not None]
    if not present:
        return [None] * len(values)
    lo, hi = min(present), max(present)
    span = hi - lo
    out = []
    for v in values:
        if v is None:
            out.append(None)
        elif span == 0:
            out.append(0.0)
        else:
            out.append((v - lo) / span)
    return out


@dataclass
class DriftSeries:
    """One anchor/counterpart pair's yearly metric values."""

    anchor: str
    counterpart: str
    metric: str
    years: list
    raw: list
    normalized: list = field(default_factory=list)

    def __post_init__(self):
        if not self.normalized:
            self.normalized = min_max_normalize(self.raw)

    def present(self):
        """(years, values) restricted to non-missing entries."""
        pairs = [(y, v) for y, v in zip(self.years, self.raw) if v is not None]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def to_dict(self, include_normalized=True):
        try:
            t = trend(self)
            slope, direction = t.slope, t.direction
        except InsufficientSamplesError:
            slope, direction = None, None
        return {
            "anchor": self.anchor,
            "counterpart": self.counterpart,
            "metric": self.metric,
            "years": list(self.years),
            "raw": list(self.raw),
            "normalized": list(self.normalized) if include_normalized else None,
            "slope": slope,
            "direction": direction,
            "convention": CONVENTIONS[self.metric],
        }


@dataclass(frozen=True)
class Trend:
    slope: float
    direction: str
    convention: str


def trend(series):
    """OLS slope per year over the non-missing raw values, with a direction label.

    Flat when |slope| is within 1% of the series mean; otherwise a negative
    slope means converging for both metrics (see module docstring).
    """
    years, values = series.present()
    if len(values) < 3:
        raise InsufficientSamplesError(
            f"insufficient series: need at least 3 non-missing points, got {len(values)}"
        )
    slope = float(np.polyfit(np.asarray(years, dtype=float), np.asarray(values), 1)[0])
    threshold = FLAT_SLOPE_FRACTION * abs(float(np.mean(values)))
    if abs(slope) <= threshold:
        direction = DIRECTION_FLAT
    elif slope < 0:
        direction = DIRECTION_CONVERGING
    else:
        direction = DIRECTION_DIVERGING
    return Trend(slope=slope, direction=direction, convention=CONVENTIONS[series.metric])


def _check_venues(reduced, *codes):
    known = set(reduced.venue_codes)
    for code in codes:
        if code not in known:
            raise ConfigurationError(
                f"unknown venue code '{code}' (known: {sorted(known)})"
            )


def yearly_divergence(reduced, explained_ratio, anchor, counterpart, model_id=None):
    """Directed variance-weighted KL anchor->counterpart, one value per corpus year.

    Years where either venue has fewer than 2 samples are missing.
    """
    _check_venues(reduced, anchor, counterpart)
    years = reduced.year_range
    raw = []
    for year in years:
        Xa = reduced.select(venue=anchor, year=year)
        Xb = reduced.select(venue=counterpart, year=year)
        if Xa.shape[0] < 2 or Xb.shape[0] < 2:
            raw.append(None)
            continue
        p = fit_distribution(Xa, venue=anchor, year=year, model_id=model_id)
        q = fit_distribution(Xb, venue=counterpart, year=year, model_id=model_id)
        raw.append(variance_weighted(kl_per_feature(p, q), explained_ratio))
    return DriftSeries(
        anchor=anchor, counterpart=counterpart, metric=METRIC_DIVERGENCE, years=years, raw=raw
    )


def yearly_probe(reduced, anchor, counterpart, seed, min_class_size=MIN_CLASS_SIZE):
    """Probe validation accuracy per year; years skipped by class size are missing."""
    _check_venues(reduced, anchor, counterpart)
    years = reduced.year_range
    raw = []
    for year in years:
        result = train_probe(
            reduced.select(venue=anchor, year=year),
            reduced.select(venue=counterpart, year=year),
            seed=seed,
            venue_a=anchor,
            venue_b=counterpart,
            year=year,
            min_class_size=min_class_size,
        )
        raw.append(None if result.skipped else result.val_accuracy)
    return DriftSeries(
        anchor=anchor, counterpart=counterpart, metric=METRIC_ACCURACY, years=years, raw=raw
    )


def drift_series_for_anchor(
    reduced, anchor, metric, explained_ratio=None, seed=17, model_id=None
):
    """All counterpart series for one anchor venue, counterparts sorted by code."""
    _check_venues(reduced, anchor)
    series = []
    for counterpart in reduced.venue_codes:
        if counterpart == anchor:
            continue
        if metric == METRIC_DIVERGENCE:
            if explained_ratio is None:
                raise ValueError("divergence drift needs the model's explained_ratio weights")
            series.append(
                yearly_divergence(reduced, explained_ratio, anchor, counterpart, model_id)
            )
        elif metric == METRIC_ACCURACY:
            series.append(yearly_probe(reduced, anchor, counterpart, seed))
        else:
            raise ValueError(f"unknown drift metric '{metric}'")
    return series
