"""venue-lens: venue similarity and convergence analytics over document embeddings."""

from .corpus import (
    DEFAULT_VENUES,
    DocumentRecord,
    IngestManifest,
    VenueSpec,
    finalize,
    load_corpus,
    save_corpus,
)
from .divergence import (
    DivergenceMatrix,
    VenueDistribution,
    divergence_matrix,
    fit_distribution,
    kl_per_feature,
    variance_weighted,
)
from .drift import DriftSeries, trend, yearly_divergence, yearly_probe
from .explore import CorpusExplorer, PointProjection, TermSuggestion
from .probe import LogisticProbe, ProbeResult, train_probe
from .reduction import PcaReducer, ReducedCorpus, ReducedVector, project

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_VENUES",
    "CorpusExplorer",
    "DivergenceMatrix",
    "DocumentRecord",
    "DriftSeries",
    "IngestManifest",
    "LogisticProbe",
    "PcaReducer",
    "PointProjection",
    "ProbeResult",
    "ReducedCorpus",
    "ReducedVector",
    "TermSuggestion",
    "VenueDistribution",
    "VenueSpec",
    "divergence_matrix",
    "finalize",
    "fit_distribution",
    "kl_per_feature",
    "load_corpus",
    "project",
    "save_corpus",
    "train_probe",
    "trend",
    "variance_weighted",
    "yearly_divergence",
    "yearly_probe",
    "__version__",
]
