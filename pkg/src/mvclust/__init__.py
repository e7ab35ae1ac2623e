"""Multi-view ensemble clustering engine and robustness benchmark for
image-set sorting: feature I/O, k-means and agglomerative clustering,
NMI/purity evaluation, co-association consensus, and a seeded benchmark
protocol with CSV/markdown/figure reports."""

from .bench import BenchmarkReport, BenchmarkRow, MvecRow, run_benchmark, run_mvec
from .cluster import (
    AgglomerativeConfig,
    Dendrogram,
    KMeansConfig,
    agglomerate_distance,
    agglomerate_features,
    agglomerative_fit_distance,
    agglomerative_fit_features,
    kmeans_fit,
    kmeanspp_init,
    pairwise_euclidean,
)
from .core import (
    DimensionMismatchError,
    FeatureIOError,
    MalformedHeaderError,
    ManifestError,
    MissingConditionError,
    MultiViewDataset,
    NonFiniteValueError,
    ObjectRecord,
    ViewRef,
    assemble_views,
    canonicalize,
    l2_normalize,
    load_features,
    load_manifest,
    restrict_to_condition,
    save_features,
    select_views,
)
from .ensemble import (
    CoAssociationMatrix,
    MvecConfig,
    MvecDiagnostics,
    MvecResult,
    accumulate_coassociation,
    consensus,
    generate_partitions,
    mvec_run,
    sample_view_assignment,
)
from .metrics import contingency, inertia, nmi, purity

__version__ = "0.1.0"

__all__ = [
    "AgglomerativeConfig",
    "BenchmarkReport",
    "BenchmarkRow",
    "CoAssociationMatrix",
    "Dendrogram",
    "DimensionMismatchError",
    "FeatureIOError",
    "KMeansConfig",
    "MalformedHeaderError",
    "ManifestError",
    "MissingConditionError",
    "MultiViewDataset",
    "MvecConfig",
    "MvecDiagnostics",
    "MvecResult",
    "MvecRow",
    "NonFiniteValueError",
    "ObjectRecord",
    "ViewRef",
    "accumulate_coassociation",
    "agglomerate_distance",
    "agglomerate_features",
    "agglomerative_fit_distance",
    "agglomerative_fit_features",
    "assemble_views",
    "canonicalize",
    "consensus",
    "contingency",
    "generate_partitions",
    "inertia",
    "kmeans_fit",
    "kmeanspp_init",
    "l2_normalize",
    "load_features",
    "load_manifest",
    "mvec_run",
    "nmi",
    "pairwise_euclidean",
    "purity",
    "restrict_to_condition",
    "run_benchmark",
    "run_mvec",
    "sample_view_assignment",
    "save_features",
    "select_views",
]
