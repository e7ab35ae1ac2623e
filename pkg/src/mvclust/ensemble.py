"""Multi-view consensus clustering: sample one view per object, cluster,
repeat N times, tally pairwise co-occurrences, and extract the consensus
partition from the co-association matrix used as a similarity.

Co-occurrences are accumulated as integers and divided by N only at read
time, so parallel reduction is exact and order-free. Partition t draws from
the named substream (seed, t); results are identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .cluster import (
    DISTANCE_LINKAGES,
    AgglomerativeConfig,
    KMeansConfig,
    agglomerative_fit_distance,
    agglomerative_fit_features,
    kmeans_fit,
)
from .core import MultiViewDataset, assemble_views, l2_normalize
from .metrics import nmi, purity
from .seeding import child_seed, substream


@dataclass(frozen=True)
class CoAssociationMatrix:
    """Pairwise co-occurrence tallies over n_partitions base partitions.

    counts is symmetric int64 with counts[i, i] == n_partitions; values are the
    co-occurrence fractions counts / n_partitions, exact multiples of 1/N.
    """

    counts: np.ndarray
    n_partitions: int

    @property
    def n_objects(self) -> int:
        return self.counts.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self.counts / self.n_partitions


@dataclass(frozen=True)
class MvecConfig:
    """Ensemble run configuration. When base is a KMeansConfig, its k and seed
    are overridden per partition (k from this config, seed from the partition's
    substream); its other fields are kept."""

    k: int
    n_partitions: int = 1000
    base: KMeansConfig | AgglomerativeConfig = AgglomerativeConfig()
    consensus_linkage: str = "average"
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_partitions < 1:
            raise ValueError(f"n_partitions must be >= 1, got {self.n_partitions}")
        if self.consensus_linkage not in DISTANCE_LINKAGES:
            raise ValueError(f"unknown consensus linkage {self.consensus_linkage!r}")


@dataclass(frozen=True)
class MvecDiagnostics:
    """Per-partition scores against ground truth (None when unlabeled), plus
    the exact configuration so a run can be replicated."""

    per_partition_nmi: tuple[float, ...] | None
    per_partition_purity: tuple[float, ...] | None
    config: MvecConfig

    @property
    def mean_nmi(self) -> float | None:
        if self.per_partition_nmi is None:
            return None
        return float(np.mean(self.per_partition_nmi))

    @property
    def mean_purity(self) -> float | None:
        if self.per_partition_purity is None:
            return None
        return float(np.mean(self.per_partition_purity))


@dataclass(frozen=True)
class MvecResult:
    consensus: np.ndarray
    coassociation: CoAssociationMatrix
    diagnostics: MvecDiagnostics


def sample_view_assignment(ds: MultiViewDataset, rng: np.random.Generator) -> np.ndarray:
    """Independent uniform view index per object."""
    counts = np.array([len(o.views) for o in ds.objects])
    if np.any(counts < 1):
        raise ValueError("every object needs at least one view")
    return rng.integers(0, counts)


def _partition_once(
    ds: MultiViewDataset, cfg: MvecConfig, t: int, normalize: bool
) -> np.ndarray:
    rng = substream(cfg.seed, t, 0)
    choice = sample_view_assignment(ds, rng)
    x, _ = assemble_views(ds, choice)
    if normalize:
        x = l2_normalize(x)
    if isinstance(cfg.base, KMeansConfig):
        kcfg = replace(cfg.base, k=cfg.k, seed=child_seed(cfg.seed, t, 1))
        labels, _ = kmeans_fit(x, kcfg)
        return labels
    return agglomerative_fit_features(x, cfg.k, cfg.base.linkage)


def generate_partitions(
    ds: MultiViewDataset,
    cfg: MvecConfig,
    workers: int = 1,
    normalize_features: bool = False,
) -> list[np.ndarray]:
    """N base partitions, element t from substream (cfg.seed, t); output order
    is by t regardless of execution order or worker count."""
    indices = range(cfg.n_partitions)
    if workers <= 1:
        return [_partition_once(ds, cfg, t, normalize_features) for t in indices]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda t: _partition_once(ds, cfg, t, normalize_features), indices))


def accumulate_coassociation(partitions) -> CoAssociationMatrix:
    """Integer co-occurrence tallies over a list of equal-length partitions."""
    if len(partitions) == 0:
        raise ValueError("need at least one partition")
    lengths = {len(p) for p in partitions}
    if len(lengths) != 1:
        raise ValueError(f"partitions disagree on length: {sorted(lengths)}")
    n = lengths.pop()
    counts = np.zeros((n, n), dtype=np.int64)
    for p in partitions:
        row = np.asarray(p)
        counts += row[:, None] == row[None, :]
    return CoAssociationMatrix(counts, len(partitions))


def consensus(ca: CoAssociationMatrix, k: int, linkage: str = "average") -> np.ndarray:
    """Consensus partition: distances 1 - values, agglomerated and cut at k.

    Average linkage is the default because complete linkage is brittle when
    any pair never co-occurs (a single 0 entry pins whole-cluster distances
    at 1).
    """
    if not 1 <= k <= ca.n_objects:
        raise ValueError(f"k={k} out of range for n={ca.n_objects}")
    d = 1.0 - ca.values
    np.fill_diagonal(d, 0.0)
    return agglomerative_fit_distance(d, k, linkage)


def mvec_run(
    ds: MultiViewDataset,
    cfg: MvecConfig,
    workers: int = 1,
    nmi_normalization: str = "geometric",
    normalize_features: bool = False,
) -> MvecResult:
    """Full pipeline: generate partitions, accumulate co-occurrences, extract
    the consensus; diagnostics carry per-partition scores when labels exist."""
    partitions = generate_partitions(
        ds, cfg, workers=workers, normalize_features=normalize_features
    )
    ca = accumulate_coassociation(partitions)
    labels = consensus(ca, cfg.k, cfg.consensus_linkage)
    truth = ds.class_partition()
    per_nmi = per_pur = None
    if truth is not None:
        per_nmi = tuple(nmi(p, truth, nmi_normalization) for p in partitions)
        per_pur = tuple(purity(p, truth) for p in partitions)
    return MvecResult(labels, ca, MvecDiagnostics(per_nmi, per_pur, cfg))
