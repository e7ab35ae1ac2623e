"""Robustness benchmark: sample many one-view-per-object clustering problems
per condition and aggregate NMI/purity per (condition, algorithm).

Problem p of condition c draws its pose choices from substream
(seed, condition_index, p); KM repeat r inside that problem is seeded by the
child key (seed, condition_index, p, r). Streams are keyed by the condition's
index in the manifest's declared list, so per-condition numbers do not depend
on which conditions an invocation asks for.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cluster import KMeansConfig, agglomerative_fit_features, kmeans_fit
from .core import MultiViewDataset, assemble_views, l2_normalize, restrict_to_condition
from .ensemble import MvecConfig, MvecResult, mvec_run, sample_view_assignment
from .metrics import nmi, purity
from .seeding import child_seed, substream

ALGORITHMS = ("agglomerative", "kmeans")


@dataclass(frozen=True)
class BenchmarkRow:
    condition: str
    algorithm: str
    config: str
    nmi_mean: float
    purity_mean: float
    n_problems: int
    km_repeats: int
    wall_time_s: float


@dataclass(frozen=True)
class PerProblemRow:
    condition: str
    algorithm: str
    problem: int
    nmi: float
    purity: float


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)
    per_problem: list[PerProblemRow] = field(default_factory=list)
    nmi_normalization: str = "geometric"
    seed: int = 0


def _problem_scores(
    rds: MultiViewDataset,
    seed: int,
    cond_index: int,
    problem: int,
    algorithm: str,
    k: int,
    linkage: str,
    km_repeats: int,
    n_init: int,
    normalize: bool,
    nmi_norm: str,
) -> tuple[float, float]:
    rng = substream(seed, cond_index, problem)
    x, truth = assemble_views(rds, sample_view_assignment(rds, rng))
    if normalize:
        x = l2_normalize(x)
    if algorithm == "agglomerative":
        labels = agglomerative_fit_features(x, k, linkage)
        return nmi(labels, truth, nmi_norm), purity(labels, truth)
    nmis, purs = [], []
    for r in range(km_repeats):
        cfg = KMeansConfig(k=k, n_init=n_init, seed=child_seed(seed, cond_index, problem, r))
        labels, _ = kmeans_fit(x, cfg)
        nmis.append(nmi(labels, truth, nmi_norm))
        purs.append(purity(labels, truth))
    return float(np.mean(nmis)), float(np.mean(purs))


def run_benchmark(
    ds: MultiViewDataset,
    conditions=None,
    algorithms=ALGORITHMS,
    n_problems: int = 1000,
    km_repeats: int = 10,
    seed: int = 0,
    linkage: str = "ward",
    n_init: int = 10,
    normalize_features: bool = False,
    nmi_normalization: str = "geometric",
    workers: int = 1,
    keep_per_problem: bool = False,
) -> BenchmarkReport:
    """Per-condition mean NMI/purity over n_problems sampled pose combinations.

    k is set to the number of distinct ground-truth classes; the manifest must
    carry labels. KM scores are averaged over km_repeats independent seeds per
    problem; the reported mean is the arithmetic mean of per-problem scores.
    """
    if not ds.has_labels:
        raise ValueError("benchmark requires a manifest with ground-truth class labels")
    if n_problems < 1:
        raise ValueError(f"n_problems must be >= 1, got {n_problems}")
    if km_repeats < 1:
        raise ValueError(f"km_repeats must be >= 1, got {km_repeats}")
    if conditions is None:
        conditions = ds.conditions
    if not algorithms:
        raise ValueError("need at least one algorithm")
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {alg!r}")
    k = ds.n_classes()
    report = BenchmarkReport(nmi_normalization=nmi_normalization, seed=seed)
    for condition in conditions:
        if condition not in ds.conditions:
            raise ValueError(f"condition {condition!r} not declared in manifest")
        cond_index = ds.conditions.index(condition)
        rds = restrict_to_condition(ds, condition)
        for algorithm in algorithms:
            start = time.perf_counter()

            def one(p: int) -> tuple[float, float]:
                return _problem_scores(
                    rds, seed, cond_index, p, algorithm, k, linkage,
                    km_repeats, n_init, normalize_features, nmi_normalization,
                )

            if workers <= 1:
                scores = [one(p) for p in range(n_problems)]
            else:
                with ThreadPoolExecutor(max_workers=workers) as ex:
                    scores = list(ex.map(one, range(n_problems)))
            elapsed = time.perf_counter() - start
            nmis = np.array([s[0] for s in scores])
            purs = np.array([s[1] for s in scores])
            # ';'-separated so the config survives as one CSV field
            if algorithm == "agglomerative":
                config = f"linkage={linkage}"
            else:
                config = f"n_init={n_init}"
            if normalize_features:
                config += ";l2"
            config += f";nmi={nmi_normalization}"
            report.rows.append(
                BenchmarkRow(
                    condition=condition,
                    algorithm=algorithm,
                    config=config,
                    nmi_mean=float(nmis.mean()),
                    purity_mean=float(purs.mean()),
                    n_problems=n_problems,
                    km_repeats=km_repeats if algorithm == "kmeans" else 1,
                    wall_time_s=elapsed,
                )
            )
            if keep_per_problem:
                report.per_problem.extend(
                    PerProblemRow(condition, algorithm, p, float(nmis[p]), float(purs[p]))
                    for p in range(n_problems)
                )
    return report


@dataclass(frozen=True)
class MvecRow:
    condition: str
    algorithm: str
    config: str
    nmi: float | None
    purity: float | None
    nmi_single_mean: float | None
    purity_single_mean: float | None
    n_partitions: int
    wall_time_s: float


def run_mvec(
    ds: MultiViewDataset,
    condition: str,
    cfg: MvecConfig,
    workers: int = 1,
    nmi_normalization: str = "geometric",
    normalize_features: bool = False,
) -> tuple[MvecResult, MvecRow]:
    """MVEC over one condition, plus a report row with consensus NMI/purity and
    the mean single-view scores for the parenthesized single-view comparison."""
    rds = restrict_to_condition(ds, condition)
    start = time.perf_counter()
    result = mvec_run(
        rds, cfg, workers=workers, nmi_normalization=nmi_normalization,
        normalize_features=normalize_features,
    )
    elapsed = time.perf_counter() - start
    truth = rds.class_partition()
    cons_nmi = cons_pur = None
    if truth is not None:
        cons_nmi = nmi(result.consensus, truth, nmi_normalization)
        cons_pur = purity(result.consensus, truth)
    base = cfg.base
    base_name = "kmeans" if isinstance(base, KMeansConfig) else "agglomerative"
    base_desc = (
        f"n_init={base.n_init}" if isinstance(base, KMeansConfig) else f"linkage={base.linkage}"
    )
    if normalize_features:
        base_desc += ";l2"
    row = MvecRow(
        condition=condition,
        algorithm=f"mvec({base_name})",
        config=f"{base_desc};consensus={cfg.consensus_linkage};nmi={nmi_normalization}",
        nmi=cons_nmi,
        purity=cons_pur,
        nmi_single_mean=result.diagnostics.mean_nmi,
        purity_single_mean=result.diagnostics.mean_purity,
        n_partitions=cfg.n_partitions,
        wall_time_s=elapsed,
    )
    return result, row
