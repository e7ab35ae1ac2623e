"""Clustering evaluation: contingency tables, NMI, purity and k-means inertia.

All functions are pure and label-permutation invariant; inputs are any
integer-like label sequences of equal length.
"""

from __future__ import annotations

import numpy as np

from .core import canonicalize

NMI_NORMALIZATIONS = ("geometric", "arithmetic")


def _check_pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(pred)
    b = np.asarray(truth)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("label arrays must be 1-D")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"label arrays differ in length: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        raise ValueError("label arrays are empty")
    return canonicalize(a), canonicalize(b)


def contingency(pred, truth) -> np.ndarray:
    """counts[i, j] = number of elements in predicted cluster i and true class j.

    Clusters are indexed in canonical (first-appearance) order; the table sums
    to n, row sums are predicted cluster sizes, column sums true class sizes.
    """
    a, b = _check_pair(pred, truth)
    counts = np.zeros((int(a.max()) + 1, int(b.max()) + 1), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    return counts


def _entropy(p: np.ndarray) -> float:
    nz = p > 0
    return float(-(p[nz] * np.log(p[nz])).sum())


def nmi(pred, truth, normalization: str = "geometric") -> float:
    """Mutual information normalized by the geometric or arithmetic mean of the
    two partition entropies; base-invariant, in [0, 1].

    Degenerate rule: both entropies zero -> 1.0 (two single-cluster partitions
    over the same elements agree perfectly); exactly one zero -> 0.0.
    """
    if normalization not in NMI_NORMALIZATIONS:
        raise ValueError(f"unknown NMI normalization {normalization!r}")
    c = contingency(pred, truth).astype(np.float64)
    n = c.sum()
    ai = c.sum(axis=1)
    bj = c.sum(axis=0)
    hp = _entropy(ai / n)
    ht = _entropy(bj / n)
    if hp == 0.0 and ht == 0.0:
        return 1.0
    if hp == 0.0 or ht == 0.0:
        return 0.0
    nz = c > 0
    outer = np.outer(ai, bj)
    mi = float((c[nz] / n * np.log(n * c[nz] / outer[nz])).sum())
    if normalization == "geometric":
        denom = float(np.sqrt(hp * ht))
    else:
        denom = (hp + ht) / 2.0
    return float(min(max(mi / denom, 0.0), 1.0))


def purity(pred, truth) -> float:
    """Fraction of elements belonging to the majority true class of their cluster."""
    c = contingency(pred, truth)
    return float(c.max(axis=1).sum() / c.sum())


def inertia(m, labels) -> float:
    """Total squared distance of points to their cluster centroids, centroids
    recomputed from the partition. Raises if any index in [0, max_label] is unused."""
    x = np.asarray(m, dtype=np.float64)
    lab = np.asarray(labels)
    if lab.ndim != 1 or x.ndim != 2 or lab.shape[0] != x.shape[0]:
        raise ValueError(
            f"labels length {lab.shape} does not match matrix rows {x.shape}"
        )
    total = 0.0
    for j in range(int(lab.max()) + 1):
        pts = x[lab == j]
        if pts.shape[0] == 0:
            raise ValueError(f"cluster {j} is empty; centroid undefined")
        centroid = pts.mean(axis=0)
        total += float(((pts - centroid) ** 2).sum())
    return total
