"""K-means with D2-weighted seeding and agglomerative clustering via
Lance-Williams linkage updates.

Both algorithms are fully deterministic given their inputs: nearest-centroid
ties go to the lowest cluster index, dendrogram merge ties to the
lexicographically smallest cluster-id pair, and k-means restart r draws from
the named substream (seed, r). Restart results are reduced by minimal inertia
with ties broken by lowest restart index, so concurrent execution cannot
change the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import canonicalize, validate_features
from .seeding import substream

LINKAGES = ("ward", "average", "complete")
DISTANCE_LINKAGES = ("average", "complete")


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    n_init: int = 10
    max_iter: int = 300
    tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_init < 1 or self.max_iter < 1:
            raise ValueError("n_init and max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")


@dataclass(frozen=True)
class AgglomerativeConfig:
    linkage: str = "ward"

    def __post_init__(self):
        if self.linkage not in LINKAGES:
            raise ValueError(f"unknown linkage {self.linkage!r}")


def pairwise_euclidean(m) -> np.ndarray:
    """Euclidean distance matrix, exactly symmetric with zero diagonal.

    Row-chunked direct form; the ||x||^2 - 2x.y expansion is avoided because it
    breaks exact symmetry.
    """
    x = np.asarray(m, dtype=np.float64)
    n = x.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        d2 = ((x - x[i]) ** 2).sum(axis=1)
        np.sqrt(d2, out=out[i])
    np.fill_diagonal(out, 0.0)
    return out


# ---------------------------------------------------------------------------
# k-means


def kmeanspp_init(m, k: int, rng: np.random.Generator) -> np.ndarray:
    """D2-weighted centroid seeding: first pick uniform, then each next centroid
    sampled with probability proportional to squared distance to the nearest
    chosen one. Falls back to uniform picks (allowing duplicates) only when
    every remaining point coincides with a chosen centroid."""
    x = np.asarray(m, dtype=np.float64)
    n = x.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds number of rows n={n}")
    centroids = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = x[first]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            u = float(rng.random()) * total
            idx = int(np.searchsorted(np.cumsum(d2), u, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centroids[j] = x[idx]
        np.minimum(d2, ((x - centroids[j]) ** 2).sum(axis=1), out=d2)
    return centroids


def _assign_with_repair(x: np.ndarray, centroids: np.ndarray):
    """Nearest-centroid assignment (ties -> lowest index) followed by
    empty-cluster repair: the point farthest from its centroid, among donor
    clusters that keep >= 1 member, moves to the lowest empty cluster id."""
    n, k = x.shape[0], centroids.shape[0]
    d2 = np.empty((n, k))
    for j in range(k):
        d2[:, j] = ((x - centroids[j]) ** 2).sum(axis=1)
    labels = d2.argmin(axis=1)
    point_d2 = d2[np.arange(n), labels]
    while True:
        counts = np.bincount(labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            break
        donor_ok = counts[labels] >= 2
        candidates = np.where(donor_ok, point_d2, -np.inf)
        i = int(candidates.argmax())
        labels[i] = int(empties[0])
        point_d2[i] = 0.0
    return labels, point_d2


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int, tol_sq: float):
    """Lloyd iterations from the given centroids.

    Returns (labels, centroids, inertia, history) where history holds the
    assignment-step inertia of every iteration including the final pass, so
    tests can check monotone descent.
    """
    centroids = centroids.copy()
    k = centroids.shape[0]
    history = []
    for _ in range(max_iter):
        labels, point_d2 = _assign_with_repair(x, centroids)
        history.append(float(point_d2.sum()))
        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = x[labels == j].mean(axis=0)
        shift = float(((new_centroids - centroids) ** 2).sum())
        centroids = new_centroids
        if shift <= tol_sq:
            break
    labels, point_d2 = _assign_with_repair(x, centroids)
    inertia = float(point_d2.sum())
    history.append(inertia)
    return labels, centroids, inertia, history


def kmeans_fit(m, cfg: KMeansConfig) -> tuple[np.ndarray, float]:
    """Best of cfg.n_init seeded restarts (independent substreams of cfg.seed),
    judged by inertia with ties to the lowest restart index. Returns the
    canonical partition and its inertia."""
    x = validate_features(m)
    n = x.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds number of rows n={n}")
    tol_sq = cfg.tol * float(x.var(axis=0).mean())
    best_inertia = np.inf
    best_labels = None
    for r in range(cfg.n_init):
        rng = substream(cfg.seed, r)
        init = kmeanspp_init(x, cfg.k, rng)
        labels, _, inertia, _ = _lloyd(x, init, cfg.max_iter, tol_sq)
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels
    return canonicalize(best_labels), float(best_inertia)


# ---------------------------------------------------------------------------
# agglomerative


@dataclass(frozen=True)
class Dendrogram:
    """Bottom-up merge history. merges[m] = (id_a, id_b, height, new_size) with
    leaves 0..n-1 and merge m creating cluster id n+m; every id merges once."""

    merges: np.ndarray
    n_leaves: int

    def heights(self) -> np.ndarray:
        return self.merges[:, 2]

    def cut(self, k: int) -> np.ndarray:
        """Canonical partition with exactly k clusters (last k-1 merges undone)."""
        n = self.n_leaves
        if not 1 <= k <= n:
            raise ValueError(f"cannot cut {n}-leaf dendrogram into k={k} clusters")
        parent = np.arange(2 * n - 1)

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for m in range(n - k):
            a, b = int(self.merges[m, 0]), int(self.merges[m, 1])
            new = n + m
            parent[find(a)] = new
            parent[find(b)] = new
        return canonicalize([find(i) for i in range(n)])


def _lance_williams(dist: np.ndarray, linkage: str) -> Dendrogram:
    """Stored-matrix agglomeration. Upper-triangle slots double as cluster ids
    (merge m creates slot n+m, always the largest), so a row-major argmin picks
    the lexicographically smallest tied id pair."""
    d = np.asarray(dist, dtype=np.float64)
    n = d.shape[0]
    if n == 1:
        return Dendrogram(np.empty((0, 4)), 1)
    total = 2 * n - 1
    W = np.full((total, total), np.inf)
    iu = np.triu_indices(n, 1)
    W[iu] = d[iu]
    sizes = np.zeros(total)
    sizes[:n] = 1.0
    merges = np.empty((n - 1, 4))
    for step in range(n - 1):
        cur = n + step
        view = W[:cur, :cur]
        flat = int(np.argmin(view))
        i, j = divmod(flat, cur)
        h = float(view[i, j])
        si, sj = sizes[i], sizes[j]
        # combined distance vectors of i and j to every slot (inactive stay inf)
        di = np.minimum(W[i, :cur], W[:cur, i])
        dj = np.minimum(W[j, :cur], W[:cur, j])
        if linkage == "average":
            dn = (si * di + sj * dj) / (si + sj)
        elif linkage == "complete":
            dn = np.maximum(di, dj)
        elif linkage == "ward":
            sk = sizes[:cur]
            dn2 = ((si + sk) * di * di + (sj + sk) * dj * dj - sk * h * h) / (
                si + sj + sk
            )
            dn = np.sqrt(np.maximum(dn2, 0.0))
        else:
            raise ValueError(f"unknown linkage {linkage!r}")
        dn[i] = np.inf
        dn[j] = np.inf
        W[i, :cur] = np.inf
        W[:cur, i] = np.inf
        W[j, :cur] = np.inf
        W[:cur, j] = np.inf
        W[:cur, cur] = dn
        sizes[cur] = si + sj
        merges[step] = (i, j, h, si + sj)
    return Dendrogram(merges, n)


def _validate_distance(d) -> np.ndarray:
    x = np.asarray(d, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("distance matrix contains non-finite values")
    if not np.array_equal(x, x.T):
        raise ValueError("distance matrix is asymmetric")
    if np.any(np.diag(x) != 0.0):
        raise ValueError("distance matrix has a non-zero diagonal")
    if np.any(x < 0.0):
        raise ValueError("distance matrix has negative entries")
    return x


def agglomerate_features(m, linkage: str = "ward") -> Dendrogram:
    """Full dendrogram over rows of m under Euclidean distance."""
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}")
    x = validate_features(m)
    return _lance_williams(pairwise_euclidean(x), linkage)


def agglomerate_distance(d, linkage: str = "average") -> Dendrogram:
    """Full dendrogram over a precomputed distance matrix (ward not allowed)."""
    if linkage == "ward":
        raise ValueError("ward linkage requires raw features, not precomputed distances")
    if linkage not in DISTANCE_LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}")
    return _lance_williams(_validate_distance(d), linkage)


def agglomerative_fit_features(m, k: int, linkage: str = "ward") -> np.ndarray:
    """Agglomerative clustering of feature rows, cut to exactly k clusters."""
    x = validate_features(m)
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k={k} out of range for n={x.shape[0]}")
    return agglomerate_features(x, linkage).cut(k)


def agglomerative_fit_distance(d, k: int, linkage: str = "average") -> np.ndarray:
    """Agglomerative clustering of a precomputed distance matrix, cut to k."""
    dend = agglomerate_distance(d, linkage)
    if not 1 <= k <= dend.n_leaves:
        raise ValueError(f"k={k} out of range for n={dend.n_leaves}")
    return dend.cut(k)
