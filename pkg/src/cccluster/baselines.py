"""Reference clustering algorithms used for comparison.

K-means shares its seeding, assignment tie-breaking, and convergence rule
with the constrained fitter so that identically-seeded runs differ only in
the center update. GMM is standard EM with full covariances; DBSCAN is the
classic density scan with brute-force O(N^2) region queries; agglomerative
clustering is Ward linkage built with the nearest-neighbor-chain method.
All fits are deterministic given their seed (DBSCAN and Ward take none).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .ccc import NOISE, ClusterModel
from .core import AlgorithmError, Dataset, make_rng
from .lloyd import assign_nearest, kmeans_pp_init

__all__ = [
    "DbscanConfig",
    "GmmConfig",
    "kmeans_fit",
    "gmm_fit",
    "dbscan_fit",
    "agglomerative_fit",
    "ward_linkage",
]


@dataclass(frozen=True)
class DbscanConfig:
    """Density parameters: neighborhood radius eps and core-point threshold."""

    eps: float
    min_pts: int

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ValueError(f"eps must be positive and finite, got {self.eps}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be >= 1, got {self.min_pts}")


@dataclass(frozen=True)
class GmmConfig:
    k: int
    max_iter: int = 200
    tol: float = 1e-6
    cov_reg: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not (math.isfinite(self.cov_reg) and self.cov_reg > 0):
            raise ValueError(f"cov_reg must be positive, got {self.cov_reg}")


# ── k-means ──────────────────────────────────────────────────────────────


def kmeans_fit(
    data: Dataset, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-6
) -> ClusterModel:
    """Lloyd iteration from k-means++ seeding.

    Convergence and tie-breaking match the constrained fitter: stop when
    the largest coordinate-wise center shift falls below tol, ties in
    assignment go to the lowest cluster index. The per-iteration
    within-cluster sum of squares is recorded in objective_history and is
    non-increasing.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if data.n < k:
        raise ValueError(f"need at least k={k} points, got {data.n}")
    x = data.points

    centers = kmeans_pp_init(x, k, make_rng(seed))
    history: list[float] = []
    converged = False
    iterations = 0
    for _ in range(max_iter):
        labels, wcss = assign_nearest(x, centers)
        history.append(wcss)
        new_centers = centers.copy()
        counts = np.bincount(labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            d2min = np.min(
                np.stack([((x - centers[c]) ** 2).sum(axis=1) for c in range(k)], axis=1),
                axis=1,
            )
            for c in empties:
                idx = int(np.argmax(d2min))
                new_centers[c] = x[idx]
                d2min[idx] = -np.inf
        for c in range(k):
            if counts[c]:
                new_centers[c] = x[labels == c].mean(axis=0)
        shift = float(np.max(np.abs(new_centers - centers)))
        centers = new_centers
        iterations += 1
        if shift < tol:
            converged = True
            break
    labels, wcss = assign_nearest(x, centers)
    history.append(wcss)

    return ClusterModel(
        algorithm="kmeans",
        k=k,
        centroids=centers,
        assignments=labels,
        lambdas=np.zeros(k),
        radius=None,
        iterations_run=iterations,
        converged=converged,
        seed=seed,
        objective_history=tuple(history),
    )


# ── Gaussian mixture ─────────────────────────────────────────────────────


def _log_gaussian_matrix(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """(N, k) matrix of log-density values for each full-covariance component."""
    n, d = x.shape
    out = np.empty((n, means.shape[0]))
    for c in range(means.shape[0]):
        sign, logdet = np.linalg.slogdet(covs[c])
        if sign <= 0 or not np.isfinite(logdet):
            raise AlgorithmError(
                "GMM component covariance is singular despite regularization"
            )
        prec = np.linalg.inv(covs[c])
        diff = x - means[c]
        maha = np.einsum("nd,de,ne->n", diff, prec, diff)
        out[:, c] = -0.5 * (d * math.log(2.0 * math.pi) + logdet + maha)
    return out


def gmm_fit(data: Dataset, config: GmmConfig) -> ClusterModel:
    """EM for a full-covariance Gaussian mixture with hard final assignments.

    Means start from k-means++ seeding, weights start uniform, and every
    covariance starts at the data covariance plus cov_reg * I. Each M-step
    re-adds the cov_reg ridge, which keeps components nondegenerate even on
    duplicated data. Convergence is on the change in mean log-likelihood;
    the per-iteration values are recorded in objective_history.
    """
    if data.n < config.k:
        raise ValueError(f"need at least k={config.k} points, got {data.n}")
    x = data.points
    n, d = x.shape
    k = config.k

    means = kmeans_pp_init(x, k, make_rng(config.seed))
    weights = np.full(k, 1.0 / k)
    centered = x - x.mean(axis=0)
    base_cov = centered.T @ centered / n + config.cov_reg * np.eye(d)
    covs = np.repeat(base_cov[None, :, :], k, axis=0)

    history: list[float] = []
    resp = np.full((n, k), 1.0 / k)
    converged = False
    iterations = 0
    for _ in range(config.max_iter):
        log_pdf = _log_gaussian_matrix(x, means, covs)
        with np.errstate(divide="ignore"):
            weighted = log_pdf + np.log(weights)[None, :]
        peak = weighted.max(axis=1, keepdims=True)
        log_norm = peak[:, 0] + np.log(np.exp(weighted - peak).sum(axis=1))
        resp = np.exp(weighted - log_norm[:, None])
        mean_ll = float(log_norm.mean())
        history.append(mean_ll)
        iterations += 1
        if len(history) >= 2 and abs(history[-1] - history[-2]) < config.tol:
            converged = True
            break

        mass = resp.sum(axis=0)
        weights = mass / n
        safe_mass = np.maximum(mass, 1e-300)
        means = (resp.T @ x) / safe_mass[:, None]
        for c in range(k):
            diff = x - means[c]
            covs[c] = (resp[:, c, None] * diff).T @ diff / safe_mass[c]
            covs[c] += config.cov_reg * np.eye(d)

    labels = np.argmax(resp, axis=1)  # ties to the lowest index

    return ClusterModel(
        algorithm="gmm",
        k=k,
        centroids=means,
        assignments=labels,
        lambdas=np.zeros(k),
        radius=None,
        iterations_run=iterations,
        converged=converged,
        seed=config.seed,
        objective_history=tuple(history),
        covariances=covs,
        mixture_weights=weights,
    )


# ── DBSCAN ───────────────────────────────────────────────────────────────

_UNCLASSIFIED = -2


def dbscan_fit(data: Dataset, config: DbscanConfig) -> ClusterModel:
    """Classic density-based scan; noise points get assignment -1.

    Points are visited in index order and clusters expanded breadth-first,
    so border points that could join several clusters deterministically go
    to the first core point that reaches them. Region queries are
    brute-force over all points and inclusive of the eps boundary.
    """
    if data.n == 0:
        raise ValueError("cannot fit an empty dataset")
    x = data.points
    n = data.n
    eps2 = config.eps * config.eps

    def region(i: int) -> np.ndarray:
        return np.flatnonzero(((x - x[i]) ** 2).sum(axis=1) <= eps2)

    labels = np.full(n, _UNCLASSIFIED, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if labels[i] != _UNCLASSIFIED:
            continue
        neighbors = region(i)
        if neighbors.size < config.min_pts:
            labels[i] = NOISE
            continue
        labels[i] = cluster
        queue = deque(int(j) for j in neighbors if j != i)
        while queue:
            j = queue.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster  # border point claimed by this cluster
            if labels[j] != _UNCLASSIFIED:
                continue
            labels[j] = cluster
            nbrs = region(j)
            if nbrs.size >= config.min_pts:
                queue.extend(int(q) for q in nbrs if labels[q] < 0)
        cluster += 1

    k = cluster
    centroids = np.zeros((k, data.dim))
    for c in range(k):
        centroids[c] = x[labels == c].mean(axis=0)

    return ClusterModel(
        algorithm="dbscan",
        k=k,
        centroids=centroids,
        assignments=labels,
        lambdas=np.zeros(k),
        radius=None,
        iterations_run=0,
        converged=True,
    )


# ── Agglomerative (Ward) ─────────────────────────────────────────────────


def ward_linkage(data: Dataset) -> np.ndarray:
    """Full Ward merge tree as an (N-1, 4) array of [id_a, id_b, cost, size].

    The merge cost is the within-cluster variance increase
    size_a * size_b / (size_a + size_b) * ||centroid_a - centroid_b||^2.
    Merges are found with the nearest-neighbor-chain method and returned
    sorted by cost (stable), with the cluster born from row t holding id
    N + t; Ward linkage is reducible, so the sorted sequence is a valid
    greedy merge order and costs are non-decreasing.
    """
    x = data.points
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot build a merge tree for an empty dataset")
    total = 2 * n - 1
    centroid = np.zeros((total, x.shape[1]))
    centroid[:n] = x
    size = np.zeros(total)
    size[:n] = 1.0
    alive = np.zeros(total, dtype=bool)
    alive[:n] = True

    raw: list[tuple[int, int, float]] = []  # chain-order merges, temp ids
    chain: list[int] = []
    next_id = n
    while next_id < total:
        if not chain:
            chain.append(int(np.flatnonzero(alive)[0]))
        top = chain[-1]
        ids = np.flatnonzero(alive)
        d2 = ((centroid[ids] - centroid[top]) ** 2).sum(axis=1)
        w = size[ids] * size[top] / (size[ids] + size[top])
        cost = w * d2
        cost[ids == top] = np.inf
        pos = int(np.argmin(cost))
        nearest, c_min = int(ids[pos]), float(cost[pos])
        if len(chain) >= 2:
            prev = chain[-2]
            prev_pos = int(np.searchsorted(ids, prev))
            if cost[prev_pos] == c_min:
                nearest = prev  # reciprocal tie: merge with the chain
        if len(chain) >= 2 and nearest == chain[-2]:
            a, b = chain.pop(), chain.pop()
            lo, hi = (a, b) if a < b else (b, a)
            raw.append((lo, hi, c_min))
            merged = size[lo] + size[hi]
            centroid[next_id] = (size[lo] * centroid[lo] + size[hi] * centroid[hi]) / merged
            size[next_id] = merged
            alive[lo] = alive[hi] = False
            alive[next_id] = True
            next_id += 1
        else:
            chain.append(nearest)

    order = sorted(range(len(raw)), key=lambda t: raw[t][2])  # stable
    final_id = {}
    for new_pos, t in enumerate(order):
        final_id[n + t] = n + new_pos

    def remap(i: int) -> int:
        return i if i < n else final_id[i]

    out = np.zeros((n - 1, 4))
    for new_pos, t in enumerate(order):
        lo, hi, cost = raw[t]
        a, b = remap(lo), remap(hi)
        if a > b:
            a, b = b, a
        out[new_pos] = (a, b, cost, size[n + t])
    return out


def agglomerative_fit(data: Dataset, k: int) -> ClusterModel:
    """Cut the Ward merge tree at k clusters.

    Cluster labels are assigned by each cluster's smallest member index,
    so the labeling is deterministic and independent of merge bookkeeping.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if data.n < k:
        raise ValueError(f"need at least k={k} points, got {data.n}")
    n = data.n

    parent = np.arange(2 * n - 1)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if n > 1:
        linkage = ward_linkage(data)
        for t in range(n - k):
            a, b, _, _ = linkage[t]
            parent[find(int(a))] = n + t
            parent[find(int(b))] = n + t

    roots = [find(i) for i in range(n)]
    label_of_root: dict[int, int] = {}
    labels = np.empty(n, dtype=np.int64)
    for i, r in enumerate(roots):
        if r not in label_of_root:
            label_of_root[r] = len(label_of_root)
        labels[i] = label_of_root[r]

    centroids = np.zeros((k, data.dim))
    for c in range(k):
        centroids[c] = data.points[labels == c].mean(axis=0)

    return ClusterModel(
        algorithm="agglomerative",
        k=k,
        centroids=centroids,
        assignments=labels,
        lambdas=np.zeros(k),
        radius=None,
        iterations_run=n - k,
        converged=True,
    )
