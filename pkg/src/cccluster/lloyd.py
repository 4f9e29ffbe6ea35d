"""Machinery shared by the Lloyd-style fitters: seeding, assignment, repair.

Kept separate so the constrained fitter and the k-means baseline use the
exact same initialization and tie-breaking, which keeps their comparisons
fair under identical seeds.
"""

from __future__ import annotations

import numpy as np

from .core import RngState, pairwise_sq_dists


def kmeans_pp_init(x: np.ndarray, k: int, rng: RngState) -> np.ndarray:
    """k-means++ seeding: first center uniform, then sampled with
    probability proportional to squared distance to the nearest chosen
    center."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    idx = int(rng.integers(n))
    centers[0] = x[idx]
    d2 = pairwise_sq_dists(x, centers[:1])[:, 0]
    for i in range(1, k):
        total = d2.sum()
        if total > 0.0:
            probs = d2 / total
            idx = int(rng.choice(n, p=probs))
        else:
            # all remaining mass collapsed onto chosen centers (duplicate data)
            idx = int(rng.integers(n))
        centers[i] = x[idx]
        d2 = np.minimum(d2, pairwise_sq_dists(x, centers[i : i + 1])[:, 0])
    return centers


def assign_nearest(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    """Assign each point to its nearest center (ties to the lowest cluster
    index) and return the labels with the total within-cluster squared
    distance."""
    d2 = pairwise_sq_dists(x, centers)
    labels = np.argmin(d2, axis=1)
    wcss = float(d2[np.arange(x.shape[0]), labels].sum())
    return labels, wcss


def reseed_empty_clusters(
    x: np.ndarray, centers: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    """Move each empty cluster's center onto the point farthest from its
    nearest current center. Returns a mask of the clusters that were
    reseeded; `centers` is modified in place.

    Each reseeded point is claimed so two empty clusters never land on the
    same point. Ties break to the lowest point index.
    """
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    reseeded = np.zeros(k, dtype=bool)
    empties = np.flatnonzero(counts == 0)
    if empties.size == 0:
        return reseeded
    d2min = pairwise_sq_dists(x, centers).min(axis=1)
    for c in empties:
        idx = int(np.argmax(d2min))
        centers[c] = x[idx]
        d2min[idx] = -np.inf  # claimed
        reseeded[c] = True
    return reseeded
