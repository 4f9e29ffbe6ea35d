"""Spread-constrained centroid clustering.

Lloyd-style alternation in which each cluster's center is the closed-form
constrained centroid: the cluster's extremal member is identified, the
center of the remaining members is computed subject to the squared-distance
bound S = radius**2, and points are then reassigned to the nearest center.
After convergence, `enforce_spread` produces an evaluation copy of the data
with every point pulled inside its cluster's radius; the fit itself never
moves data points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constrained import constrained_centroid, find_extremal, project_to_ball
from .core import Dataset, make_rng
from .lloyd import assign_nearest, kmeans_pp_init

ALGORITHMS = ("ccc", "kmeans", "gmm", "dbscan", "agglomerative")

NOISE = -1


@dataclass(frozen=True)
class ClusterModel:
    """A fitted clustering: centers, per-point assignments, and multipliers.

    `assignments` uses -1 for noise points (density-based fits only).
    `radius` is the enforcement radius sqrt(S) and is None for fits without
    a spread constraint. `lambdas` holds the per-cluster constraint
    multipliers; they are all zero for unconstrained fits.
    """

    algorithm: str
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    lambdas: np.ndarray
    radius: float | None
    iterations_run: int
    converged: bool
    seed: int | None = None
    # Fitter diagnostics, not part of the serialized model: per-iteration
    # objective values (k-means WCSS, GMM mean log-likelihood).
    objective_history: tuple[float, ...] | None = None
    covariances: np.ndarray | None = None
    mixture_weights: np.ndarray | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm tag {self.algorithm!r}")
        centroids = np.asarray(self.centroids, dtype=np.float64)
        assignments = np.asarray(self.assignments, dtype=np.int64)
        lambdas = np.asarray(self.lambdas, dtype=np.float64)
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")
        if centroids.shape[0] != self.k:
            raise ValueError(f"expected {self.k} centroids, got {centroids.shape[0]}")
        if lambdas.shape != (self.k,):
            raise ValueError(f"expected {self.k} lambdas, got shape {lambdas.shape}")
        if np.any(lambdas < 0):
            raise ValueError("constraint multipliers must be nonnegative")
        if assignments.ndim != 1:
            raise ValueError("assignments must be a flat index array")
        if assignments.size and (assignments.min() < NOISE or assignments.max() >= self.k):
            raise ValueError("assignments must lie in [-1, k)")
        if not np.all(np.isfinite(centroids)):
            raise ValueError("centroids must be finite")
        if self.radius is not None and not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if self.iterations_run < 0:
            raise ValueError("iterations_run must be nonnegative")
        for name, arr in (("centroids", centroids), ("assignments", assignments), ("lambdas", lambdas)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_points(self) -> int:
        return self.assignments.shape[0]

    def cluster_indices(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == c)


@dataclass(frozen=True)
class CccConfig:
    """Fit parameters: k clusters, enforcement radius sqrt(S), Lloyd loop controls."""

    k: int
    radius: float
    max_iter: int = 300
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ValueError(f"tol must be positive, got {self.tol}")


def _constrained_update(
    x: np.ndarray, labels: np.ndarray, centers: np.ndarray, s: float
) -> tuple[np.ndarray, np.ndarray]:
    """One center-update step. Returns (new_centers, lambdas).

    Non-empty clusters get the constrained centroid of their members minus
    the extremal point (a singleton is its own center with lambda 0).
    Empty clusters are reseeded at the point farthest from its nearest
    current center, claiming points so no two reseeds collide.
    """
    k = centers.shape[0]
    new_centers = centers.copy()
    lambdas = np.zeros(k)
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
        if counts[c] == 0:
            continue
        members = x[labels == c]
        if counts[c] == 1:
            new_centers[c] = members[0]
            continue
        ext = find_extremal(members)
        rest = np.delete(members, ext, axis=0)
        result = constrained_centroid(rest, members[ext], s)
        new_centers[c] = result.center
        lambdas[c] = result.lam
    return new_centers, lambdas


def ccc_fit(data: Dataset, config: CccConfig) -> ClusterModel:
    """Fit k spread-constrained centroids to the dataset.

    Alternates nearest-center assignment with the constrained center update
    until the largest coordinate-wise center shift drops below `tol` or
    `max_iter` iterations have run. Seeding is k-means++ from the
    configured seed, identical to the plain k-means baseline.
    """
    if data.n == 0:
        raise ValueError("cannot fit an empty dataset")
    if data.n < config.k:
        raise ValueError(f"need at least k={config.k} points, got {data.n}")
    x = data.points
    s = config.radius * config.radius

    centers = kmeans_pp_init(x, config.k, make_rng(config.seed))
    lambdas = np.zeros(config.k)
    converged = False
    iterations = 0
    for _ in range(config.max_iter):
        labels, _ = assign_nearest(x, centers)
        new_centers, lambdas = _constrained_update(x, labels, centers, s)
        shift = float(np.max(np.abs(new_centers - centers)))
        centers = new_centers
        iterations += 1
        if shift < config.tol:
            converged = True
            break
    labels, _ = assign_nearest(x, centers)

    return ClusterModel(
        algorithm="ccc",
        k=config.k,
        centroids=centers,
        assignments=labels,
        lambdas=lambdas,
        radius=config.radius,
        iterations_run=iterations,
        converged=converged,
        seed=config.seed,
    )


def enforce_spread(data: Dataset, model: ClusterModel) -> Dataset:
    """Evaluation copy of the data with every point inside its cluster ball.

    Each point assigned to cluster c is replaced by its radial projection
    onto the ball of radius model.radius around centroid c; points already
    inside are copied bit-identically and noise points are left alone. The
    input dataset is never mutated.
    """
    if model.radius is None:
        raise ValueError("model carries no spread radius; nothing to enforce")
    if model.n_points != data.n:
        raise ValueError(
            f"model was fitted on {model.n_points} points, dataset has {data.n}"
        )
    s = model.radius * model.radius
    out = data.points.copy()
    for i in range(data.n):
        c = model.assignments[i]
        if c == NOISE:
            continue
        out[i] = project_to_ball(out[i], model.centroids[c], s)
    return Dataset(out)
