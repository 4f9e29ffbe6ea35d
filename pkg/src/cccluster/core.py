"""Shared numeric primitives: pattern vectors, datasets, distances, seeded RNG.

All arithmetic is 64-bit floating point. Points are plain 1-D float64
arrays; a Dataset is an immutable (N, d) stack of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# A pattern vector is a 1-D float64 coordinate array of length d.
PatternVector = np.ndarray

# Seedable random source. One consumer at a time; parallel code must
# derive distinct seeds rather than share a generator.
RngState = np.random.Generator


class AlgorithmError(RuntimeError):
    """A fit or evaluation failed on otherwise well-formed inputs."""


def make_rng(seed: int) -> RngState:
    """Return a PCG64 generator seeded with `seed`.

    The generator algorithm is pinned (PCG64) so that a fixed seed replays
    the identical stream on every platform and every run.
    """
    return np.random.Generator(np.random.PCG64(seed))


def as_vector(coords) -> PatternVector:
    """Coerce to a finite 1-D float64 vector, validating shape and values."""
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D coordinate vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("coordinates must be finite (no NaN or Inf)")
    return v


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of N points in d dimensions, stored as (N, d).

    The backing array is copied on construction and marked read-only, so a
    Dataset can be shared freely across threads and fits.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must form an (N, d) array, got shape {pts.shape}")
        if pts.shape[1] < 1:
            raise ValueError("dimension d must be >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite (no NaN or Inf)")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n


def squared_distance(a, b) -> float:
    """Squared Euclidean distance between two same-dimension vectors."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise ValueError(
            f"dimension mismatch: vectors have lengths {av.shape[0]} and {bv.shape[0]}"
        )
    diff = av - bv
    return float(np.dot(diff, diff))


def mean_vector(points) -> PatternVector:
    """Coordinate-wise arithmetic mean of a nonempty set of points."""
    pts = points.points if isinstance(points, Dataset) else np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("mean_vector requires a nonempty collection of points")
    return pts.sum(axis=0) / pts.shape[0]


def pairwise_sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(N, k) matrix of squared Euclidean distances from rows of x to centers.

    Computed from explicit differences (not the expanded-product identity),
    so exact ties stay exact and symmetric pairs compare bitwise-equal.
    """
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)
