"""Closed-form spread-constrained cluster centers.

A cluster's extremal point is the member farthest from the mean of the
others. The constrained center of the remaining M points minimizes their
total squared distance subject to the center lying within squared
distance s of the extremal point. The first-order conditions give the
solution in closed form:

    lam    = max(0, sqrt(C / s) - M),   C = sum_j (A_j - M * e_j)^2
    center = (A + lam * e) / (M + lam)

where A is the coordinate-wise sum of the remaining points and e is the
extremal point. When the unconstrained mean already satisfies the bound,
lam = 0 and the mean is returned unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, PatternVector, as_vector, mean_vector, squared_distance


@dataclass(frozen=True)
class SpreadThreshold:
    """Upper bound s on the squared center-to-extremal distance.

    sqrt(s) is the enforcement radius used when projecting points back
    into the cluster ball.
    """

    s: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s > 0):
            raise ValueError(f"spread threshold must be positive and finite, got {self.s}")

    def __float__(self) -> float:
        return float(self.s)


@dataclass(frozen=True)
class ConstrainedCenterResult:
    """Constrained center together with its multiplier.

    Invariants: lam >= 0; squared_distance_to_extremal <= s + 1e-9; the
    constraint is active iff lam > 0, in which case the distance sits on
    the bound to within 1e-6 * max(1, s).
    """

    center: PatternVector
    lam: float
    constraint_active: bool
    squared_distance_to_extremal: float


def _as_points(points) -> np.ndarray:
    pts = points.points if isinstance(points, Dataset) else np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"expected an (N, d) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("all coordinates must be finite (no NaN or Inf)")
    return pts


def find_extremal(points) -> int:
    """Index of the point farthest from the mean of the other N-1 points.

    The leave-one-out mean of point i is (T - Y_i) / (N - 1) with T the
    coordinate-wise total. Ties break to the lowest index.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 2:
        raise ValueError(f"extremal point needs at least 2 points, got {n}")
    total = pts.sum(axis=0)
    loo_means = (total[None, :] - pts) / (n - 1)
    d2 = ((pts - loo_means) ** 2).sum(axis=1)
    return int(np.argmax(d2))


def constrained_centroid(remaining, extremal, threshold) -> ConstrainedCenterResult:
    """Center of `remaining` bounded to lie within sqrt(s) of `extremal`.

    Case 1: the unconstrained mean already satisfies the bound and is
    returned with lam = 0. Case 2: the bound is enforced exactly via the
    closed-form multiplier, pulling the center toward the extremal point.
    """
    pts = _as_points(remaining)
    e = as_vector(extremal)
    s = float(threshold)
    if not (math.isfinite(s) and s > 0):
        raise ValueError(f"spread threshold must be positive and finite, got {s}")
    m = pts.shape[0]
    if m == 0:
        raise ValueError(
            "remaining set is empty; a single-point cluster is its own center"
        )
    if pts.shape[1] != e.shape[0]:
        raise ValueError(
            f"dimension mismatch: points are {pts.shape[1]}-D, extremal is {e.shape[0]}-D"
        )

    mean = mean_vector(pts)
    d2 = squared_distance(mean, e)
    if d2 <= s:
        return ConstrainedCenterResult(mean, 0.0, False, d2)

    col_sums = pts.sum(axis=0)
    resid = col_sums - m * e
    c_val = float(np.dot(resid, resid))
    # c_val = m^2 * d2 > m^2 * s > 0 here; a zero would mean the violated
    # bound had zero distance, which is impossible.
    assert c_val > 0.0, "violated constraint with zero extremal distance"
    lam = math.sqrt(c_val / s) - m
    center = (col_sums + lam * e) / (m + lam)
    return ConstrainedCenterResult(center, lam, True, squared_distance(center, e))


def project_to_ball(point, center, threshold) -> PatternVector:
    """Pull `point` radially toward `center` so it lies within sqrt(s).

    Points already inside the ball are returned unchanged; outside points
    land exactly on the boundary with their direction from the center
    preserved.
    """
    p = as_vector(point)
    c = as_vector(center)
    s = float(threshold)
    if p.shape != c.shape:
        raise ValueError(
            f"dimension mismatch: point is {p.shape[0]}-D, center is {c.shape[0]}-D"
        )
    d2 = squared_distance(p, c)
    if d2 <= s:
        return p
    return c + math.sqrt(s) * (p - c) / math.sqrt(d2)
