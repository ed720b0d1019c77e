"""Aggregators: compact a Drv to a bounded number of atoms.

Each aggregator is a pure, deterministic function of its parameters and the
input variable. Clusters, bins and quantile grids are laid out over the
input's own ``[min, max]``, recomputed on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import DBSCAN

from .drv import Drv

KINDS = ("simple_kmeans", "dbscan", "unibins", "percentile_rank")


@dataclass(frozen=True)
class AggregatorSpec:
    """Aggregation algorithm plus its size bound and tuning parameters."""

    kind: str = "percentile_rank"
    k: int = 100
    minpts: int = 6
    kmeans_max_iters: int = 100

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown aggregator {self.kind!r}; expected one of {KINDS}")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k!r}")
        if int(self.minpts) != self.minpts or self.minpts < 1:
            raise ValueError(f"minpts must be an integer >= 1, got {self.minpts!r}")
        if int(self.kmeans_max_iters) != self.kmeans_max_iters or self.kmeans_max_iters < 1:
            raise ValueError("kmeans_max_iters must be a positive integer")


def kmeans_1d(values: np.ndarray, k: int, max_iters: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm from ``k`` centroids spaced evenly over the data range.

    Returns ``(labels, centroids)``. Centroids of clusters that end up empty
    keep their last position. Ties go to the lower-indexed centroid.
    """
    centroids = np.linspace(values.min(), values.max(), k)
    labels = None
    for _ in range(max_iters):
        new_labels = np.argmin(np.abs(values[:, None] - centroids[None, :]), axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        sums = np.bincount(labels, weights=values, minlength=k)
        filled = counts > 0
        centroids = centroids.copy()
        centroids[filled] = sums[filled] / counts[filled]
    return labels, centroids


def aggregate_kmeans(x: Drv, k: int, max_iters: int = 100) -> Drv:
    """Simple k-means: one atom per non-empty cluster.

    Each atom sits at the unweighted mean of its member values and carries
    their summed mass, so the mean of `x` is only approximately preserved.
    Inputs that already have at most `k` atoms are returned as they are.
    """
    if len(x) <= k:
        return x
    labels, centroids = kmeans_1d(x.values, k, max_iters)
    counts = np.bincount(labels, minlength=k)
    mass = np.bincount(labels, weights=x.probs, minlength=k)
    filled = counts > 0
    # guard against rounding pushing a mean past the support edge
    out = np.clip(centroids[filled], x.min, x.max)
    return Drv._from_raw(out, mass[filled])


def aggregate_dbscan(x: Drv, k: int, minpts: int = 6) -> Drv:
    """Density clustering with ``eps = (max - min) / k``.

    Each cluster collapses to one atom at its probability-weighted mean,
    carrying the cluster's total mass. Noise points pass through unchanged so
    that no mass is lost.
    """
    if len(x) <= 1:
        return x
    eps = (x.max - x.min) / k
    labels = DBSCAN(eps=eps, min_samples=minpts).fit_predict(x.values[:, None])
    noise = labels < 0
    if noise.all():
        return x
    clustered = labels[~noise]
    p = x.probs[~noise]
    mass = np.bincount(clustered, weights=p)
    moment = np.bincount(clustered, weights=x.values[~noise] * p)
    centers = np.clip(moment / mass, x.min, x.max)
    values = np.concatenate((centers, x.values[noise]))
    probs = np.concatenate((mass, x.probs[noise]))
    return Drv._from_raw(values, probs)


def aggregate_unibins(x: Drv, k: int) -> Drv:
    """Split every atom between its two neighbouring bin centres.

    ``k`` centres are spaced evenly over the support. An atom at ``v`` between
    centres ``c1 < c2`` sends ``(c2 - v) / (c2 - c1)`` of its mass to ``c1``
    and the rest to ``c2``, which preserves the mean.
    """
    if len(x) <= 1:
        return x
    centers = np.linspace(x.min, x.max, k)
    v, p = x.values, x.probs
    idx = np.searchsorted(centers, v, side="right") - 1
    idx = np.clip(idx, 0, k - 2)
    lo, hi = centers[idx], centers[idx + 1]
    upper = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
    mass = np.bincount(idx, weights=p * (1.0 - upper), minlength=k)
    mass += np.bincount(idx + 1, weights=p * upper, minlength=k)
    return Drv._from_raw(centers, mass)


def percentile_rank_points(x: Drv, k: int) -> np.ndarray:
    """The ``k`` equal-mass output positions, before any coalescing.

    Position ``j`` is where the piecewise-linear CDF crosses rank
    ``(j - 1/2) / k``. The CDF passes through ``(v_i, F(v_i-) + p_i / 2)`` at
    every atom, so a heavy atom spreads several outputs along the segments
    next to it and ranks outside the first/last knot clamp to the support edges.
    """
    ranks = (np.arange(k) + 0.5) / k
    knots = np.cumsum(x.probs) - 0.5 * x.probs
    return np.interp(ranks, knots, x.values)


def aggregate_percentile_rank(x: Drv, k: int) -> Drv:
    if len(x) <= 1:
        return x
    points = percentile_rank_points(x, k)
    return Drv._from_raw(points, np.full(k, 1.0 / k))


def aggregate(spec: AggregatorSpec, x: Drv) -> Drv:
    if len(x) <= 1:
        return x
    kind = spec.kind
    if kind == "simple_kmeans":
        return aggregate_kmeans(x, spec.k, spec.kmeans_max_iters)
    if kind == "dbscan":
        return aggregate_dbscan(x, spec.k, spec.minpts)
    if kind == "unibins":
        return aggregate_unibins(x, spec.k)
    return aggregate_percentile_rank(x, spec.k)
