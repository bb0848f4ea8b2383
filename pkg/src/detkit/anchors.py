"""Dimension clustering for anchor priors and the per-scale anchor split.

Priors are chosen by running Lloyd's algorithm over ground-truth box sizes
with d(a, b) = 1 - IOU of co-centered boxes, so that the objective directly
reflects box overlap instead of absolute pixel error; plain euclidean distance
is available for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .yolo import AnchorPrior


class InsufficientSamplesError(ValueError):
    """Fewer distinct samples than requested clusters."""


class NotDivisibleError(ValueError):
    """The prior count does not split evenly across the requested scales."""


@dataclass(frozen=True)
class DimensionSample:
    """One ground-truth box size (width, height), any consistent unit."""

    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and self.height > 0.0):
            raise ValueError(f"sample size must be positive, got {self.width!r} x {self.height!r}")


@dataclass(frozen=True)
class ClusteringResult:
    """Final centroids with the assignment and the mean-distance objective.

    objective_history holds one value per accepted Lloyd iteration and is
    non-increasing; objective equals its last entry.
    """

    centroids: tuple[AnchorPrior, ...]
    assignments: tuple[int, ...]
    objective: float
    objective_history: tuple[float, ...]


def _distances(dims: np.ndarray, centroids: np.ndarray, mode: str) -> np.ndarray:
    """Pairwise distance matrix, shape (num_samples, num_centroids)."""
    if mode == "euclidean":
        diff = dims[:, None, :] - centroids[None, :, :]
        return np.sqrt((diff * diff).sum(axis=-1))
    # Overlap of two boxes that share a center is min(w)*min(h).
    inter = np.minimum(dims[:, None, :], centroids[None, :, :]).prod(axis=-1)
    union = dims.prod(axis=-1)[:, None] + centroids.prod(axis=-1)[None, :] - inter
    return 1.0 - inter / union


def _plusplus_init(dims: np.ndarray, k: int, rng: np.random.Generator, mode: str) -> np.ndarray:
    """Seeded k-means++ initialization: spread starting centroids by squared distance."""
    n = dims.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _distances(dims, dims[chosen[-1]][None, :], mode)[:, 0] ** 2
    while len(chosen) < k:
        total = d2.sum()
        # k <= number of distinct samples guarantees some positive weight remains.
        probs = d2 / total
        chosen.append(int(rng.choice(n, p=probs)))
        new_d2 = _distances(dims, dims[chosen[-1]][None, :], mode)[:, 0] ** 2
        d2 = np.minimum(d2, new_d2)
    return dims[chosen].copy()


def _update_centroids(
    dims: np.ndarray, assignments: np.ndarray, centroids: np.ndarray, mode: str
) -> np.ndarray:
    """Componentwise means per cluster; empty clusters re-seed from the farthest sample."""
    k = centroids.shape[0]
    new = np.empty_like(centroids)
    empties = []
    for c in range(k):
        members = dims[assignments == c]
        if len(members) == 0:
            empties.append(c)
        else:
            new[c] = members.mean(axis=0)
    if empties:
        dist = _distances(dims, new, mode)
        own = dist[np.arange(len(dims)), assignments]
        for c in empties:
            farthest = int(np.argmax(own))
            new[c] = dims[farthest]
            own[farthest] = -1.0  # a sample seeds at most one empty cluster
    return new


def kmeans_anchors(
    samples: Sequence[DimensionSample],
    k: int,
    max_iters: int = 100,
    seed: int = 0,
    distance: str = "iou",
) -> ClusteringResult:
    """Cluster box sizes into k anchor priors with Lloyd's algorithm.

    Starts from a seeded k-means++ draw and alternates nearest-centroid
    assignment with componentwise-mean updates until assignments stop
    changing, an update stops improving the objective, or max_iters passes.
    The mean update is not guaranteed to lower the overlap-based objective,
    so a non-improving update is rolled back and the run stops there; the
    reported objective history is therefore strictly non-increasing.

    Deterministic for a fixed seed.  Raises InsufficientSamplesError when k
    exceeds the number of distinct samples.
    """
    if distance not in ("iou", "euclidean"):
        raise ValueError(f"distance must be 'iou' or 'euclidean', got {distance!r}")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k!r}")
    if max_iters <= 0:
        raise ValueError(f"max_iters must be positive, got {max_iters!r}")
    distinct = {(s.width, s.height) for s in samples}
    if k > len(distinct):
        raise InsufficientSamplesError(
            f"{k} clusters requested but only {len(distinct)} distinct samples given"
        )
    dims = np.array([[s.width, s.height] for s in samples], dtype=float)
    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(dims, k, rng, distance)

    dist = _distances(dims, centroids, distance)
    assignments = dist.argmin(axis=1)
    history = [float(dist[np.arange(len(dims)), assignments].mean())]

    for _ in range(max_iters):
        new_centroids = _update_centroids(dims, assignments, centroids, distance)
        new_dist = _distances(dims, new_centroids, distance)
        new_assignments = new_dist.argmin(axis=1)
        new_objective = float(new_dist[np.arange(len(dims)), new_assignments].mean())
        if new_objective > history[-1]:
            break
        moved = not np.array_equal(new_assignments, assignments)
        centroids = new_centroids
        assignments = new_assignments
        history.append(new_objective)
        if not moved:
            break

    return ClusteringResult(
        centroids=tuple(AnchorPrior(float(w), float(h)) for w, h in centroids),
        assignments=tuple(int(a) for a in assignments),
        objective=history[-1],
        objective_history=tuple(history),
    )


def split_scales(priors: Sequence[AnchorPrior], num_scales: int) -> list[tuple[AnchorPrior, ...]]:
    """Partition priors into equal consecutive area-sorted groups, one per scale.

    Priors are sorted by ascending area (ties by width) and cut into
    num_scales consecutive blocks.  Group 0 holds the smallest priors and
    belongs on the finest grid (the one with the largest cell count); the last
    group belongs on the coarsest.  Raises NotDivisibleError when the prior
    count is not a multiple of num_scales.
    """
    if num_scales <= 0:
        raise ValueError(f"num_scales must be positive, got {num_scales!r}")
    if len(priors) % num_scales != 0:
        raise NotDivisibleError(f"{len(priors)} priors do not split into {num_scales} equal groups")
    ordered = sorted(priors, key=lambda p: (p.area, p.width))
    group_size = len(priors) // num_scales
    return [tuple(ordered[i * group_size : (i + 1) * group_size]) for i in range(num_scales)]
