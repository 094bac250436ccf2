"""Clustering and facility-location objectives over a metric space snapshot."""

from __future__ import annotations

import math
from typing import Collection, Iterable

from .errors import EmptyCenters, EmptySpace
from .metric import WeightedMetricSpace

INF = math.inf


def pow2_scale(largest: float) -> float:
    """Power of two ``s`` with ``largest * s`` in ``[0.5, 1)``.

    Scaling by a power of two is exact in binary floating point, so sums of
    scaled terms rescale back without extra rounding.
    """
    if largest <= 0 or not math.isfinite(largest):
        return 1.0
    return math.ldexp(1.0, -math.frexp(largest)[1])


def _check(space: WeightedMetricSpace, centers: Collection[int]) -> None:
    if not centers:
        raise EmptyCenters("center set is empty")
    if len(space) == 0:
        raise EmptySpace("space is empty")


def distances_to_set(space: WeightedMetricSpace, centers: Iterable[int]) -> dict[int, float]:
    """``d(x, S)`` for every live ``x``."""
    centers = list(centers)
    d = space.distance_fn()
    return {x: min(d(x, c) for c in centers) for x in space.ids()}


def scaled_power_cost(space: WeightedMetricSpace, centers: Collection[int], p: int,
                      scale: float = 1.0) -> float:
    """``sum_x w(x) * (scale * d(x, S))**p``, summed with ``math.fsum``."""
    _check(space, centers)
    dist = distances_to_set(space, centers)
    return math.fsum(space.weight(x) * (dx * scale) ** p for x, dx in dist.items())


def clustering_cost(space: WeightedMetricSpace, centers: Collection[int], p: float = 1) -> float:
    """The (k,p)-clustering cost of ``centers`` against the live points.

    ``p`` is a positive integer or ``math.inf`` (largest distance to a center).
    """
    _check(space, centers)
    dist = distances_to_set(space, centers)
    largest = max(dist.values())
    if p == INF:
        return largest
    if largest == 0:
        return 0.0
    s = pow2_scale(largest)
    total = math.fsum(space.weight(x) * (dx * s) ** p for x, dx in dist.items())
    return total ** (1.0 / p) / s


def unnormalized_cost(space: WeightedMetricSpace, centers: Collection[int], p: int = 2) -> float:
    """``clustering_cost(S, p) ** p``; for ``p = 2`` this is the k-means objective."""
    if p == 1:
        return clustering_cost(space, centers, 1)
    _check(space, centers)
    dist = distances_to_set(space, centers)
    largest = max(dist.values())
    if largest == 0:
        return 0.0
    s = pow2_scale(largest)
    total = math.fsum(space.weight(x) * (dx * s) ** p for x, dx in dist.items())
    return math.ldexp(total, math.frexp(largest)[1] * p)


def facility_cost(space: WeightedMetricSpace, centers: Collection[int], lam: float) -> float:
    """Uniform facility location cost: ``lam * |S|`` plus weighted connection cost."""
    if not centers:
        raise EmptyCenters("center set is empty")
    if len(space) == 0:
        return lam * len(set(centers))
    dist = distances_to_set(space, centers)
    return lam * len(set(centers)) + math.fsum(space.weight(x) * dx for x, dx in dist.items())


def nearest(space: WeightedMetricSpace, y: int, pool: Iterable[int]) -> int:
    """Closest point of ``pool`` to ``y``; ties go to the smallest id."""
    best = None
    for x in pool:
        key = (space.distance(y, x), x)
        if best is None or key < best:
            best = key
    if best is None:
        raise EmptyCenters("projection target is empty")
    return best[1]


def project_set(space: WeightedMetricSpace, centers: Iterable[int], target: Collection[int]) -> set[int]:
    """Map every center to its nearest point of ``target``."""
    if not target:
        raise EmptyCenters("projection target is empty")
    return {nearest(space, y, target) for y in centers}
