"""Slow, direct reference implementations used to check the fast paths.

Nothing here shares code with the data structures it is meant to verify
beyond the distance oracle and the plain objective functions.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Collection

import numpy as np

from .errors import EmptyCenters, NonpositiveLambda, TooLarge, UnknownId
from .metric import RTOL, ATOL, WeightedMetricSpace
from .objective import INF, clustering_cost, facility_cost, pow2_scale, scaled_power_cost

CLUSTERING_CAP = 24
UFL_CAP = 20
_CHUNK = 1 << 14


def brute_opt_clustering(space: WeightedMetricSpace, k: int, p: float = 1) -> tuple[set[int], float]:
    """Exact optimal proper solution with at most ``k`` centers.

    Enumerates every subset of size ``min(k, n)`` in lexicographic order of
    sorted ids; the first subset attaining the minimum wins.
    """
    ids = space.ids()
    n = len(ids)
    if n > CLUSTERING_CAP:
        raise TooLarge(f"{n} points exceeds the clustering oracle cap of {CLUSTERING_CAP}")
    if n == 0:
        raise EmptyCenters("space is empty")
    if k < 1:
        raise ValueError("k must be positive")
    m = min(k, n)
    dist = space.distance_matrix(ids)
    w = np.array([space.weight(i) for i in ids])
    if p != INF:
        scaled = (dist * pow2_scale(dist.max())) ** p

    best_val, best_combo = INF, None
    it = combinations(range(n), m)
    while True:
        chunk = np.array(list(_take(it, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        if p == INF:
            vals = dist[:, chunk].min(axis=2).max(axis=0)
        else:
            vals = w @ scaled[:, chunk].min(axis=2)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_combo = float(vals[j]), chunk[j]
    centers = {ids[c] for c in best_combo}
    return centers, clustering_cost(space, centers, p)


def _take(it, n):
    for _ in range(n):
        try:
            yield next(it)
        except StopIteration:
            return


def brute_opt_ufl(space: WeightedMetricSpace, lam: float) -> tuple[set[int], float]:
    """Exact optimal integral uniform facility location solution.

    Every nonempty subset is scored at once with a subset-minimum table per
    client, indexed by bitmask over the sorted ids.
    """
    if lam <= 0:
        raise NonpositiveLambda(lam)
    ids = space.ids()
    n = len(ids)
    if n > UFL_CAP:
        raise TooLarge(f"{n} points exceeds the UFL oracle cap of {UFL_CAP}")
    if n == 0:
        raise EmptyCenters("space is empty")
    dist = space.distance_matrix(ids)
    size = 1 << n
    popcount = np.zeros(size)
    for b in range(n):
        popcount[1 << b: 1 << (b + 1)] = popcount[: 1 << b] + 1
    total = lam * popcount
    near = np.empty(size)
    for j, client in enumerate(ids):
        near[0] = INF
        for b in range(n):
            np.minimum(near[: 1 << b], dist[j, b], out=near[1 << b: 1 << (b + 1)])
        total += space.weight(client) * near
    mask = int(np.argmin(total))
    centers = {ids[b] for b in range(n) if mask >> b & 1}
    return centers, facility_cost(space, centers, lam)


def brute_radius(space: WeightedMetricSpace, i: int, lam: float, beta: float) -> tuple[float, float]:
    """Ball-growing radius around ``i`` and its connection-cost term.

    The radius is the smallest ``r`` at which the weighted slack
    ``sum_{j: b*d(i,j) <= r} w(j) * (r - b*d(i,j))`` reaches ``lam``; it is
    found by sorting scaled distances and solving the linear piece that
    contains the root.
    """
    if i not in space:
        raise UnknownId(i)
    if lam <= 0:
        raise NonpositiveLambda(lam)
    pts = sorted((beta * space.distance(i, j), space.weight(j)) for j in space.ids())
    mass = 0.0
    moment = 0.0
    r = None
    for t, (d, w) in enumerate(pts):
        mass += w
        moment += w * d
        cand = (lam + moment) / mass
        nxt = pts[t + 1][0] if t + 1 < len(pts) else INF
        if cand <= nxt:
            r = cand
            break
    wi = space.weight(i)
    terms = [w * (r - d) * wi * d for d, w in pts if d <= r]
    return r, math.fsum(terms) / lam


def brute_local_optimum_check(space: WeightedMetricSpace, centers: Collection[int],
                              pool: Collection[int], p: int = 1) -> bool:
    """True iff no single swap of a pool point into ``centers`` lowers the cost."""
    S = set(centers)
    current = scaled_power_cost(space, S, p)
    for x in sorted(set(pool) - S):
        for y in sorted(S | {x}):
            trial = (S | {x}) - {y}
            if not trial:
                continue
            c = scaled_power_cost(space, trial, p)
            if c < current - (ATOL + RTOL * current):
                return False
    return True
