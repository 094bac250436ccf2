"""Randomized single-swap local search restricted to a candidate pool.

Each iteration samples a pool point ``x`` outside the current solution and
performs the best swap involving ``x``. The best swap is read off the first
two entries of each point's neighbor list: closing center ``y`` moves exactly
the points it serves to their second entry.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass
from typing import Collection

import numpy as np

from .errors import CandidateMismatch, DegenerateSpace, EmptySpace, InvariantViolation
from .metric import WeightedMetricSpace
from .neighbors import NeighborLists
from .objective import pow2_scale

_NEAR_TIE = 1e-9
_VECTOR_MIN = 64


@dataclass(frozen=True)
class LocalSearchParams:
    p: int = 1
    epsilon: float = 0.2
    c: float = 1.0
    seed: int = 0
    max_iters: int | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.p, int) and self.p >= 1):
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        if not 0 < self.epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if self.c < 1:
            raise ValueError(f"confidence constant must be >= 1, got {self.c}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be positive")


def iteration_budget(n: int, aspect: float, s: int, params: LocalSearchParams) -> int:
    """``ceil(2c * p * s * ln(n) * ln(n * aspect / eps) / eps**2)``, or the override."""
    if params.max_iters is not None:
        return params.max_iters
    if s <= 0 or n < 2:
        return 0
    eps = params.epsilon
    raw = 2 * params.c * params.p * s * math.log(n) * math.log(n * aspect / eps) / eps ** 2
    return math.ceil(raw)


def _space_scale(space: WeightedMetricSpace) -> float:
    try:
        return pow2_scale(space.d_max)
    except (DegenerateSpace, EmptySpace):
        return 1.0


class _SwapEvaluator:
    """Scores every swap that brings one outside point into the solution.

    With ``x`` added, point ``z`` is served at ``min(d(z, x), f1(z))``, where
    ``f1``/``f2`` are its first and second distances to the current centers;
    closing center ``y`` moves the points it serves to ``min(d(z, x), f2(z))``.
    Only the first two entries of each neighbor list are read, so the lists
    change only when a swap is actually made. Candidates are ranked with
    vectorized sums; those within a relative 1e-9 of the best are re-summed
    exactly with ``fsum`` so the winner and its cost match a from-scratch
    evaluation bit for bit. All distances are multiplied by ``scale``.
    """

    def __init__(self, space: WeightedMetricSpace, lists: NeighborLists, p: int, scale: float) -> None:
        self.lists = lists
        self.p = p
        self.scale = scale
        self.points = list(lists.lists)
        self.w = np.array([space._weight[z] for z in self.points])
        self._w = self.w.tolist()
        self._dist = space.distance_fn()
        self._cache: dict[int, tuple[np.ndarray, list[float]]] = {}
        self.refresh()

    def refresh(self) -> None:
        s, p = self.scale, self.p
        f1, f2, c1 = [], [], []
        for z in self.points:
            lst = self.lists.lists[z]
            f1.append(lst[0][0] * s)
            c1.append(lst[0][1])
            f2.append(lst[1][0] * s if len(lst) > 1 else math.inf)
        self.members = sorted(self.lists.candidates)
        pos = {c: t for t, c in enumerate(self.members)}
        self.f1, self.f2, self.c1 = f1, f2, c1
        self.f1a, self.f2a = np.array(f1), np.array(f2)
        self.c1pos = np.array([pos[c] for c in c1], dtype=np.intp)
        self.t1 = [w * d ** p for w, d in zip(self._w, f1)]
        self.t2 = [w * d ** p for w, d in zip(self._w, f2)]
        self.cost = math.fsum(self.t1)

    def _dx(self, x: int) -> tuple[np.ndarray, list[float]]:
        got = self._cache.get(x)
        if got is None:
            d, s = self._dist, self.scale
            row = [d(z, x) * s for z in self.points]
            got = self._cache[x] = (np.array(row), row)
        return got

    def exact(self, x: int, y: int) -> float:
        """``sum_z w(z) * d(z, S + x - y)**p`` in scaled distances."""
        p = self.p
        if y == x:
            return self.cost
        _, dx = self._dx(x)
        terms = []
        for w, a, f1, f2, c in zip(self._w, dx, self.f1, self.f2, self.c1):
            f = f2 if c == y else f1
            terms.append(w * (a if a < f else f) ** p)
        return math.fsum(terms)

    def best(self, x: int) -> tuple[int, float]:
        """Center of ``S + x`` whose removal leaves the cheapest solution."""
        if len(self.points) < _VECTOR_MIN:
            return self._best_small(x)
        p = self.p
        dxa, _ = self._dx(x)
        ta = self.w * np.minimum(dxa, self.f1a) ** p
        tb = self.w * np.minimum(dxa, self.f2a) ** p
        gain = np.bincount(self.c1pos, weights=tb - ta, minlength=len(self.members))
        approx = float(ta.sum()) + gain
        keep = float(self.w @ self.f1a ** p)
        low = min(float(approx.min()), keep)
        slack = _NEAR_TIE * (abs(low) + keep) + 1e-300
        near = [self.members[t] for t in np.flatnonzero(approx <= low + slack)]
        if keep <= low + slack:
            near.append(x)
        return self._pick(x, near)

    def _best_small(self, x: int) -> tuple[int, float]:
        # same ranking as best(), in plain Python: cheaper than numpy calls for few points
        p = self.p
        _, dx = self._dx(x)
        base = keep = 0.0
        gain = dict.fromkeys(self.members, 0.0)
        for w, a, f1, f2, t1, t2, c in zip(self._w, dx, self.f1, self.f2, self.t1, self.t2, self.c1):
            ta = w * a ** p if a < f1 else t1
            tb = w * a ** p if a < f2 else t2
            keep += t1
            base += ta
            gain[c] += tb - ta
        low = min(keep, base + min(gain.values()))
        slack = _NEAR_TIE * (abs(low) + keep) + 1e-300
        near = [y for y, g in gain.items() if base + g <= low + slack]
        if keep <= low + slack:
            near.append(x)
        return self._pick(x, near)

    def _pick(self, x: int, near: list[int]) -> tuple[int, float]:
        best_y, best_cost = None, math.inf
        for y in sorted(near):
            c = self.exact(x, y)
            if c < best_cost:
                best_y, best_cost = y, c
        return best_y, best_cost

    def swap(self, x: int, y: int) -> None:
        self.lists.add_candidate(x)
        self.lists.remove_candidate(y)
        self.refresh()


def best_swap(space: WeightedMetricSpace, centers: Collection[int], x: int,
              lists: NeighborLists, p: int = 1, scale: float = 1.0) -> tuple[int, float]:
    """Center ``y`` in ``S + x`` minimizing ``cl(S + x - y)^p``, and that cost.

    The cost is ``sum_z w(z) * (scale * d(z, S + x - y))**p``. ``lists`` must
    hold exactly ``centers``; it is not modified. Ties go to the smallest id;
    returning ``x`` itself means no swap helps.
    """
    S = set(centers)
    if lists.candidates != S:
        raise CandidateMismatch("neighbor lists do not hold the current solution")
    if x in S:
        raise CandidateMismatch(f"{x} is already a center")
    return _SwapEvaluator(space, lists, p, scale).best(x)


def initial_solution(space: WeightedMetricSpace, pool: Collection[int], k: int) -> set[int]:
    """The ``k`` pool points nearest to the pool's smallest id."""
    anchor = min(pool)
    return set(sorted(pool, key=lambda c: (space.distance(anchor, c), c))[:k])


def rand_local_search(space: WeightedMetricSpace, pool: Collection[int], k: int,
                      params: LocalSearchParams, lists: NeighborLists,
                      trace: list[float] | None = None) -> set[int]:
    """A size-``min(k, |pool|)`` subset of ``pool`` found by sampled best swaps.

    ``lists`` must hold exactly ``pool`` as candidates; it is restored before
    returning. When ``trace`` is given, the scaled cost after every iteration
    is appended to it.
    """
    X = set(pool)
    if lists.candidates != X:
        raise CandidateMismatch("neighbor lists do not hold the candidate pool")
    if len(X) <= k:
        return X
    S = initial_solution(space, X, k)
    outside = sorted(X - S)
    for c in outside:
        lists.remove_candidate(c)

    n = len(space)
    try:
        aspect = space.aspect_ratio()
    except (DegenerateSpace, EmptySpace):
        aspect = 1.0
    budget = iteration_budget(n, aspect, len(X) - k, params)
    rng = np.random.Generator(np.random.Philox(params.seed))

    cost = math.inf
    done = 0
    try:
        ev = _SwapEvaluator(space, lists, params.p, _space_scale(space))
        while done < budget:
            block = rng.random(min(budget - done, 1 << 16))
            for u in block:
                idx = int(u * len(outside))
                x = outside[idx]
                y, new_cost = ev.best(x)
                if new_cost > cost:
                    raise InvariantViolation(f"local search cost rose from {cost} to {new_cost}")
                if y != x:
                    ev.swap(x, y)
                    S.discard(y)
                    S.add(x)
                    del outside[idx]
                    insort(outside, y)
                cost = new_cost
                if trace is not None:
                    trace.append(cost)
            done += len(block)
    finally:
        for c in sorted(X - lists.candidates):
            lists.add_candidate(c)
    return S
