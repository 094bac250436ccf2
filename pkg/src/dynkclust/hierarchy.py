"""Nested center layers rebuilt lazily, giving low-recourse dynamic clustering.

Layer ``i`` holds about ``k + s_i`` centers chosen from layer ``i - 1`` (layer
``-1`` is the live point set), with slack ``s_i = floor(k ** ((l - i) / l))``.
An insertion adds the new point to every layer; every update bumps each
layer's counter, and the first layer whose counter exceeds its slack is
rebuilt together with all layers below it. The last layer has zero slack, so
it is re-solved on every update and always holds ``k`` centers (or everything
when fewer are available).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation
from .local_search import LocalSearchParams, rand_local_search
from .metric import WeightedMetricSpace
from .neighbors import NeighborLists
from .objective import clustering_cost

log = logging.getLogger(__name__)


def integer_root_floor(base: int, num: int, den: int) -> int:
    """``floor(base ** (num / den))`` for positive integers, exactly."""
    target = base ** num
    s = int(math.floor(base ** (num / den)))
    while s ** den > target:
        s -= 1
    while (s + 1) ** den <= target:
        s += 1
    return s


@dataclass(frozen=True)
class HierarchyConfig:
    k: int
    epsilon: float = 0.5
    p: int = 1
    ls_epsilon: float = 0.2
    c: float = 1.0
    seed: int = 0
    max_iters: int | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        # validates the search parameters early
        self.ls_params(0)

    @property
    def levels(self) -> int:
        """``l = round(1 / epsilon)``."""
        return max(1, round(1 / self.epsilon))

    @property
    def effective_epsilon(self) -> float:
        return 1 / self.levels

    @property
    def slacks(self) -> tuple[int, ...]:
        """``s_0 .. s_{l+1}``."""
        l = self.levels
        return tuple(integer_root_floor(self.k, l - i, l) for i in range(l + 1)) + (0,)

    def ls_params(self, seed: int) -> LocalSearchParams:
        return LocalSearchParams(p=self.p, epsilon=self.ls_epsilon, c=self.c,
                                 seed=seed, max_iters=self.max_iters)

    def approximation_bound(self) -> float:
        """``2 beta * sum_{i=0}^{l+1} alpha**i`` for the local-search constants."""
        alpha = 1 + 7 * self.ls_epsilon
        beta = 6 * self.p * alpha
        return 2 * beta * sum(alpha ** i for i in range(self.levels + 2))


@dataclass
class UpdateReport:
    rebuilt_from: int
    recourse: list[int]
    bounds: list[int]
    solution: set[int] = field(default_factory=set)

    @property
    def final_recourse(self) -> int:
        return self.recourse[-1]


class Hierarchy:
    """Layers ``S_0 .. S_{l+1}`` over a :class:`WeightedMetricSpace`.

    The owner applies each update to the space first, then calls
    :meth:`on_insert` or :meth:`on_delete`.
    """

    def __init__(self, space: WeightedMetricSpace, config: HierarchyConfig,
                 strict: bool = False) -> None:
        self.space = space
        self.config = config
        self.strict = strict
        self.slacks = config.slacks
        self.top = len(self.slacks) - 1
        self.layers: list[set[int]] = [set() for _ in self.slacks]
        self.counters = [0] * len(self.slacks)
        # lists[i] ranks the members of layer i - 1 (the live set for i = 0)
        self.lists: list[NeighborLists | None] = [None] * len(self.slacks)
        self._calls = 0
        self.violations: list[str] = []
        self.reconstruct_from_layer(0)

    # -- queries --------------------------------------------------------

    def pool(self, i: int) -> set[int]:
        return set(self.space.ids()) if i == 0 else self.layers[i - 1]

    def current_solution(self) -> set[int]:
        return set(self.layers[self.top])

    def current_cost(self, p: float | None = None) -> float:
        sol = self.layers[self.top]
        if not sol or len(self.space) == 0:
            return 0.0
        return clustering_cost(self.space, sol, self.config.p if p is None else p)

    def referenced(self) -> set[int]:
        out: set[int] = set()
        for layer in self.layers:
            out |= layer
        return out

    # -- rebuilding -----------------------------------------------------

    def _seed(self) -> int:
        self._calls += 1
        seq = np.random.SeedSequence([self.config.seed, self._calls])
        return int(seq.generate_state(1, dtype=np.uint64)[0])

    def _lists_for(self, i: int, pool: set[int]) -> NeighborLists | None:
        nl = self.lists[i]
        if not pool:
            return None
        if nl is None:
            nl = NeighborLists.build(self.space, pool)
        else:
            for c in sorted(nl.candidates - pool):
                nl.remove_candidate(c)
            for c in sorted(pool - nl.candidates):
                nl.add_candidate(c)
        return nl

    def reconstruct_from_layer(self, j: int) -> None:
        if not 0 <= j <= self.top:
            raise ValueError(f"layer {j} outside 0..{self.top}")
        k = self.config.k
        for i in range(j, self.top + 1):
            pool = self.pool(i)
            self.lists[i] = self._lists_for(i, pool)
            if len(pool) <= k + self.slacks[i]:
                self.layers[i] = set(pool)
            else:
                self.layers[i] = rand_local_search(
                    self.space, pool, k + self.slacks[i],
                    self.config.ls_params(self._seed()), self.lists[i])
            self.counters[i] = 0
        log.debug("rebuilt layers %d..%d", j, self.top)

    # -- updates --------------------------------------------------------

    def on_insert(self, x: int) -> UpdateReport:
        for nl in self.lists:
            if nl is not None:
                nl.on_point_inserted(x)
        if self.lists[0] is None:
            self.lists[0] = NeighborLists.build(self.space, [x])
        else:
            self.lists[0].add_candidate(x)
        for i in range(1, self.top + 1):
            # x joins layer i - 1 below, which lists[i] ranks
            nl = self.lists[i]
            if nl is None:
                self.lists[i] = NeighborLists.build(self.space, [x])
            else:
                nl.add_candidate(x)
        before = [set(s) for s in self.layers]
        for layer in self.layers:
            layer.add(x)
        return self._step(before)

    def on_delete(self, x: int) -> UpdateReport:
        for nl in self.lists:
            if nl is not None:
                nl.on_point_deleted(x)
        nl0 = self.lists[0]
        if nl0 is not None:
            if len(nl0) == 1:
                self.lists[0] = None
            else:
                nl0.remove_candidate(x)
        before = [set(s) for s in self.layers]
        return self._step(before)

    def _step(self, before: list[set[int]]) -> UpdateReport:
        for i in range(len(self.counters)):
            self.counters[i] += 1
        r = next(i for i in range(len(self.counters)) if self.counters[i] > self.slacks[i])
        self.reconstruct_from_layer(r)
        recourse = [len(a ^ b) for a, b in zip(before, self.layers)]
        bounds = [self.recourse_bound(i, r) for i in range(len(self.layers))]
        report = UpdateReport(r, recourse, bounds, self.current_solution())
        for i, (got, cap) in enumerate(zip(recourse, bounds)):
            if got > cap:
                self._violation(f"layer {i} recourse {got} exceeds {cap}")
        self.check()
        return report

    def recourse_bound(self, i: int, r: int) -> int:
        """Largest change to layer ``i`` allowed when rebuilding from layer ``r``.

        Layers above ``r`` only gain the inserted point. Rebuilt layers stay
        inside layer ``r - 1``, which holds at most ``k + 2 s_{r-1}`` centers
        while both old and new layer ``i`` hold at least ``k``. Layer ``-1``
        has no slack, so a rebuild from the bottom falls back to the size
        bound ``2 (k + 2 s_0) + 1``.
        """
        if i < r:
            return 1
        if r == 0:
            return 2 * (self.config.k + 2 * self.slacks[0]) + 1
        return 4 * self.slacks[r - 1] + 1

    def _violation(self, msg: str) -> None:
        self.violations.append(msg)
        if self.strict:
            raise InvariantViolation(msg)
        log.warning("invariant violation: %s", msg)

    def check(self) -> None:
        """Nestedness and layer-size bounds; violations are recorded (or raised)."""
        known = set(self.space.ids()) | self.space.retained
        if not self.layers[0] <= known:
            self._violation("layer 0 holds unknown points")
        k = self.config.k
        for i in range(1, len(self.layers)):
            if not self.layers[i] <= self.layers[i - 1]:
                self._violation(f"layer {i} is not inside layer {i - 1}")
        for i, layer in enumerate(self.layers):
            if len(layer) > k + 2 * self.slacks[i]:
                self._violation(f"layer {i} has {len(layer)} > k + 2 s_{i} centers")
        final = self.layers[self.top]
        if len(final) != k and not set(self.space.ids()) <= final:
            self._violation(f"final layer has {len(final)} centers without covering the space")
