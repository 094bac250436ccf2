"""Fractional k-median by Lagrangian search over the facility cost.

Opened mass falls as the facility cost ``lam`` grows. A geometric grid of
costs from ``L`` (every point fully open) to ``H`` (at most one and a half
facilities open) is binary-searched for adjacent costs whose opened masses
bracket ``k``; mixing the two fractional solutions gives exactly ``k``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import DegenerateSpace, EmptySpace, GridSearchFailed, KOutOfRange
from .facility import FracLMP, FractionalSolution
from .metric import WeightedMetricSpace

log = logging.getLogger(__name__)

INTEGRALITY_GAP = 3


@dataclass(frozen=True)
class LambdaGrid:
    low: float
    high: float
    epsilon: float
    size: int

    @classmethod
    def for_space(cls, space: WeightedMetricSpace, epsilon: float) -> "LambdaGrid":
        low = space.d_min * space.w_min / 8
        high = 2 * len(space) * space.d_max * space.w_max
        size = max(1, math.ceil(math.log(high / low) / math.log1p(epsilon)) + 1)
        grid = cls(low, high, epsilon, size)
        while grid[size] < high:
            size += 1
            grid = cls(low, high, epsilon, size)
        while size > 1 and grid[size - 1] >= high:
            size -= 1
            grid = cls(low, high, epsilon, size)
        return grid

    def __getitem__(self, t: int) -> float:
        if not 1 <= t <= self.size:
            raise IndexError(t)
        return self.low * (1 + self.epsilon) ** (t - 1)

    def __len__(self) -> int:
        return self.size


@dataclass
class KMedianFractional:
    y: dict[int, float]
    connection_cost: float
    alpha: tuple[float, float] = (1.0, 0.0)
    components: tuple[FractionalSolution, ...] = field(default_factory=tuple)
    fallback_used: bool = False

    @property
    def open_mass(self) -> float:
        return math.fsum(self.y.values())


class FracKMed:
    def __init__(self, space: WeightedMetricSpace, facility: FracLMP | None = None) -> None:
        self.space = space
        self.facility = facility if facility is not None else FracLMP(space)

    def solve(self, k: int, epsilon: float) -> KMedianFractional:
        n = len(self.space)
        if n == 0:
            raise EmptySpace("space is empty")
        if not 1 <= k <= n:
            raise KOutOfRange(f"k={k} outside 1..{n}")
        if not 0 < epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
        if n == 1:
            only = self.space.ids()[0]
            return KMedianFractional({only: 1.0}, 0.0)
        if k == 1:
            return self._solve_one()

        grid = LambdaGrid.for_space(self.space, epsilon)
        cache: dict[int, FractionalSolution] = {}

        def at(t: int) -> FractionalSolution:
            if t not in cache:
                cache[t] = self.facility.solution(grid[t])
            return cache[t]

        fallback = False
        lo, hi = 1, len(grid)
        if at(lo).open_mass >= k > at(hi).open_mass:
            # the bracket is kept at both ends, so no monotonicity is needed
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if at(mid).open_mass >= k:
                    lo = mid
                else:
                    hi = mid
        else:
            fallback = True
            log.warning("grid endpoints do not bracket k=%d; scanning the grid", k)
            for t in range(1, len(grid)):
                if at(t).open_mass >= k > at(t + 1).open_mass:
                    lo, hi = t, t + 1
                    break
            else:
                raise GridSearchFailed(f"no adjacent grid costs bracket k={k}")

        s1, s2 = at(lo), at(hi)
        m1, m2 = s1.open_mass, s2.open_mass
        if m1 == k:
            a1, a2 = 1.0, 0.0
        else:
            a1 = (k - m2) / (m1 - m2)
            a2 = 1.0 - a1
        y = {i: a1 * s1.y[i] + a2 * s2.y[i] for i in s1.y}
        cost = a1 * s1.connection_cost + a2 * s2.connection_cost
        return KMedianFractional(y, cost, (a1, a2), (s1, s2), fallback)

    def _solve_one(self) -> KMedianFractional:
        sp = self.space
        lam = len(sp) * sp.d_max * sp.w_max / 4
        sol = self.facility.solution(lam)
        total = sol.open_mass
        y = {i: v / total for i, v in sol.y.items()}
        radii = self.facility.radii
        beta = radii.beta
        # psi at the root of i's tree is sum_j w(j) * beta * d(i, j)
        cost = math.fsum(y[i] * radii.trees[i].root.psi / beta for i in y)
        return KMedianFractional(y, cost, (1.0, 0.0), (sol,))

    def value_estimate(self, k: int, epsilon: float) -> float:
        """Within ``[OPT_k, 12(1+epsilon) OPT_k]`` of the optimal k-median cost."""
        return INTEGRALITY_GAP * self.solve(k, epsilon).connection_cost


def estimate_or_zero(solver: FracKMed, k: int, epsilon: float) -> float:
    """Estimate for streams, where ``k`` may exceed the live count (cost 0 then)."""
    n = len(solver.space)
    if n == 0 or k >= n:
        return 0.0
    try:
        return solver.value_estimate(k, epsilon)
    except DegenerateSpace:
        return 0.0
