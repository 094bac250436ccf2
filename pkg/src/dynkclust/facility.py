"""Fractional Mettu-Plaxton facility location on top of :class:`RadiiMP`.

With radii ``r_i`` computed at scale 1/4, point ``i`` opens ``y_i = w(i) r_i / lam``
and client ``j`` sends ``x_{j->i} = w(i) * max(0, r_j - d(i,j)/4) / lam`` to ``i``.
A second radii structure at scale 1/2, built on first use, yields a feasible
dual solution for checking the approximation guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySpace, NonpositiveLambda
from .metric import WeightedMetricSpace
from .radii import RadiiMP

BETA = 0.25
DUAL_BETA = 0.5


@dataclass
class FractionalSolution:
    y: dict[int, float]
    open_mass: float
    connection_cost: float
    lam: float


@dataclass
class DualSolution:
    v: dict[int, float]
    w_dual: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.fsum(self.v.values())


class FracLMP:
    """Keeps radii structures in sync with a space and answers UFL queries."""

    def __init__(self, space: WeightedMetricSpace) -> None:
        self.space = space
        self.radii = RadiiMP(space, BETA)
        self._dual: RadiiMP | None = None

    @property
    def dual_radii(self) -> RadiiMP:
        if self._dual is None:
            self._dual = RadiiMP(self.space, DUAL_BETA)
        return self._dual

    def on_insert(self, j: int) -> None:
        self.radii.on_insert(j)
        if self._dual is not None:
            self._dual.on_insert(j)

    def on_delete(self, j: int) -> None:
        self.radii.on_delete(j)
        if self._dual is not None:
            self._dual.on_delete(j)

    def _check(self, lam: float) -> None:
        if not lam > 0:
            raise NonpositiveLambda(lam)
        if len(self.space) == 0:
            raise EmptySpace("space is empty")

    def solution(self, lam: float) -> FractionalSolution:
        self._check(lam)
        y: dict[int, float] = {}
        costs = []
        for i in self.space.ids():
            r, c = self.radii.radius_and_cost(i, lam)
            y[i] = self.space.weight(i) * r / lam
            costs.append(c)
        return FractionalSolution(y, math.fsum(y.values()), 4 * math.fsum(costs), lam)

    def open_mass(self, lam: float) -> float:
        return self.solution(lam).open_mass

    def connection_cost_total(self, lam: float) -> float:
        self._check(lam)
        return 4 * math.fsum(self.radii.connection_cost(i, lam) for i in self.space.ids())

    def materialize_assignment(self, lam: float) -> tuple[list[int], np.ndarray]:
        """Ids and the matrix ``x[j, i]`` of client ``j``'s share at facility ``i``."""
        self._check(lam)
        ids = self.space.ids()
        w = np.array([self.space.weight(i) for i in ids])
        d = BETA * self.space.distance_matrix(ids)
        r = np.array([self.radii.radius(j, lam) for j in ids])
        x = np.maximum(0.0, r[:, None] - d) * w[None, :] / lam
        return ids, x

    def dual_witness(self, lam: float) -> DualSolution:
        self._check(lam)
        ids = self.space.ids()
        r = {j: self.dual_radii.radius(j, lam) for j in ids}
        v = {j: self.space.weight(j) * r[j] for j in ids}
        wd = {}
        for j in ids:
            wj = self.space.weight(j)
            for i in ids:
                wd[(j, i)] = max(0.0, wj * (r[j] - self.space.distance(i, j)))
        return DualSolution(v, wd)


def check_dual(space: WeightedMetricSpace, dual: DualSolution, lam: float,
               rtol: float = 1e-9) -> None:
    """Assert ``sum_j w_{j->i} <= lam`` and ``v_j <= w(j) d(i,j) + w_{j->i}``."""
    ids = space.ids()
    for i in ids:
        load = math.fsum(dual.w_dual[(j, i)] for j in ids)
        assert load <= lam * (1 + rtol) + 1e-12, (i, load, lam)
    for j in ids:
        for i in ids:
            rhs = space.weight(j) * space.distance(i, j) + dual.w_dual[(j, i)]
            assert dual.v[j] <= rhs + 1e-12 + rtol * abs(rhs), (j, i)
