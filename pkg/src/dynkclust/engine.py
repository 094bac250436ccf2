"""Wiring of the dynamic pipelines over a single metric space."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import InvariantViolation
from .hierarchy import Hierarchy, HierarchyConfig, UpdateReport
from .kmedian import FracKMed, estimate_or_zero
from .metric import WeightedMetricSpace
from .objective import clustering_cost
from .projection import ProjectionState
from .stream import Event

log = logging.getLogger(__name__)


@dataclass
class StepResult:
    op: str
    n_live: int
    improper: set[int]
    proper: set[int]
    recourse_improper: int
    recourse_proper: int
    report: UpdateReport | None = None
    projection_deltas: list[int] = field(default_factory=list)


class DynamicClustering:
    """Improper solution from the layer hierarchy plus its live projection."""

    def __init__(self, space: WeightedMetricSpace, config: HierarchyConfig,
                 strict: bool = False) -> None:
        self.space = space
        self.config = config
        self.strict = strict
        self.hierarchy = Hierarchy(space, config, strict)
        self.projection = ProjectionState(space)
        self.violations = self.hierarchy.violations
        self._sync(self.hierarchy.current_solution(), [])

    def _violation(self, msg: str) -> None:
        self.violations.append(msg)
        if self.strict:
            raise InvariantViolation(msg)
        log.warning("invariant violation: %s", msg)

    def _sync(self, target: set[int], deltas: list[int]) -> None:
        proj = self.projection
        current = set(proj.order)
        for y in sorted(current - target):
            d = proj.apply_A_delete(y)
            deltas.append(len(d))
            if len(d) > 1:
                self._violation(f"projection changed by {len(d)} on center removal")
        for y in sorted(target - current):
            d = proj.apply_A_insert(y)
            deltas.append(len(d))
            if len(d) > 1:
                self._violation(f"projection changed by {len(d)} on center insertion")

    def apply(self, event: Event) -> StepResult:
        if event.op == "insert":
            return self.insert(event.id, event.weight, event.coords or None)
        return self.delete(event.id)

    def insert(self, x: int, weight: float, coords=None) -> StepResult:
        self.space.insert(x, weight, coords)
        old_a, old_l = self.hierarchy.current_solution(), self.projection.proper_solution()
        report = self.hierarchy.on_insert(x)
        deltas = [len(self.projection.apply_B_insert(x))]
        return self._finish("insert", report, deltas, old_a, old_l)

    def delete(self, x: int) -> StepResult:
        self.space.delete(x)
        old_a, old_l = self.hierarchy.current_solution(), self.projection.proper_solution()
        report = self.hierarchy.on_delete(x)
        deltas = [len(self.projection.apply_B_delete(x))]
        return self._finish("delete", report, deltas, old_a, old_l)

    def _finish(self, op: str, report: UpdateReport, deltas: list[int],
                old_a: set[int], old_l: set[int]) -> StepResult:
        if deltas[0] > 2:
            self._violation(f"projection changed by {deltas[0]} on a point update")
        new_a = self.hierarchy.current_solution()
        self._sync(new_a, deltas)
        self.space.collect(self.hierarchy.referenced())
        new_l = self.projection.proper_solution()
        return StepResult(op, len(self.space), new_a, new_l,
                          len(old_a ^ new_a), len(old_l ^ new_l), report, deltas)

    def improper_cost(self) -> float:
        return self.hierarchy.current_cost()

    def proper_cost(self) -> float:
        sol = self.projection.proper_solution()
        if not sol or len(self.space) == 0:
            return 0.0
        return clustering_cost(self.space, sol, self.config.p)


class ValueTracker:
    """Maintains the fractional k-median estimate over a dynamic space."""

    def __init__(self, space: WeightedMetricSpace, k: int, epsilon: float) -> None:
        self.space = space
        self.k = k
        self.epsilon = epsilon
        self.solver = FracKMed(space)

    def apply(self, event: Event) -> float:
        if event.op == "insert":
            self.space.insert(event.id, event.weight, event.coords or None)
            self.solver.facility.on_insert(event.id)
        else:
            self.space.delete(event.id)
            self.solver.facility.on_delete(event.id)
            self.space.collect()
        return self.estimate()

    def estimate(self) -> float:
        return estimate_or_zero(self.solver, self.k, self.epsilon)
