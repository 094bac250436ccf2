"""Maintaining an ordered projection of an improper center set onto live points.

Given centers ``y_1 .. y_m`` (which may include deleted points) and the live
set ``B``, the projection picks ``x_i`` as the point of ``B`` nearest to
``y_i`` among those not already picked by ``y_1 .. y_{i-1}``. Each index keeps
its sorted list of still-available points, so an update to either side
ripples forward through the indices carrying only a constant-size difference.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Iterable, Sequence

from .errors import MembershipViolation
from .metric import WeightedMetricSpace


def project_order(space: WeightedMetricSpace, order: Sequence[int],
                  live: Iterable[int]) -> list[int | None]:
    """From-scratch projection of ``order`` onto ``live``; ties to the smallest id."""
    avail = set(live)
    out: list[int | None] = []
    for y in order:
        if not avail:
            out.append(None)
            continue
        x = min(avail, key=lambda c: (space.distance(y, c), c))
        avail.discard(x)
        out.append(x)
    return out


class ProjectionState:
    def __init__(self, space: WeightedMetricSpace) -> None:
        self.space = space
        self._dist = space.distance_fn()
        self.order: list[int] = []
        self.lists: list[list[tuple[float, int]]] = []
        self.proj: list[int | None] = []
        self.live: set[int] = set(space.ids())

    def __len__(self) -> int:
        return len(self.order)

    def proper_solution(self) -> set[int]:
        return {x for x in self.proj if x is not None}

    def _available(self) -> set[int]:
        return self.live - self.proper_solution()

    def _ripple(self, start: int, plus: set[int], minus: set[int]) -> set[int]:
        """Push an availability difference forward from index ``start``.

        ``plus`` and ``minus`` are the points gained and lost by the available
        set seen at ``start``. Returns the symmetric difference of the
        projection.
        """
        dropped: set[int] = set()
        added: set[int] = set()
        d = self._dist
        i = start
        while (plus or minus) and i < len(self.order):
            y, lst = self.order[i], self.lists[i]
            for x in minus:
                del lst[bisect_left(lst, (d(y, x), x))]
            for x in plus:
                insort(lst, (d(y, x), x))
            old = self.proj[i]
            new = lst[0][1] if lst else None
            if new != old:
                if old is not None:
                    dropped.add(old)
                if new is not None:
                    added.add(new)
            # the next index sees this one's available set minus its pick
            if new is not None:
                if new in plus:
                    plus.discard(new)
                else:
                    minus.add(new)
            if old is not None:
                if old in minus:
                    minus.discard(old)
                else:
                    plus.add(old)
            self.proj[i] = new
            i += 1
        return dropped ^ added

    def apply_A_insert(self, y: int) -> set[int]:
        if y in self.order:
            raise MembershipViolation(f"{y} is already a center")
        d = self._dist
        lst = sorted((d(y, x), x) for x in self._available())
        self.order.append(y)
        self.lists.append(lst)
        x = lst[0][1] if lst else None
        self.proj.append(x)
        return set() if x is None else {x}

    def apply_A_delete(self, y: int) -> set[int]:
        try:
            j = self.order.index(y)
        except ValueError:
            raise MembershipViolation(f"{y} is not a center") from None
        x = self.proj[j]
        del self.order[j], self.lists[j], self.proj[j]
        if x is None:
            return set()
        return {x} ^ self._ripple(j, {x}, set())

    def apply_B_insert(self, x: int) -> set[int]:
        if x in self.live:
            raise MembershipViolation(f"{x} is already live")
        self.live.add(x)
        return self._ripple(0, {x}, set())

    def apply_B_delete(self, x: int) -> set[int]:
        if x not in self.live:
            raise MembershipViolation(f"{x} is not live")
        self.live.discard(x)
        return self._ripple(0, set(), {x})

    def check(self) -> None:
        assert self.proj == project_order(self.space, self.order, self.live)
