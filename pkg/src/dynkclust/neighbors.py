"""Per-point candidate lists ordered by distance.

For each live point ``z`` the structure keeps every current candidate center
in a list sorted by ``(d(z, c), c)``. All lists share one candidate set.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Iterable

from .errors import AlreadyPresent, EmptyCandidates, EmptyCenters, NotEnoughCandidates, NotPresent
from .metric import WeightedMetricSpace


class NeighborLists:
    # Lists are flat sorted Python lists: candidate sets here hold at most a
    # few hundred ids, where memmove insertion beats tree structures.

    def __init__(self, space: WeightedMetricSpace, points: Iterable[int] | None = None) -> None:
        self.space = space
        self._dist = space.distance_fn()
        self.lists: dict[int, list[tuple[float, int]]] = {
            z: [] for z in (space.ids() if points is None else points)
        }
        self.candidates: set[int] = set()

    @classmethod
    def build(cls, space: WeightedMetricSpace, candidates: Iterable[int],
              points: Iterable[int] | None = None) -> "NeighborLists":
        cands = sorted(set(candidates))
        if not cands:
            raise EmptyCenters("neighbor lists need at least one candidate")
        nl = cls(space, points)
        nl.candidates = set(cands)
        d = nl._dist
        for z, lst in nl.lists.items():
            lst.extend(sorted((d(z, c), c) for c in cands))
        return nl

    def __len__(self) -> int:
        return len(self.candidates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NeighborLists):
            return NotImplemented
        return self.candidates == other.candidates and self.lists == other.lists

    def add_candidate(self, x: int) -> None:
        if x in self.candidates:
            raise AlreadyPresent(x)
        self.candidates.add(x)
        d = self._dist
        for z, lst in self.lists.items():
            insort(lst, (d(z, x), x))

    def remove_candidate(self, x: int) -> None:
        if x not in self.candidates:
            raise NotPresent(x)
        self.candidates.discard(x)
        d = self._dist
        for z, lst in self.lists.items():
            del lst[bisect_left(lst, (d(z, x), x))]

    def first(self, z: int) -> int:
        lst = self.lists[z]
        if not lst:
            raise EmptyCandidates("no candidates")
        return lst[0][1]

    def second(self, z: int) -> int:
        lst = self.lists[z]
        if len(lst) < 2:
            raise NotEnoughCandidates("fewer than two candidates")
        return lst[1][1]

    def ordered(self, z: int) -> list[int]:
        return [c for _, c in self.lists[z]]

    def on_point_inserted(self, z: int) -> None:
        if z in self.lists:
            raise AlreadyPresent(z)
        d = self._dist
        self.lists[z] = sorted((d(z, c), c) for c in self.candidates)

    def on_point_deleted(self, z: int) -> None:
        del self.lists[z]

    def check(self) -> None:
        """Assert the shared-candidate and sortedness invariants."""
        for z, lst in self.lists.items():
            assert {c for _, c in lst} == self.candidates, z
            assert len(lst) == len(self.candidates), z
            assert all(lst[t] <= lst[t + 1] for t in range(len(lst) - 1)), z
