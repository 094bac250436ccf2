"""Dynamic weighted metric space with extrema tracking.

Points are identified by integers. Distances come either from a fixed
symmetric matrix over a universe ``0..n-1`` or from coordinate vectors under
the Euclidean or L1 metric. Deleted points keep their payload until
:meth:`WeightedMetricSpace.collect` releases it, so centers that have left the
space can still be measured against (improper solutions).
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Sequence

import numpy as np
from sortedcontainers import SortedList

from .errors import (
    DegenerateSpace,
    DuplicateId,
    EmptySpace,
    InvalidMetric,
    NonpositiveWeight,
    UnknownId,
    UnknownMatrixId,
)

log = logging.getLogger(__name__)

ATOL = 1e-12
RTOL = 1e-9
TRIANGLE_CHECK_LIMIT = 512

METRICS = ("euclidean", "l1")


def isclose(a: float, b: float, rtol: float = RTOL, atol: float = ATOL) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def leq(a: float, b: float, rtol: float = RTOL, atol: float = ATOL) -> bool:
    """``a <= b`` up to the package-wide tolerance."""
    return a <= b + atol + rtol * abs(b)


def validate_matrix(matrix: np.ndarray, check_triangle: bool | None = None) -> None:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMetric(f"distance matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMetric("distance matrix has non-finite entries")
    if np.any(m < 0):
        raise InvalidMetric("distance matrix has negative entries")
    if np.any(np.diag(m) != 0):
        raise InvalidMetric("distance matrix has nonzero diagonal")
    if not np.array_equal(m, m.T):
        raise InvalidMetric("distance matrix is not symmetric")
    n = m.shape[0]
    if check_triangle is None:
        check_triangle = n <= TRIANGLE_CHECK_LIMIT
        if not check_triangle:
            log.warning("skipping triangle-inequality check for %d-point matrix", n)
    if check_triangle:
        slack = ATOL + RTOL * m.max(initial=0.0)
        for k in range(n):
            via = m[:, k][:, None] + m[k, :][None, :]
            if np.any(m > via + slack):
                i, j = np.argwhere(m > via + slack)[0]
                raise InvalidMetric(f"triangle inequality fails for ({i}, {k}, {j})")


class ExtremaTracker:
    """Ordered multisets of live pairwise distances and live weights."""

    def __init__(self) -> None:
        self.dists: SortedList = SortedList()
        self.weights: SortedList = SortedList()

    def add_point(self, weight: float, dists: Iterable[float]) -> None:
        self.weights.add(weight)
        self.dists.update(d for d in dists if d > 0)

    def remove_point(self, weight: float, dists: Iterable[float]) -> None:
        self.weights.remove(weight)
        for d in dists:
            if d > 0:
                self.dists.remove(d)


class WeightedMetricSpace:
    """A set of live weighted points plus a distance source.

    Use :meth:`from_matrix` for matrix mode; the default constructor gives a
    coordinate space (``metric`` is ``"euclidean"`` or ``"l1"``).
    """

    def __init__(self, metric: str = "euclidean") -> None:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
        self.metric = metric
        self._matrix: list[list[float]] | None = None
        self._coords: dict[int, tuple[float, ...]] = {}
        self._dim: int | None = None
        self._weight: dict[int, float] = {}
        self._retired: set[int] = set()
        self._used: set[int] = set()
        self.extrema = ExtremaTracker()

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]] | np.ndarray,
                    check_triangle: bool | None = None) -> "WeightedMetricSpace":
        m = np.asarray(matrix, dtype=float)
        validate_matrix(m, check_triangle)
        space = cls()
        space.metric = "matrix"
        space._matrix = m.tolist()
        return space

    # -- membership ---------------------------------------------------

    @property
    def matrix_mode(self) -> bool:
        return self._matrix is not None

    @property
    def universe_size(self) -> int | None:
        return None if self._matrix is None else len(self._matrix)

    def __len__(self) -> int:
        return len(self._weight)

    def __contains__(self, i: object) -> bool:
        return i in self._weight

    def ids(self) -> list[int]:
        """Live ids in increasing order."""
        return sorted(self._weight)

    def weight(self, i: int) -> float:
        try:
            return self._weight[i]
        except KeyError:
            raise UnknownId(i) from None

    def weights(self) -> dict[int, float]:
        return dict(self._weight)

    def is_known(self, i: int) -> bool:
        """True for live points and for deleted points whose payload is retained."""
        return i in self._weight or i in self._retired

    def coords(self, i: int) -> tuple[float, ...]:
        if not self.is_known(i) or self._matrix is not None:
            raise UnknownId(i)
        return self._coords[i]

    # -- distances ----------------------------------------------------

    def distance(self, i: int, j: int) -> float:
        if not (self.is_known(i) and self.is_known(j)):
            raise UnknownId(i if not self.is_known(i) else j)
        if i == j:
            return 0.0
        if self._matrix is not None:
            return self._matrix[i][j]
        a, b = self._coords[i], self._coords[j]
        if self.metric == "euclidean":
            return math.dist(a, b)
        return sum(abs(x - y) for x, y in zip(a, b))

    def distance_fn(self):
        """Unchecked distance callable for hot loops; ids must be known."""
        if self._matrix is not None:
            m = self._matrix
            return lambda i, j: m[i][j]
        c = self._coords
        if self.metric == "euclidean":
            dist = math.dist
            return lambda i, j: 0.0 if i == j else dist(c[i], c[j])
        return lambda i, j: 0.0 if i == j else sum(abs(x - y) for x, y in zip(c[i], c[j]))

    def distance_matrix(self, ids: Sequence[int] | None = None,
                        cols: Sequence[int] | None = None) -> np.ndarray:
        rows = self.ids() if ids is None else list(ids)
        cols = rows if cols is None else list(cols)
        out = np.empty((len(rows), len(cols)))
        for a, i in enumerate(rows):
            for b, j in enumerate(cols):
                out[a, b] = self.distance(i, j)
        return out

    # -- updates ------------------------------------------------------

    def insert(self, i: int, weight: float, coords: Sequence[float] | None = None) -> None:
        if i in self._used:
            raise DuplicateId(i)
        if not weight > 0 or not math.isfinite(weight):
            raise NonpositiveWeight(f"point {i} has weight {weight}")
        if self._matrix is not None:
            if not (isinstance(i, int) and 0 <= i < len(self._matrix)):
                raise UnknownMatrixId(i)
            if coords:
                raise ValueError("matrix mode takes no coordinates")
        else:
            if coords is None:
                raise ValueError("coordinate mode requires coordinates")
            vec = tuple(float(x) for x in coords)
            if self._dim is None:
                self._dim = len(vec)
            elif len(vec) != self._dim:
                raise ValueError(f"point {i} has dimension {len(vec)}, expected {self._dim}")
            self._coords[i] = vec
        self._used.add(i)
        self._weight[i] = float(weight)
        dists = [self.distance(i, j) for j in self._weight if j != i]
        if any(d == 0 for d in dists):
            self._used.discard(i)
            del self._weight[i]
            self._coords.pop(i, None)
            raise DuplicateId(f"point {i} coincides with a live point")
        self.extrema.add_point(float(weight), dists)

    def delete(self, i: int) -> None:
        if i not in self._weight:
            raise UnknownId(i)
        w = self._weight.pop(i)
        self._retired.add(i)
        self.extrema.remove_point(w, [self.distance(i, j) for j in self._weight])

    def collect(self, keep: Iterable[int] = ()) -> list[int]:
        """Drop retained payloads of deleted points not listed in ``keep``."""
        keep = set(keep)
        dropped = [i for i in self._retired if i not in keep]
        for i in dropped:
            self._retired.discard(i)
            self._coords.pop(i, None)
        return sorted(dropped)

    @property
    def retained(self) -> set[int]:
        return set(self._retired)

    # -- extrema ------------------------------------------------------

    def _need_pairs(self) -> None:
        if not self._weight:
            raise EmptySpace("space is empty")
        if not self.extrema.dists:
            raise DegenerateSpace("need two live points for distance extrema")

    @property
    def d_min(self) -> float:
        self._need_pairs()
        return self.extrema.dists[0]

    @property
    def d_max(self) -> float:
        self._need_pairs()
        return self.extrema.dists[-1]

    @property
    def w_min(self) -> float:
        if not self._weight:
            raise EmptySpace("space is empty")
        return self.extrema.weights[0]

    @property
    def w_max(self) -> float:
        if not self._weight:
            raise EmptySpace("space is empty")
        return self.extrema.weights[-1]

    def aspect_ratio(self) -> float:
        self._need_pairs()
        return (self.d_max * self.w_max) / (self.d_min * self.w_min)
