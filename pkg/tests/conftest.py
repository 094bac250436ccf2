import random

import pytest

from dynkclust.metric import WeightedMetricSpace

A, B, C = 0, 1, 2


def line_space(xs=(0.0, 1.0, 3.0), weights=None):
    sp = WeightedMetricSpace()
    for i, x in enumerate(xs):
        sp.insert(i, 1.0 if weights is None else weights[i], (x,))
    return sp


def random_space(rng: random.Random, n: int, grid: int | None = None, dim: int = 2,
                 wlo: float = 0.5, whi: float = 3.0, metric: str = "euclidean"):
    """``n`` distinct points, on an integer grid (to force ties) when ``grid`` is set."""
    sp = WeightedMetricSpace(metric)
    if grid is not None:
        cells = [(a, b) for a in range(grid) for b in range(grid)]
        pts = rng.sample(cells, n)
    else:
        pts = [tuple(rng.uniform(0, 10) for _ in range(dim)) for _ in range(n)]
    for i, pt in enumerate(pts):
        sp.insert(i, rng.uniform(wlo, whi), pt)
    return sp


def two_points(d=4.0):
    sp = WeightedMetricSpace()
    sp.insert(0, 1.0, (0.0,))
    sp.insert(1, 1.0, (d,))
    return sp


@pytest.fixture
def line():
    return line_space()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
