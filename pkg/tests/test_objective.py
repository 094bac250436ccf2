import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from dynkclust.errors import EmptyCenters, EmptySpace
from dynkclust.metric import leq
from dynkclust.objective import (clustering_cost, facility_cost, project_set,
                                 scaled_power_cost, unnormalized_cost)
from dynkclust.oracles import brute_opt_clustering

from conftest import A, B, C, random_space


def test_clustering_cost_line(line):
    assert clustering_cost(line, {B}, 1) == 3.0
    assert clustering_cost(line, {B}, math.inf) == 2.0
    for p in (1, 2, 5, math.inf):
        assert clustering_cost(line, {A, B, C}, p) == 0.0


def test_unnormalized_cost(line):
    assert unnormalized_cost(line, {B}, 2) == 5.0
    assert unnormalized_cost(line, {A, B, C}, 2) == 0.0
    assert unnormalized_cost(line, {A}, 1) == clustering_cost(line, {A}, 1)


def test_facility_cost(line):
    assert facility_cost(line, {B}, 1.0) == 4.0
    assert facility_cost(line, {A, B, C}, 1.0) == 3.0
    assert facility_cost(line, {C}, 0.0) == clustering_cost(line, {C}, 1)


def test_empty_errors(line):
    with pytest.raises(EmptyCenters):
        clustering_cost(line, set(), 1)
    with pytest.raises(EmptyCenters):
        facility_cost(line, set(), 1.0)
    with pytest.raises(EmptyCenters):
        project_set(line, {A}, set())
    for x in (A, B, C):
        line.delete(x)
    with pytest.raises(EmptySpace):
        clustering_cost(line, {A}, 1)


def test_project_set(line):
    assert project_set(line, {A}, {B, C}) == {B}
    assert project_set(line, {A, C}, {A, B, C}) == {A, C}


def test_projection_tie_smallest_id():
    from conftest import line_space
    sp = line_space((0.0, -1.0, 1.0))
    assert project_set(sp, {0}, {1, 2}) == {1}


def test_large_p_no_overflow():
    from conftest import line_space
    sp = line_space((0.0, 1e200, 3e200))
    c = clustering_cost(sp, {0}, 64)
    assert math.isfinite(c) and 3e200 <= c <= 3e200 * 2 ** (1 / 64)


def test_deleted_centers_still_cost(line):
    line.delete(B)
    assert clustering_cost(line, {B}, 1) == 3.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([1, 2, 4]))
def test_projection_at_most_doubles_cost(seed, p):
    rng = random.Random(seed)
    sp = random_space(rng, 8)
    ids = sp.ids()
    S = set(rng.sample(ids, rng.randint(1, 4)))
    X = set(rng.sample(ids, rng.randint(1, 8)))
    lhs = clustering_cost(sp, project_set(sp, S, X), p)
    assert leq(lhs, clustering_cost(sp, X, p) + 2 * clustering_cost(sp, S, p))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([1, 2]))
def test_restricted_solution_witness(seed, p):
    rng = random.Random(seed)
    sp = random_space(rng, 8)
    k = rng.randint(1, 3)
    X = set(rng.sample(sp.ids(), rng.randint(k, 8)))
    opt_set, opt = brute_opt_clustering(sp, k, p)
    proj = project_set(sp, opt_set, X)
    assert len(proj) <= k
    assert leq(clustering_cost(sp, proj, p), clustering_cost(sp, X, p) + 2 * opt)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([1, 2, 3, math.inf]))
def test_adding_center_never_hurts(seed, p):
    rng = random.Random(seed)
    sp = random_space(rng, 10)
    S = set(rng.sample(sp.ids(), 3))
    extra = rng.choice(sp.ids())
    assert leq(clustering_cost(sp, S | {extra}, p), clustering_cost(sp, S, p))


def test_scaled_power_cost_matches(line):
    assert scaled_power_cost(line, {B}, 2) == 5.0
    assert scaled_power_cost(line, {B}, 2, scale=0.5) == 1.25
