import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cubecrux.core import majority, validate
from cubecrux.generators import (
    closure_chart,
    fig1_fixtures,
    gen_grid,
    gen_path,
    gen_random_median,
    median_closure,
    random_suite,
)
from cubecrux.io import chart_hash
from cubecrux.median import median

PINNED = "b29d64065bae7834b1ec57fe6be126330279bdb215e65692de92eabcfd68d999"


def majority_closure(seeds):
    """Iterate the majority operation to a fixed point."""
    out = set(seeds)
    while True:
        new = {majority(a, b, c) for a, b, c in itertools.combinations(sorted(out), 3)} - out
        if not new:
            return sorted(out)
        out |= new


@settings(max_examples=60)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(0, 2**n - 1), min_size=1, max_size=6))))
def test_closure_matches_iteration(case):
    n, seeds = case
    assert median_closure(seeds, n) == majority_closure(seeds)


def test_basic_shapes():
    p = gen_path(5)
    assert (p.n_vertices, p.n_walls) == (6, 5)
    g = gen_grid([2, 2])
    assert (g.n_vertices, g.n_walls) == (9, 4)
    c = gen_grid([1, 1, 1])
    assert sorted(c.masks) == list(range(8))


def test_hypercube_seeds():
    c = closure_chart([0b000, 0b011, 0b101, 0b110, 0b111, 0b001, 0b010, 0b100], 3)
    assert c.n_vertices == 8 and c.n_walls == 3


def test_two_seeds_collapse_to_an_edge():
    c = closure_chart([0b00101, 0b11010], 5)
    assert c.n_vertices == 2 and c.n_walls == 1


def test_pinned_hash():
    c = gen_random_median(8, 6, 42)
    assert chart_hash(c) == PINNED
    assert chart_hash(gen_random_median(8, 6, 42)) == PINNED


def test_random_suite_is_valid():
    for c in random_suite(20, 12, 0):
        assert c.n_walls <= 12
        assert validate(c).masks == c.masks


def test_fig1():
    f = fig1_fixtures()
    lp, rp = f.left_points, f.right_points
    assert median(f.left, lp["x"], lp["y"], lp["z"]) == median(f.left, lp["x"], lp["y"], lp["z'"])
    assert median(f.right, rp["x"], rp["y"], rp["z"]) != median(f.right, rp["x"], rp["y"], rp["z'"])


@pytest.mark.parametrize("bad", [0, 17])
def test_wall_bounds(bad):
    with pytest.raises(ValueError):
        gen_random_median(bad, 3, 0)
