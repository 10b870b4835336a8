import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cubecrux.core import Halfspace, make_chart
from cubecrux.generators import gen_grid, gen_path, tree_ball
from cubecrux.median import (
    NotConvex,
    NotDisjoint,
    bridge_decomposition,
    convex_set,
    gate,
    halfspace_set,
    hull,
    interval,
    is_convex,
    median,
    strongly_separated,
)

from conftest import charts, chart_with_points

SQ = gen_grid([1, 1])
TRIPOD = make_chart(["l0", "l1", "l2"], [0, 1, 2, 4], None, ["o", "a", "b", "c"])


def brute_interval(c, x, y):
    return {u for u in range(c.n_vertices) if c.distance(x, u) + c.distance(u, y) == c.distance(x, y)}


def brute_hull(c, A):
    """Close under intervals until stable."""
    S = set(A)
    while True:
        new = set().union(*(brute_interval(c, a, b) for a in S for b in S)) - S
        if not new:
            return S
        S |= new


def test_median_examples():
    cube = gen_grid([1, 1, 1])
    assert cube.vertex_ids[median(cube, "0,0,0", "1,1,0", "1,0,1")] == "1,0,0"
    assert median(cube, 3, 3, 5) == 3
    assert median(gen_path(5), 0, 5, 2) == 2


def test_interval_examples():
    assert len(interval(SQ, "0,0", "1,1")) == 4
    assert interval(SQ, 2, 2).members == {2}
    assert interval(gen_path(5), 1, 4).members == {1, 2, 3, 4}


def test_hull_examples():
    assert len(hull(SQ, ["0,0", "1,1"])) == 4
    assert hull(SQ, [1]).members == {1}
    assert hull(TRIPOD, ["a", "b"]).ids() == ["o", "a", "b"]


def test_gate_examples():
    C = convex_set(SQ, ["0,0", "0,1"])
    assert SQ.vertex_ids[gate(C, "1,1")] == "0,1"
    assert gate(C, "0,0") == SQ.vid("0,0")
    assert gate(convex_set(gen_path(5), [2, 3]), 0) == 2


def test_convexity_examples():
    # 0,1 and 1,0 are antipodal in the square, so the far corner lies between them
    assert not is_convex(SQ, ["0,0", "0,1", "1,0"])
    assert is_convex(gen_path(3), [0, 1, 2])
    assert not is_convex(SQ, ["0,0", "1,1"])
    with pytest.raises(NotConvex):
        convex_set(SQ, ["0,0", "1,1"])
    g = gen_grid([3, 3])
    for w in range(g.n_walls):
        assert is_convex(g, halfspace_set(g, Halfspace(w)).members)


def test_bridge_examples():
    t = tree_ball(3).chart
    h1, h2 = Halfspace(t.wid("a"), 1), Halfspace(t.wid("b"), 1)
    br = bridge_decomposition(halfspace_set(t, h1), halfspace_set(t, h2))
    assert br.shore_is_point and br.interval.members == set(interval(t, *br.gate_pair).members)
    g = gen_grid([3, 3])
    col0 = [v for v in range(g.n_vertices) if g.vertex_ids[v].startswith("0,")]
    col3 = [v for v in range(g.n_vertices) if g.vertex_ids[v].startswith("3,")]
    br = bridge_decomposition(convex_set(g, col0), convex_set(g, col3))
    assert br.shore_chart.n_vertices == 4 and len(br.interval) == 4
    both = bridge_decomposition(convex_set(g, col0), hull(g, ["0,0", "3,0"]))
    assert len(both.interval) == 1 and both.distance == 0


def test_strong_separation_examples():
    t = tree_ball(3).chart
    for w1, w2 in itertools.combinations(range(t.n_walls), 2):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            h1, h2 = Halfspace(w1, s1), Halfspace(w2, s2)
            if not t.side(h1) & t.side(h2):
                assert strongly_separated(t, h1, h2, verify=True)
    g = gen_grid([3, 3])
    assert not strongly_separated(g, Halfspace(g.wid("d0.0"), -1), Halfspace(g.wid("d0.2"), 1), verify=True)
    with pytest.raises(NotDisjoint):
        strongly_separated(g, Halfspace(g.wid("d0.0"), -1), Halfspace(g.wid("d1.2"), 1))


@given(chart_with_points(3))
def test_median_is_unique_common_interval_point(case):
    c, x, y, z = case
    common = brute_interval(c, x, y) & brute_interval(c, y, z) & brute_interval(c, x, z)
    assert common == {median(c, x, y, z)}


@given(chart_with_points(2))
def test_interval_matches_distances(case):
    c, x, y = case
    assert interval(c, x, y).members == brute_interval(c, x, y)


@settings(max_examples=40)
@given(chart_with_points(3))
def test_hull_matches_iteration(case):
    c, *pts = case
    assert hull(c, pts).members == brute_hull(c, pts)


@given(chart_with_points(5))
def test_gate_identities(case):
    c, a, b, x, y, u = case
    C = hull(c, [a, b])
    gx, gy = gate(C, x), gate(C, y)
    assert gx == min(C.members, key=lambda v: (c.distance(x, v), v))
    crossing = C.walls
    assert (c.masks[x] ^ c.masks[y]) & crossing == c.masks[gx] ^ c.masks[gy]
    assert gate(interval(c, a, u), x) == median(c, a, u, x)


@settings(max_examples=40)
@given(charts(), st.randoms(use_true_random=False))
def test_helly(c, rnd):
    sets = []
    for _ in range(4):
        pts = rnd.sample(range(c.n_vertices), min(c.n_vertices, rnd.randint(1, 3)))
        sets.append(hull(c, pts).members)
    if all(p & q for p, q in itertools.combinations(sets, 2)):
        assert frozenset.intersection(*sets)


@settings(max_examples=40)
@given(charts(), st.randoms(use_true_random=False))
def test_bridge_wall_partition(c, rnd):
    A = hull(c, rnd.sample(range(c.n_vertices), min(2, c.n_vertices)))
    B = hull(c, rnd.sample(range(c.n_vertices), 1))
    br = bridge_decomposition(A, B)
    assert br.hull.walls == (A.walls & B.walls) | br.separating
    for a, b in itertools.combinations(sorted(br.hull.members), 2):
        (sa, ia), (sb, ib) = br.product_map[a], br.product_map[b]
        assert c.distance(a, b) == br.shore_chart.distance(sa, sb) + c.distance(ia, ib)


@settings(max_examples=40)
@given(charts())
def test_strong_separation_iff_point_shore(c):
    for w1, w2 in itertools.combinations(range(c.n_walls), 2):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            h1, h2 = Halfspace(w1, s1), Halfspace(w2, s2)
            if c.side(h1) & c.side(h2):
                continue
            br = bridge_decomposition(halfspace_set(c, h1), halfspace_set(c, h2))
            assert strongly_separated(c, h1, h2) == (len(br.shore1) == 1)
