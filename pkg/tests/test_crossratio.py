import itertools

from hypothesis import assume, given

from cubecrux.core import make_chart
from cubecrux.crossratio import (
    cross_ratio,
    cross_ratio_from_distances,
    crt,
    cut_point_conditions,
    cut_points,
    gromov_product,
    is_opposite,
    mobius_check,
    opposite_triples_through,
)
from cubecrux.generators import fig1_fixtures, gen_grid, gen_path
from cubecrux.median import interval, median

from conftest import chart_with_points

P5 = gen_path(5)
SQ = gen_grid([1, 1])
TRIPOD = make_chart(["l0", "l1", "l2"], [0, 1, 2, 4], None, ["o", "a", "b", "c"])


def test_gromov_examples():
    assert gromov_product(P5, 0, 3, 5) == 3
    assert gromov_product(TRIPOD, "o", "a", "b") == 0
    assert gromov_product(P5, 1, 4, 4) == 3


def test_cross_ratio_examples():
    assert cross_ratio(P5, 0, 5, 2, 3) == 1
    assert cross_ratio(P5, 0, 5, 3, 3) == 0
    assert crt(P5, 0, 5, 2, 3).entries == (0, 1, 0)
    assert crt(P5, 1, 4, 1, 4).entries == (0, 3, 0)
    f = fig1_fixtures()
    for c, p in ((f.left, f.left_points), (f.right, f.right_points)):
        for perm in itertools.permutations([p["x"], p["y"], p["z"], p["z'"]]):
            assert cross_ratio(c, *perm) == 0
            assert crt(c, *perm).entries == (0, 0, 0)


def test_opposite_examples():
    assert all(is_opposite(P5, 0, 5, z) for z in range(6))
    assert not is_opposite(SQ, "0,0", "1,1", "1,0")
    f = fig1_fixtures()
    lp, rp = f.left_points, f.right_points
    assert is_opposite(f.left, lp["x"], lp["y"], lp["z"])
    assert not is_opposite(f.right, rp["x"], rp["y"], rp["z"])


def test_cut_point_examples():
    assert cut_points(P5, 0, 5) == list(range(6))
    assert SQ.vertex_ids[0] == "0,0"
    assert [SQ.vertex_ids[v] for v in cut_points(SQ, "0,0", "1,1")] == ["0,0", "1,1"]
    g = gen_grid([2, 1])
    assert [g.vertex_ids[v] for v in cut_points(g, "0,0", "2,1")] == ["0,0", "2,1"]
    stack = gen_grid([1, 2])
    # two squares glued along an edge: no vertex between opposite corners cuts
    assert [stack.vertex_ids[v] for v in cut_points(stack, "0,0", "1,2")] == ["0,0", "1,2"]


def test_opposite_triples():
    assert len(opposite_triples_through(TRIPOD, "o", ["a", "b", "c"])) == 3
    assert opposite_triples_through(P5, 2, [0, 2, 5]) == [(0, 5, 2)]
    cube = gen_grid([1, 1, 1])
    corners = [cube.vid(s) for s in ("1,0,0", "0,1,0", "0,0,1", "0,0,0")]
    assert opposite_triples_through(cube, "0,0,0", corners) == []


def test_mobius_examples():
    ident = {v: v for v in P5.vertex_ids}
    assert mobius_check(P5, P5, ident).passed
    flip = {str(k): str(5 - k) for k in range(6)}
    assert mobius_check(P5, P5, flip).passed
    p3 = gen_path(3)
    rep = mobius_check(p3, p3, {"0": "0", "1": "2", "2": "1", "3": "3"})
    assert not rep.passed and rep.violation is not None


@given(chart_with_points(5))
def test_axioms(case):
    c, x, y, z, w, t = case
    cr = lambda *a: cross_ratio(c, *a)  # noqa: E731
    assert cr(x, y, z, w) == -cr(y, x, z, w)
    assert cr(x, y, z, w) == cr(z, w, x, y)
    assert cr(x, y, z, w) == cr(x, y, z, t) + cr(x, y, t, w)
    assert cr(x, y, z, w) + cr(y, z, x, w) + cr(z, x, y, w) == 0


@given(chart_with_points(5))
def test_basepoint_independence(case):
    c, v, x, y, z, w = case
    gp = lambda a, b: gromov_product(c, v, a, b)  # noqa: E731
    via_gromov = gp(x, z) + gp(y, w) - gp(x, w) - gp(y, z)
    assert via_gromov == cross_ratio(c, x, y, z, w)
    assert via_gromov == cross_ratio_from_distances(c.distance, x, y, z, w)


@given(chart_with_points(4))
def test_order_eight_symmetry(case):
    c, *p = case
    base = abs(cross_ratio(c, *p))
    x, y, z, w = p
    for q in [(y, x, z, w), (z, w, x, y), (w, z, y, x), (x, y, w, z), (y, x, w, z), (z, w, y, x), (w, z, x, y)]:
        assert abs(cross_ratio(c, *q)) == base


@given(chart_with_points(4))
def test_crt_entries(case):
    c, *p = case
    t = crt(c, *p)
    assert min(t.entries) == 0 and all(e >= 0 for e in t.entries)
    assert t.cr == cross_ratio(c, *p)


@given(chart_with_points(3))
def test_opposite_kills_one_gromov_product(case):
    c, x, y, z = case
    assume(x != y)
    if is_opposite(c, x, y, z):
        m = median(c, x, y, z)
        for w in range(c.n_vertices):
            assert min(gromov_product(c, m, x, w), gromov_product(c, m, y, w)) == 0


@given(chart_with_points(3))
def test_opposite_iff_no_small_first_entry(case):
    c, x1, x2, y = case
    assume(len({x1, x2, y}) == 3)
    witnesses = [z for z in range(c.n_vertices)
                 if (lambda e: e[0] < min(e[1], e[2]))(crt(c, x1, x2, y, z).entries)]
    assert is_opposite(c, x1, x2, y) == (not witnesses)


@given(chart_with_points(2))
def test_cut_point_conditions_agree(case):
    c, x, y = case
    for v in interval(c, x, y).members:
        a, b, d = cut_point_conditions(c, x, y, v)
        assert a == b == d
