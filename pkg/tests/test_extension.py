import pytest
from hypothesis import assume, given, settings, strategies as st

from cubecrux.core import make_chart, reweight
from cubecrux.extension import (
    DistanceViolation,
    ExtensionError,
    NoMatch,
    PartialIsometry,
    Stalled,
    brute_force_extensions,
    extend_full,
    extend_one_step,
    h_sets,
    push_halfspace,
    witness_complete,
)
from cubecrux.generators import gen_grid, gen_path

from conftest import charts

SQ = gen_grid([1, 1])
TRIPOD = make_chart(["l0", "l1", "l2"], [0, 1, 2, 4], None, ["o", "a", "b", "c"])


def test_h_sets_on_path():
    p = gen_path(4)
    part = PartialIsometry(p, p, {"0": "0", "2": "2", "4": "4"})
    hs = {p.wall_ids[x.wall]: x for x in h_sets(part, "2")}
    assert {p.vertex_ids[a] for a in hs["p1"].members} == {"0"}
    assert {p.vertex_ids[a] for a in hs["p2"].members} == {"4"}
    assert all(x.has_witness for x in hs.values())


def test_h_sets_grid_corner():
    g = gen_grid([2, 2])
    part = PartialIsometry(g, g, {v: v for v in ("0,0", "0,1", "1,0", "2,2")})
    hs = {g.wall_ids[x.wall]: x for x in h_sets(part, "0,0")}
    assert {g.vertex_ids[a] for a in hs["d0.0"].members} == {"1,0", "2,2"}
    assert hs["d0.0"].witness == g.vid("1,0")
    assert hs["d1.0"].witness == g.vid("0,1")


def test_antipodal_square_flagged():
    part = PartialIsometry(SQ, SQ, {"0,0": "0,0", "1,1": "1,1"})
    assert not any(h.has_witness for h in h_sets(part, "0,0"))
    assert not witness_complete(SQ, [SQ.vid("0,0"), SQ.vid("1,1")])
    with pytest.raises(NoMatch):
        push_halfspace(part, "0,0", "d0.0")


def test_push_identity():
    g = gen_grid([2, 2])
    A = ("0,0", "0,1", "1,0", "1,1")
    part = PartialIsometry(g, g, {v: v for v in A})
    for w in ("d0.0", "d1.0"):
        h = push_halfspace(part, "0,0", w)
        assert g.wall_ids[h.wall] == w and h.sign == -g.sign(g.vid("0,0"), h.wall)


def test_rotation_minus_centre():
    g = gen_grid([2, 2])
    rot = {f"{i},{j}": f"{j},{2 - i}" for i in range(3) for j in range(3)}
    part = PartialIsometry(g, g, {a: b for a, b in rot.items() if a != "1,1"})
    full = extend_full(part)
    assert full == {g.vid(a): g.vid(b) for a, b in rot.items()}
    assert brute_force_extensions(part) == [full]


def test_path_endpoints_grow_one_layer():
    p = gen_path(4)
    part = PartialIsometry(p, p, {"0": "4", "4": "0"})
    step = extend_one_step(part)
    assert step.ids() == {"0": "4", "1": "3", "3": "1", "4": "0"}
    assert extend_full(part) == {i: 4 - i for i in range(5)}


def test_path_into_tripod_stalls():
    part = PartialIsometry(gen_path(2), TRIPOD, {"0": "a", "2": "b"})
    with pytest.raises(Stalled):
        extend_full(part)
    assert brute_force_extensions(part) == []


def test_brute_force_square():
    assert len(brute_force_extensions(PartialIsometry(SQ, SQ, {}))) == 8
    assert len(brute_force_extensions(PartialIsometry(SQ, SQ, {"0,0": "0,0"}))) == 2
    assert len(brute_force_extensions(PartialIsometry(SQ, SQ, {"0,0": "0,0", "0,1": "1,0"}))) == 1


def test_adversarial_rejections():
    p5 = gen_path(5)
    with pytest.raises(DistanceViolation):
        PartialIsometry(p5, p5, {"0": "0", "2": "3"})
    part = PartialIsometry(p5, p5, {"0": "3", "1": "4", "2": "5"})
    with pytest.raises(ExtensionError):
        extend_full(part)
    assert brute_force_extensions(part) == []
    a = reweight(gen_path(2), {"p0": 1, "p1": 2})
    b = reweight(gen_path(2), {"p0": 2, "p1": 1})
    part = PartialIsometry(a, b, {"0": "0"})
    with pytest.raises(ExtensionError):
        extend_full(part)
    assert brute_force_extensions(part) == []


@settings(max_examples=40, deadline=None)
@given(charts(), st.data())
def test_witness_complete_gives_unique_extension(chart, data):
    n = chart.n_vertices
    assume(n <= 20)
    A = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    part = PartialIsometry(chart, chart, {a: a for a in A})
    if witness_complete(chart, A):
        assert extend_full(part) == {v: v for v in range(n)}
        assert brute_force_extensions(part) == [{v: v for v in range(n)}]
    else:
        try:
            got = extend_full(part)
        except ExtensionError:
            return
        assert got in brute_force_extensions(part)
