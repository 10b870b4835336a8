from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubecrux.actions import (
    AutomorphismChart,
    BallChart,
    FixedPointAction,
    NotAdjacencyPreserving,
    WeightMismatch,
    cr_from_ell_check,
    inversion_report,
    lift_to_subdivision,
    min_set,
    neatly_contracting_witness,
    product_ball,
    subdivide_ball,
    tau_and_reduced,
    translation_length,
    validate_automorphism,
)
from cubecrux.core import reweight
from cubecrux.generators import gen_grid, gen_line_ball, gen_path, pentagon_ball, tree_ball

SQ = gen_grid([1, 1])
ROT = {"0,0": "0,1", "0,1": "1,1", "1,1": "1,0", "1,0": "0,0"}


@pytest.fixture(scope="module")
def tree():
    return tree_ball(8)


def test_validate_examples():
    g = validate_automorphism(SQ, {SQ.vid(a): SQ.vid(b) for a, b in ROT.items()})
    assert g.total
    heavy = reweight(SQ, {"d0.0": 1, "d1.0": 2})
    with pytest.raises(WeightMismatch):
        validate_automorphism(heavy, {heavy.vid(a): heavy.vid(b) for a, b in ROT.items()})
    p = gen_path(4)
    with pytest.raises(NotAdjacencyPreserving):
        validate_automorphism(p, {0: 0, 1: 2, 2: 1, 3: 3, 4: 4})


def test_inversions_on_the_line():
    ball = gen_line_ball(10)
    shift, flip = ball.generator("shift"), ball.generator("flip")
    rep = inversion_report(shift, 2, nt_walls=list(shift.wall_map))
    assert rep.stably_without_inversions and rep.non_transverse
    rep = inversion_report(flip, 1)
    assert rep.inverted == {1: ["h0"]}
    cert = translation_length(ball, flip)
    assert cert.value == 0 and cert.subdivided
    lifted = cert.auto
    assert inversion_report(lifted, 2).stably_without_inversions


def test_line_shift():
    ball = gen_line_ball(10)
    g = ball.generator("shift")
    cert = translation_length(ball, g)
    assert cert.value == 1 and cert.method == "min-displacement"
    assert len(min_set(ball, g, cert)) == 20


def test_tree_lengths(tree):
    for n in range(1, 5):
        cert = translation_length(tree, tree.left_mult("ab" * n))
        assert cert.value == 2 * n
    cert = translation_length(tree, tree.left_mult("ab"))
    axis = min_set(tree, tree.left_mult("ab"), cert)
    assert len(axis) == 1 + 2 * 8
    assert all(set(w) <= {0, 1} for w in (tree.words[v] for v in axis))


def test_square_rotation():
    ball = BallChart(SQ, 0, Fraction(2), Fraction(2), 2)
    rot = validate_automorphism(SQ, {SQ.vid(a): SQ.vid(b) for a, b in ROT.items()})
    assert all(rot.displacement(v) > 0 for v in range(4))
    cert = translation_length(ball, rot)
    assert cert.value == 0 and cert.subdivided
    assert cert.witness is not None and cert.ball.chart.vertex_ids[cert.witness] == "0,0*d0.0,d1.0"
    ball.generators = {"r": rot}
    with pytest.raises(FixedPointAction):
        tau_and_reduced(ball)


def test_tau_on_the_line():
    words = {"s2": ["shift", "shift"], "s3": ["shift"] * 3}
    tau, red = tau_and_reduced(gen_line_ball(8), ["shift"], words)
    assert tau == 1 and red == {"shift": 1, "s2": 2, "s3": 3}
    tau3, red3 = tau_and_reduced(gen_line_ball(8, 3), ["shift"], words)
    assert tau3 == 3 and red3 == red


def test_neat(tree):
    assert neatly_contracting_witness(tree, tree.left_mult("ab")) is not None
    line = gen_line_ball(8)
    assert neatly_contracting_witness(line, line.generator("shift")) is not None
    plane = product_ball(gen_line_ball(4), gen_line_ball(4))
    assert neatly_contracting_witness(plane, plane.generator("shift")) is None


def test_neat_chain_is_strictly_nested(tree):
    from cubecrux.actions import _contained, _image_halfspace
    from cubecrux.median import strongly_separated
    g = tree.left_mult("ab")
    wit = neatly_contracting_witness(tree, g)
    h = wit.h1
    for _ in range(3):
        gh = _image_halfspace(g, h)
        if gh is None:
            break
        assert gh != h and _contained(tree.chart, gh, h)
        assert strongly_separated(tree.chart, gh, h.star)
        h = gh


@pytest.mark.parametrize("g,h,s,c", [
    ("ab", "cb", 0, 0),
    ("ab", "bc", 2, -1),
    ("ab", "cabc", -2, 1),
    ("ab", "ca", 2, -1),
])
def test_cr_from_ell_tree(g, h, s, c):
    ball = tree_ball(12)
    rep = cr_from_ell_check(ball, ball.left_mult(g), ball.left_mult(h), 8)
    assert (rep.s_stable, rep.c_stable) == (s, c) and rep.agree


def test_subdivision_and_product_lengths():
    small = tree_ball(6)
    ab = small.left_mult("ab")
    sub_ball, sub = subdivide_ball(small, halve=False)
    assert translation_length(sub_ball, lift_to_subdivision(sub, ab)).value == 4
    prod = product_ball(small, small)
    diag = prod.generator("a").compose(prod.generator("b"))
    assert translation_length(prod, diag).value == 4


def cyclic_length(word: str) -> int:
    w = list(word)
    while len(w) >= 2 and w[0] == w[-1]:
        w = w[1:-1]
    return len(w) if len(w) >= 2 else 0


tree_words = st.lists(st.sampled_from("abc"), min_size=1, max_size=4).map("".join)


@settings(max_examples=25, deadline=None)
@given(tree_words)
def test_tree_length_is_cyclic_length(word):
    ball = tree_ball(8)
    g = ball.left_mult(word)
    reduced = ball.group.format(g.word)
    assert translation_length(ball, g).value == cyclic_length(reduced if reduced != "1" else "")


@settings(max_examples=15, deadline=None)
@given(tree_words, st.integers(2, 3))
def test_length_of_powers(word, n):
    ball = tree_ball(8)
    g = ball.left_mult(word)
    ell = translation_length(ball, g).value
    assert translation_length(ball, g.power(n)).value == n * ell


@settings(max_examples=15, deadline=None)
@given(tree_words)
def test_sandwich(word):
    ball = tree_ball(8)
    g = ball.left_mult(word)
    ell = translation_length(ball, g).value
    o, D = ball.basepoint, ball.dimension
    d1 = g.orbit_distance(o, 1)
    for n in range(1, 6):
        dn = g.orbit_distance(o, n)
        assert n * ell <= dn <= n * ell + D * d1


def test_pentagon_length_and_sandwich():
    ball = pentagon_ball(6)
    g = ball.left_mult("acd")
    cert = translation_length(ball, g)
    assert cert.value == 3
    o = ball.basepoint
    for n in range(1, 6):
        assert n * 3 <= g.orbit_distance(o, n) <= n * 3 + 2 * g.orbit_distance(o, 1)


def test_explicit_compose_and_power():
    ball = gen_line_ball(6)
    s = ball.generator("shift")
    s2 = s.compose(s)
    assert s2.mapping == s.power(2).mapping
    ident = s.inverse().compose(s).mapping
    assert ident and all(k == v for k, v in ident.items())
    assert isinstance(s2, AutomorphismChart)
