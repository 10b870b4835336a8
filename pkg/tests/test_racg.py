"""Normal forms and word lengths against the integer geometric representation.

In a right-angled Coxeter group the bilinear form has B(e_s, e_t) = 0 for
commuting generators and -1 otherwise, so every reflection is an integer
matrix.  The representation is faithful, which makes matrix equality an
independent test of group equality.
"""

import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubecrux.generators import RacgSpec, gen_racg_ball, pentagon_ball, tree_ball
from cubecrux.racg import RacgGroup

PENTAGON = RacgGroup("abcde", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")])
SQUARE_PLUS = RacgGroup("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])
TREE = RacgGroup("abc")
GROUPS = [PENTAGON, SQUARE_PLUS, TREE]


def reflections(G: RacgGroup):
    n = G.rank
    B = np.array([[1 if i == j else (0 if G.commutes[i][j] else -1) for j in range(n)] for i in range(n)])
    mats = []
    for s in range(n):
        M = np.eye(n, dtype=np.int64)
        M[s, :] -= 2 * B[s, :]
        mats.append(M)
    return mats


def matrix(G, word):
    mats = reflections(G)
    M = np.eye(G.rank, dtype=np.int64)
    for s in word:
        M = M @ mats[s]
    return M


def bfs_shortlex(G: RacgGroup, radius: int):
    """Shortest, then lexicographically least, word for each element up to ``radius``."""
    mats = reflections(G)
    start = np.eye(G.rank, dtype=np.int64)
    best = {start.tobytes(): ()}
    frontier = [((), start)]
    for _ in range(radius):
        nxt = {}
        for word, M in frontier:
            for s in range(G.rank):
                key_m = M @ mats[s]
                key = key_m.tobytes()
                w = word + (s,)
                if key in best:
                    continue
                if key not in nxt or w < nxt[key][0]:
                    nxt[key] = (w, key_m)
        for key, (w, M) in nxt.items():
            best[key] = w
        frontier = list(nxt.values())
    return best


@pytest.mark.parametrize("G", GROUPS, ids=["pentagon", "square+", "tree"])
def test_normal_forms_are_shortlex(G):
    table = bfs_shortlex(G, 4)
    for key, w in table.items():
        assert G.normal_form(w) == w
    # every word of length <= 4 reduces to the shortlex representative
    for n in range(5):
        for word in itertools.product(range(G.rank), repeat=n):
            assert G.normal_form(word) == table[matrix(G, word).tobytes()]


@pytest.mark.parametrize("G", GROUPS, ids=["pentagon", "square+", "tree"])
def test_prepend_matches_append(G):
    rng = np.random.default_rng(0)
    for _ in range(300):
        word = tuple(int(s) for s in rng.integers(0, G.rank, rng.integers(0, 8)))
        w = G.normal_form(word)
        s = int(rng.integers(0, G.rank))
        assert G.prepend(s, w) == G.normal_form((s,) + word)


words = st.lists(st.integers(0, 4), max_size=10).map(tuple)


@given(words, words)
def test_group_laws(u, v):
    G = PENTAGON
    a, b = G.normal_form(u), G.normal_form(v)
    assert G.multiply(G.inverse(a), a) == ()
    assert G.inverse(G.multiply(a, b)) == G.multiply(G.inverse(b), G.inverse(a))
    assert (matrix(G, G.multiply(a, b)) == matrix(G, u) @ matrix(G, v)).all()


@pytest.mark.parametrize("spec", [
    RacgSpec(("a", "b", "c"), (), 4),
    RacgSpec(tuple("abcde"), tuple((x, y) for x, y in zip("abcde", "bcdea")), 4),
])
def test_ball_distances_match_word_length(spec):
    ball = gen_racg_ball(spec)
    G = spec.group()
    table = bfs_shortlex(G, spec.radius)
    assert ball.chart.n_vertices == len(table)
    lengths = {w: len(w) for w in table.values()}
    for v, w in enumerate(ball.words):
        assert ball.chart.distance(0, v) == lengths[w]
    # distances between arbitrary vertices are word lengths of u^-1 v
    for u, v in itertools.islice(itertools.combinations(range(ball.chart.n_vertices), 2), 2000):
        assert ball.chart.distance(u, v) == len(G.multiply(G.inverse(ball.words[u]), ball.words[v]))


def test_tree_ball_sizes():
    for R in range(1, 6):
        assert tree_ball(R).chart.n_vertices == 1 + 3 * (2**R - 1)
    assert tree_ball(3).dimension == 1


def test_square_and_pentagon_balls():
    sq = gen_racg_ball(RacgSpec(("a", "b"), (("a", "b"),), 2))
    assert sq.chart.n_vertices == 4 and sq.dimension == 2
    p = pentagon_ball(2)
    assert p.chart.n_vertices == 21 and p.dimension == 2
    lk = p.chart.link(p.basepoint)
    assert len(lk.elements) == 5 and len(lk.edges) == 5
    assert all(sum(1 for e in lk.edges if w in e) == 2 for w in lk.elements)


def test_identity_format():
    assert PENTAGON.format(()) == "1"
    assert PENTAGON.parse("1") == ()
    assert PENTAGON.parse("ee") == ()
