from fractions import Fraction

from hypothesis import assume, strategies as st

from cubecrux.core import reweight
from cubecrux.generators import DegenerateSample, gen_random_median


def _chart(n_walls, n_seeds, seed):
    try:
        return gen_random_median(n_walls, n_seeds, seed)
    except DegenerateSample:
        return None


raw_charts = st.builds(_chart, st.integers(2, 9), st.integers(2, 6), st.integers(0, 2**32))


@st.composite
def charts(draw, weighted=True):
    c = draw(raw_charts)
    assume(c is not None)
    if weighted and draw(st.booleans()):
        ws = st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5, 3)])
        c = reweight(c, {w: draw(ws) for w in c.wall_ids})
    return c


@st.composite
def chart_with_points(draw, k, weighted=True):
    c = draw(charts(weighted))
    pts = draw(st.lists(st.integers(0, c.n_vertices - 1), min_size=k, max_size=k))
    return (c, *pts)
