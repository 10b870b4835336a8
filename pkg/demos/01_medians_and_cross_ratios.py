"""Medians, intervals and cross ratios on small cube complexes.

Run with ``python demos/01_medians_and_cross_ratios.py``.
"""

from fractions import Fraction

from cubecrux import cross_ratio, crt, gromov_product, interval, median
from cubecrux.core import reweight
from cubecrux.generators import fig1_fixtures, gen_grid

# A 3x3 grid of squares, with one column of walls made heavier.
base = gen_grid([3, 3])
weights = {w: 1 for w in base.wall_ids}
weights.update({"d0.0": 2, "d0.1": Fraction(1, 2)})
grid = reweight(base, weights)
v = grid.vid
x, y, z, w = v("0,0"), v("3,3"), v("0,3"), v("3,0")

print("walls and weights:", dict(zip(grid.wall_ids, map(str, grid.weights))))
print("d(x, y) =", grid.distance(x, y))
print("median(x, y, z) =", grid.vertex_ids[median(grid, x, y, z)])
print("|I(x, z)| =", len(interval(grid, x, z).members))

# The Gromov product at x of y and z is the weight of the walls separating x from both.
print("(y | z)_x =", gromov_product(grid, x, y, z))

# Cross ratios of the four corners: the diagonals cross, so the ratio picks a side.
print("cr(x, y, z, w) =", cross_ratio(grid, x, y, z, w))
print("crt(x, y, z, w) =", crt(grid, x, y, z, w))

# Same cross ratios, different medians: the pair of charts used to show that
# cross ratios alone do not see the median structure.
fix = fig1_fixtures()
for name, chart, pts in (("star", fix.left, fix.left_points), ("cube", fix.right, fix.right_points)):
    a, b, c, c2 = (pts[k] for k in ("x", "y", "z", "z'"))
    m1, m2 = median(chart, a, b, c), median(chart, a, b, c2)
    print(f"{name}: cr(x, y, z, z') = {cross_ratio(chart, a, b, c, c2)}, "
          f"medians {chart.vertex_ids[m1]!r} and {chart.vertex_ids[m2]!r}")
