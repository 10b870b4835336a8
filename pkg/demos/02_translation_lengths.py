"""Translation lengths of Coxeter group elements, computed on finite balls.

The ball only covers a finite part of the complex, so each element acts by a
partial map; lengths are read off where the displacement is already minimal,
with a sandwich bound as a fallback.
"""

from cubecrux.actions import cr_from_ell_check, min_set, translation_length
from cubecrux.generators import gen_line_ball, pentagon_ball, tree_ball

tree = tree_ball(8)
for word in ("a", "ab", "abc", "abab", "abcb"):
    cert = translation_length(tree, tree.left_mult(word))
    print(f"tree  l({word}) = {cert.value}  via {cert.method}")

g = tree.left_mult("ab")
axis = min_set(tree, g, translation_length(tree, g))
print("vertices of the ab-axis inside the ball:", len(axis))

pent = pentagon_ball(6)
cert = translation_length(pent, pent.left_mult("acd"))
print("pentagon l(acd) =", cert.value)

# A reflection of the line flips an edge; after subdividing it fixes a midpoint.
line = gen_line_ball(6)
cert = translation_length(line, line.generator("flip"))
print("line flip:", cert.value, "transforms", cert.transforms)

# Recover the cross ratio of a pair of elements from translation lengths of products.
for h in ("cb", "bc", "cabc"):
    rep = cr_from_ell_check(tree, tree.left_mult("ab"), tree.left_mult(h), 6)
    print(f"(ab, {h}): s = {rep.s_stable}, c = {rep.c_stable}, window {rep.window}, agree {rep.agree}")
