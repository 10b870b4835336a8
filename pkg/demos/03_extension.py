"""Growing a partial isometry into a full isomorphism, one layer at a time."""

from cubecrux.extension import (
    PartialIsometry,
    Stalled,
    brute_force_extensions,
    extend_full,
    extend_one_step,
    h_sets,
    witness_complete,
)
from cubecrux.generators import gen_grid, gen_path

g = gen_grid([2, 2])
rot = {f"{i},{j}": f"{j},{2 - i}" for i in range(3) for j in range(3)}
ring = {a: b for a, b in rot.items() if a != "1,1"}
part = PartialIsometry(g, g, ring)
print("ring is witness complete:", witness_complete(g, [g.vid(a) for a in ring]))
full = extend_full(part)
print("centre goes to", g.vertex_ids[full[g.vid("1,1")]])
print("extensions found by search:", len(brute_force_extensions(part)))

# The traces of walls at a corner, and which members witness them.
for h in h_sets(part, "0,0"):
    print(" wall", g.wall_ids[h.wall], "members", sorted(g.vertex_ids[m] for m in h.members),
          "witness", g.vertex_ids[h.witness] if h.has_witness else None)

p = gen_path(6)
step = PartialIsometry(p, p, {"0": "6", "6": "0"})
while not step.total:
    step = extend_one_step(step)
    print("domain", sorted(step.ids(), key=int))

# Two opposite corners of a square carry no witnesses; extension stops.
sq = gen_grid([1, 1])
try:
    extend_full(PartialIsometry(sq, sq, {"0,0": "0,0", "1,1": "1,1"}))
except Stalled as err:
    print("stalled:", err)
