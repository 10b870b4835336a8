"""Deterministic and random test charts."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .actions import AutomorphismChart, BallChart, LeftMultiplication
from .core import ChartError, ComplexChart, as_weight, make_chart, validate
from .racg import RacgGroup


class DegenerateSample(ChartError):
    code = "degenerate-sample"


def gen_path(n: int, weight=1) -> ComplexChart:
    """Path with vertices ``0..n`` and wall ``p{k}`` between ``k`` and ``k+1``."""
    if n < 1:
        raise ValueError("path needs at least one edge")
    walls = [f"p{k}" for k in range(n)]
    masks = [(1 << k) - 1 for k in range(n + 1)]
    return make_chart(walls, masks, [weight] * n, [str(k) for k in range(n + 1)])


def gen_grid(dims: Sequence[int], weight=1) -> ComplexChart:
    """Product of paths of the given lengths; vertex ids are coordinate tuples."""
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError("grid dimensions must be positive")
    walls, offset = [], []
    for a, d in enumerate(dims):
        offset.append(len(walls))
        walls += [f"d{a}.{k}" for k in range(d)]
    ids, masks = [], []
    for point in itertools.product(*(range(d + 1) for d in dims)):
        m = 0
        for a, c in enumerate(point):
            m |= ((1 << c) - 1) << offset[a]
        ids.append(",".join(map(str, point)))
        masks.append(m)
    return make_chart(walls, masks, [weight] * len(walls), ids)


# -- Coxeter balls ----------------------------------------------------------------


@dataclass(frozen=True)
class RacgSpec:
    """Defining graph, ball radius and optional weight per generator."""

    generators: tuple
    edges: tuple = ()
    radius: int = 3
    weights: Mapping | None = None

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be at least 1")
        for a, b in self.edges:
            if a == b:
                raise ValueError("defining graph has a loop")

    def group(self) -> RacgGroup:
        return RacgGroup(self.generators, self.edges)


def gen_racg_ball(spec: RacgSpec) -> BallChart:
    """Ball of radius ``R`` around the identity in the Davis complex.

    Vertices are normal forms of length at most ``R``, edges are right
    multiplications by generators and each wall is labelled by its
    reflection.  A vertex lies on the ``+`` side of a wall when the wall
    separates it from the identity.
    """
    G = spec.group()
    lw = None
    if spec.weights is not None:
        lw = tuple(as_weight(spec.weights[s]) for s in G.names)
    words = [()]
    index = {(): 0}
    masks = [0]
    refl: list = []
    refl_index: dict = {}
    wall_type: list = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        word = words[v]
        if len(word) == spec.radius:
            continue
        for s in range(G.rank):
            nxt = G.append(word, s)
            if len(nxt) < len(word) or nxt in index:
                continue
            r = G.reflection(word, s)
            w = refl_index.get(r)
            if w is None:
                w = refl_index[r] = len(refl)
                refl.append(r)
                wall_type.append(s)
            index[nxt] = len(words)
            words.append(nxt)
            masks.append(masks[v] | (1 << w))
            queue.append(index[nxt])
    weights = [1 if lw is None else lw[t] for t in wall_type]
    chart = ComplexChart([G.format(r) for r in refl], weights, [G.format(w) for w in words], masks)
    chart = validate(chart)
    gen_maps = {}
    for s in range(G.rank):
        gen_maps[s] = [index.get(G.prepend(s, w), -1) for w in words]
    wmin = min(weights) if weights else Fraction(1)
    wmax = max(weights) if weights else Fraction(1)
    ball = BallChart(
        chart=chart,
        basepoint=0,
        radius=spec.radius * wmax,
        complete_radius=spec.radius * wmin,
        dimension=G.dimension(),
        group=G,
        words=tuple(words),
        word_index=index,
        reflections=tuple(refl),
        reflection_index=refl_index,
        gen_maps=gen_maps,
        letter_weights=lw,
    )
    ball.generators = {name: LeftMultiplication(ball, (s,), name) for s, name in enumerate(G.names)}
    return ball


def tree_ball(radius: int = 12) -> BallChart:
    """Ball in the Davis complex of the free product of three copies of Z/2."""
    return gen_racg_ball(RacgSpec(("a", "b", "c"), (), radius))


def pentagon_ball(radius: int = 8) -> BallChart:
    """Ball in the Davis complex of the Coxeter group of a 5-cycle."""
    gens = ("a", "b", "c", "d", "e")
    edges = tuple((gens[i], gens[(i + 1) % 5]) for i in range(5))
    return gen_racg_ball(RacgSpec(gens, edges, radius))


def gen_line_ball(radius: int, weight=1) -> BallChart:
    """Integers ``-R..R`` with the shift ``n -> n+1`` and the flip ``n -> 1-n``."""
    weight = as_weight(weight)
    lo, hi = -radius, radius
    walls = [f"h{k}" for k in range(lo, hi)]
    ids = [str(n) for n in range(lo, hi + 1)]
    masks = [(1 << (n - lo)) - 1 for n in range(lo, hi + 1)]
    chart = make_chart(walls, masks, [weight] * len(walls), ids)
    pos = {n: n - lo for n in range(lo, hi + 1)}
    shift = {pos[n]: pos[n + 1] for n in range(lo, hi)}
    flip = {pos[n]: pos[1 - n] for n in range(lo, hi + 1) if 1 - n in pos}
    ball = BallChart(chart, pos[0], radius * weight, radius * weight, 1)
    ball.generators = {
        "shift": AutomorphismChart(chart, shift, "shift"),
        "flip": AutomorphismChart(chart, flip, "flip"),
    }
    return ball


# -- random median charts ------------------------------------------------------------


def median_closure(seeds: Sequence[int], n_walls: int) -> list[int]:
    """Median closure of sign vectors, as the solutions of their 2-clauses.

    A vector lies in the closure exactly when it satisfies every clause on
    at most two coordinates that all seeds satisfy.
    """
    seeds = list(dict.fromkeys(seeds))
    forbid = {}  # (i, a) -> set of (j, b) that may not occur together
    for i, j in itertools.combinations(range(n_walls), 2):
        for a, b in itertools.product((0, 1), repeat=2):
            if not any(((s >> i) & 1) == a and ((s >> j) & 1) == b for s in seeds):
                forbid.setdefault((i, a), set()).add((j, b))
                forbid.setdefault((j, b), set()).add((i, a))
    allowed = [[any(((s >> i) & 1) == a for s in seeds) for a in (0, 1)] for i in range(n_walls)]
    out = []

    def extend(i, mask, chosen):
        if i == n_walls:
            out.append(mask)
            return
        for a in (0, 1):
            if not allowed[i][a]:
                continue
            bad = forbid.get((i, a), ())
            if any((j, b) in bad for j, b in chosen):
                continue
            chosen.append((i, a))
            extend(i + 1, mask | (a << i), chosen)
            chosen.pop()

    extend(0, 0, [])
    return sorted(out)


def closure_chart(seeds: Sequence[int], n_walls: int, prefix: str = "w") -> ComplexChart:
    """Chart on the median closure, with constant and repeated walls removed."""
    verts = median_closure(seeds, n_walls)
    if len(verts) < 2:
        raise DegenerateSample("closure is a single vertex", verts)
    keep, seen = [], set()
    for w in range(n_walls):
        col = tuple((m >> w) & 1 for m in verts)
        if len(set(col)) == 1:
            continue
        key = col if col[0] == 0 else tuple(1 - c for c in col)
        if key in seen:
            continue
        seen.add(key)
        keep.append(w)
    masks = [sum(1 << i for i, w in enumerate(keep) if (m >> w) & 1) for m in verts]
    ids = ["".join("+" if (m >> i) & 1 else "-" for i in range(len(keep))) for m in masks]
    return make_chart([f"{prefix}{w}" for w in keep], masks, None, ids)


def gen_random_median(n_walls: int, n_seeds: int, rng_seed: int = 0) -> ComplexChart:
    """Median closure of random sign vectors; deterministic per seed."""
    if not 1 <= n_walls <= 16:
        raise ValueError("n_walls must be between 1 and 16")
    rng = random.Random(rng_seed)
    seeds = [rng.getrandbits(n_walls) for _ in range(n_seeds)]
    return closure_chart(seeds, n_walls)


def random_suite(count: int = 20, max_walls: int = 12, seed: int = 0) -> list[ComplexChart]:
    """Random median charts with at most ``max_walls`` walls, skipping degenerate samples."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(3, max_walls)
        k = rng.randint(3, 7)
        try:
            c = gen_random_median(n, k, rng.getrandbits(32))
        except DegenerateSample:
            continue
        if c.n_walls <= max_walls:
            out.append(c)
    return out


# -- the branch-point figure ----------------------------------------------------------


@dataclass(frozen=True)
class Fig1:
    left: ComplexChart
    right: ComplexChart
    left_points: dict = field(default_factory=dict)
    right_points: dict = field(default_factory=dict)


def _star() -> tuple[ComplexChart, dict]:
    legs = ("x", "y", "z", "z'")
    walls = [f"{leg}{k}" for leg in legs for k in (1, 2)]
    ids, masks = ["o"], [0]
    for i, leg in enumerate(legs):
        ids += [f"{leg}1", leg]
        masks += [1 << (2 * i), 3 << (2 * i)]
    chart = make_chart(walls, masks, None, ids)
    return chart, {leg: chart.vid(leg) for leg in legs}


def _lattice_chart(points: dict[str, tuple]) -> tuple[ComplexChart, dict]:
    coords = set(points.values())
    changed = True
    while changed:
        changed = False
        for a, b, c in itertools.combinations(sorted(coords), 3):
            m = tuple(sorted(t)[1] for t in zip(a, b, c))
            if m not in coords:
                coords.add(m)
                changed = True
    coords = sorted(coords)
    dim = len(coords[0])
    walls, cuts = [], []
    for a in range(dim):
        vals = sorted({p[a] for p in coords})
        for lo in vals[:-1]:
            walls.append(f"{'XYZ'[a]}{lo}|{lo + 1}")
            cuts.append((a, lo))
    masks = [sum(1 << i for i, (a, lo) in enumerate(cuts) if p[a] > lo) for p in coords]
    ids = ["(" + ",".join(map(str, p)) + ")" for p in coords]
    chart = make_chart(walls, masks, None, ids)
    return chart, {name: coords.index(p) for name, p in points.items()}


def fig1_fixtures() -> Fig1:
    """A tripod-like star and a cube with four pendant segments.

    On the left the four leaves share one branch point.  On the right the
    leaves ``x, y, z, z'`` hang off four corners of a unit cube, chosen so
    every cross ratio vanishes while the medians of ``x, y, z`` and
    ``x, y, z'`` are different cube corners.
    """
    left, lp = _star()
    right, rp = _lattice_chart({
        "x": (0, 2, 1),
        "y": (2, 1, 0),
        "z": (0, 0, -1),
        "z'": (1, -1, 1),
        **{f"c{i}{j}{k}": (i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)},
    })
    rp = {k: v for k, v in rp.items() if not k.startswith("c")}
    return Fig1(left, right, lp, rp)
