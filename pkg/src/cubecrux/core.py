"""Finite charts of CAT(0) cube and cuboid complexes.

A chart is a finite set of vertices, each recorded as its orientation of
every hyperplane (one bit per wall, set for the ``+`` side), together with a
positive rational weight per wall.  Medians are coordinatewise majorities
and distances are weighted counts of separating walls, so almost every
query reduces to bit operations on Python integers.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

#: charts up to this many vertices get the exhaustive all-triples median check
EXHAUSTIVE_LIMIT = 160
#: triples sampled when a chart is too large for the exhaustive check
MEDIAN_SAMPLES = 20000


class ChartError(ValueError):
    """Base class for structured rejections; ``witness`` carries the evidence."""

    code = "chart-error"

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NonSeparatingHyperplane(ChartError):
    code = "non-separating-hyperplane"


class DuplicateWallPartition(ChartError):
    code = "duplicate-wall-partition"


class NotMedianClosed(ChartError):
    code = "not-median-closed"


class DisconnectedChart(ChartError):
    code = "disconnected-chart"


class DistanceMismatch(ChartError):
    code = "distance-mismatch"


class NonPositiveWeight(ChartError):
    code = "non-positive-weight"


class MissingWeight(ChartError):
    code = "missing-weight"


class SameHyperplane(ChartError):
    code = "same-hyperplane"


class EmptyQuotient(ChartError):
    code = "empty-quotient"


class UnknownVertex(ChartError, KeyError):
    code = "unknown-vertex"

    def __str__(self):
        return ValueError.__str__(self)


def as_weight(value) -> Fraction:
    """Exact weight from an int, Fraction, or decimal / ``p/q`` string."""
    if isinstance(value, float):
        raise TypeError("weights must be exact; pass a string or Fraction")
    return Fraction(value)


def iter_bits(mask: int):
    """Indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def majority(a: int, b: int, c: int) -> int:
    return (a & b) | (b & c) | (a & c)


@dataclass(frozen=True, order=True)
class Halfspace:
    """One side of a wall; ``sign`` is +1 or -1."""

    wall: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"halfspace sign must be +1 or -1, got {self.sign!r}")

    @property
    def star(self) -> "Halfspace":
        return Halfspace(self.wall, -self.sign)

    def contains(self, chart: "ComplexChart", v) -> bool:
        return chart.sign(chart.vid(v), self.wall) == self.sign

    def label(self, chart: "ComplexChart") -> str:
        return chart.wall_ids[self.wall] + ("+" if self.sign > 0 else "-")

    @classmethod
    def parse(cls, chart: "ComplexChart", text: str) -> "Halfspace":
        """``"a+"`` or ``"a-"`` names a side of wall ``a``."""
        if not text or text[-1] not in "+-":
            raise ValueError(f"halfspace {text!r} must end in '+' or '-'")
        return cls(chart.wid(text[:-1]), 1 if text[-1] == "+" else -1)


@dataclass(frozen=True)
class Cube:
    """A cube given by the walls it crosses and the signs on every other wall."""

    walls: int
    base: int

    @property
    def dimension(self) -> int:
        return self.walls.bit_count()

    def corners(self) -> list[int]:
        bits = list(iter_bits(self.walls))
        out = []
        for flips in itertools.product((0, 1), repeat=len(bits)):
            m = self.base
            for b, f in zip(bits, flips):
                if f:
                    m |= 1 << b
            out.append(m)
        return out

    def faces(self):
        """All faces, this cube included (3**dim of them)."""
        bits = list(iter_bits(self.walls))
        for choice in itertools.product((0, 1, 2), repeat=len(bits)):
            walls, base = 0, self.base
            for b, c in zip(bits, choice):
                if c == 2:
                    walls |= 1 << b
                elif c == 1:
                    base |= 1 << b
            yield Cube(walls, base)

    def is_face_of(self, other: "Cube") -> bool:
        return (self.walls & ~other.walls) == 0 and (self.base & ~other.walls) == other.base


@dataclass(frozen=True)
class Link:
    """Walls adjacent to ``base`` with the transverse pairs among them."""

    base: int
    elements: frozenset
    edges: frozenset

    def components(self) -> list[frozenset]:
        remaining = set(self.elements)
        adj = {e: set() for e in self.elements}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        out = []
        while remaining:
            start = remaining.pop()
            comp, stack = {start}, [start]
            while stack:
                for nb in adj[stack.pop()]:
                    if nb in remaining:
                        remaining.remove(nb)
                        comp.add(nb)
                        stack.append(nb)
            out.append(frozenset(comp))
        return out

    def is_clique(self, subset) -> bool:
        return all((a, b) in self.edges or (b, a) in self.edges
                   for a, b in itertools.combinations(subset, 2))


class Relation(enum.Enum):
    TRANSVERSE = "transverse"
    SUBSET = "h1<=h2"
    SUPERSET = "h2<=h1"
    DISJOINT = "h1<=h2*"
    COVERING = "h1*<=h2"


class ComplexChart:
    """A finite chart: walls with weights and vertices as sign vectors.

    Vertices are addressed by index throughout the library; ``vid`` also
    accepts the vertex name.  Instances are immutable after construction.
    """

    def __init__(self, wall_ids: Sequence[str], weights: Sequence, vertex_ids: Sequence[str],
                 masks: Sequence[int], validation: str | None = None):
        self.wall_ids = tuple(str(w) for w in wall_ids)
        self.weights = tuple(as_weight(w) for w in weights)
        self.vertex_ids = tuple(str(v) for v in vertex_ids)
        self.masks = tuple(masks)
        if len(self.weights) != len(self.wall_ids):
            raise MissingWeight("weight count differs from wall count")
        if len(self.vertex_ids) != len(self.masks):
            raise ValueError("vertex id count differs from vertex count")
        self.n_walls = len(self.wall_ids)
        self.n_vertices = len(self.masks)
        self.full = (1 << self.n_walls) - 1
        self.all_vertices = (1 << self.n_vertices) - 1
        self.validation = validation
        self._wall_index = {w: i for i, w in enumerate(self.wall_ids)}
        self._vertex_index = {v: i for i, v in enumerate(self.vertex_ids)}
        self._mask_index: dict[int, int] = {}
        for i, m in enumerate(self.masks):
            self._mask_index.setdefault(m, i)
        distinct = set(self.weights)
        self.uniform_weight = self.weights[0] if len(distinct) == 1 else None
        self._transverse_cache: dict[int, frozenset] = {}

    def __repr__(self):
        return f"<ComplexChart {self.n_vertices} vertices, {self.n_walls} walls>"

    @property
    def validated(self) -> bool:
        return self.validation is not None

    # -- addressing ------------------------------------------------------

    def vid(self, v) -> int:
        if isinstance(v, str):
            try:
                return self._vertex_index[v]
            except KeyError:
                raise UnknownVertex(f"unknown vertex {v!r}", v) from None
        if not 0 <= v < self.n_vertices:
            raise UnknownVertex(f"vertex index {v} out of range", v)
        return v

    def wid(self, w) -> int:
        if isinstance(w, str):
            try:
                return self._wall_index[w]
            except KeyError:
                raise KeyError(f"unknown wall {w!r}") from None
        if not 0 <= w < self.n_walls:
            raise KeyError(f"wall index {w} out of range")
        return w

    def lookup(self, mask: int) -> int | None:
        """Index of the vertex with the given sign mask, if present."""
        return self._mask_index.get(mask)

    def sign(self, v: int, w: int) -> int:
        return 1 if (self.masks[v] >> w) & 1 else -1

    def signs(self, v: int) -> dict[str, str]:
        m = self.masks[v]
        return {w: "+" if (m >> i) & 1 else "-" for i, w in enumerate(self.wall_ids)}

    # -- metric ------------------------------------------------------------

    def weight_of(self, walls: int) -> Fraction:
        """Total weight of a set of walls given as a bitmask."""
        if self.uniform_weight is not None:
            return self.uniform_weight * walls.bit_count()
        return sum((self.weights[i] for i in iter_bits(walls)), Fraction(0))

    def distance(self, x: int, y: int) -> Fraction:
        return self.weight_of(self.masks[x] ^ self.masks[y])

    def hops(self, x: int, y: int) -> int:
        return (self.masks[x] ^ self.masks[y]).bit_count()

    # -- combinatorics -------------------------------------------------------

    @cached_property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Edges ``(x, y, wall)``, each once, found by flipping one bit toward vertex 0."""
        if not self.masks:
            return ()
        base = self.masks[0]
        out = []
        for y, my in enumerate(self.masks):
            for b in iter_bits(my ^ base):
                x = self._mask_index.get(my ^ (1 << b))
                if x is not None:
                    out.append((x, y, b))
        return tuple(out)

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the pairs ``(neighbor, wall)``."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for x, y, w in self.edges:
            adj[x].append((y, w))
            adj[y].append((x, w))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def carriers(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per wall, the edges ``(x, y)`` crossing it."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_walls)]
        for x, y, w in self.edges:
            out[w].append((x, y))
        return tuple(tuple(e) for e in out)

    def adjacent_walls(self, v: int) -> int:
        """Bitmask of the walls adjacent to ``v``."""
        out = 0
        for _, w in self.neighbors[v]:
            out |= 1 << w
        return out

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Per wall, the bitset of vertex indices on its ``+`` side."""
        cols = [0] * self.n_walls
        for v, m in enumerate(self.masks):
            bit = 1 << v
            for w in iter_bits(m):
                cols[w] |= bit
        return tuple(cols)

    def side(self, h: Halfspace) -> int:
        """Vertex bitset of a halfspace."""
        col = self.columns[h.wall]
        return col if h.sign > 0 else self.all_vertices ^ col

    def side_vertices(self, h: Halfspace) -> list[int]:
        return list(iter_bits(self.side(h)))

    def transverse(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a, b = self.columns[i], self.columns[j]
        na, nb = self.all_vertices ^ a, self.all_vertices ^ b
        return bool(a & b and a & nb and na & b and na & nb)

    def transverse_walls(self, w: int) -> frozenset:
        """Walls crossing ``w``, found by scanning squares along its carrier."""
        cached = self._transverse_cache.get(w)
        if cached is not None:
            return cached
        bit = 1 << w
        found = set()
        for x, y in self.carriers[w]:
            for v in (x, y):
                mv = self.masks[v]
                for u, f in self.neighbors[v]:
                    if f != w and f not in found and (mv ^ bit ^ (1 << f)) in self._mask_index:
                        found.add(f)
        out = frozenset(found)
        self._transverse_cache[w] = out
        return out

    def link(self, v: int) -> Link:
        v = self.vid(v)
        mv = self.masks[v]
        elements = [w for _, w in self.neighbors[v]]
        edges = set()
        for a, b in itertools.combinations(sorted(elements), 2):
            if (mv ^ (1 << a) ^ (1 << b)) in self._mask_index:
                edges.add((a, b))
        return Link(v, frozenset(elements), frozenset(edges))

    @cached_property
    def dimension(self) -> int:
        best = 0
        for v in range(self.n_vertices):
            lk = self.link(v)
            if len(lk.elements) <= best:
                continue
            best = max(best, _max_clique(lk))
        return best

    def vertex_bits(self, vertices: Iterable[int]) -> int:
        out = 0
        for v in vertices:
            out |= 1 << self.vid(v)
        return out


def _max_clique(lk: Link) -> int:
    if not lk.elements:
        return 0
    adj = {e: set() for e in lk.elements}
    for a, b in lk.edges:
        adj[a].add(b)
        adj[b].add(a)
    best = 1

    def grow(size, candidates):
        nonlocal best
        best = max(best, size)
        if size + len(candidates) <= best:
            return
        for c in sorted(candidates):
            grow(size + 1, candidates & adj[c])
            candidates = candidates - {c}

    grow(0, set(lk.elements))
    return best


# -- construction and validation ------------------------------------------------


def _parse_vertex(spec, walls: Sequence[str], wall_index: Mapping[str, int]) -> int:
    if isinstance(spec, int):
        return spec
    if isinstance(spec, Mapping):
        mask = 0
        missing = set(walls) - set(spec)
        if missing:
            raise ChartError(f"vertex is missing signs for walls {sorted(missing)}", spec)
        for w, s in spec.items():
            if s in ("+", 1, "1"):
                mask |= 1 << wall_index[w]
            elif s not in ("-", -1, "0"):
                raise ChartError(f"bad sign {s!r} for wall {w!r}", spec)
        return mask
    text = str(spec)
    if len(text) != len(walls):
        raise ChartError(f"sign string {text!r} does not match {len(walls)} walls", spec)
    mask = 0
    for i, ch in enumerate(text):
        if ch in "+1":
            mask |= 1 << i
        elif ch not in "-0":
            raise ChartError(f"bad sign character {ch!r} in {text!r}", spec)
    return mask


def make_chart(walls: Sequence[str], vertices: Sequence, weights=None, vertex_ids=None,
               check: bool = True, **validate_options) -> ComplexChart:
    """Build a chart from sign vectors and validate it.

    ``vertices`` may hold sign strings (``"+-+"`` or ``"101"``, one character
    per wall in order), ``{wall: sign}`` dicts, or raw bitmasks.  ``weights``
    is a mapping or sequence; omitted weights default to 1.
    """
    walls = [str(w) for w in walls]
    if len(set(walls)) != len(walls):
        raise ChartError("duplicate wall ids", walls)
    index = {w: i for i, w in enumerate(walls)}
    masks = [_parse_vertex(v, walls, index) for v in vertices]
    if vertex_ids is None:
        vertex_ids = [f"v{i}" for i in range(len(masks))]
    if weights is None:
        w = [Fraction(1)] * len(walls)
    elif isinstance(weights, Mapping):
        missing = [x for x in walls if x not in weights]
        if missing:
            raise MissingWeight(f"no weight for walls {missing}", missing)
        w = [as_weight(weights[x]) for x in walls]
    else:
        w = [as_weight(x) for x in weights]
    chart = ComplexChart(walls, w, vertex_ids, masks)
    return validate(chart, **validate_options) if check else chart


def validate(chart: ComplexChart, *, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
             samples: int = MEDIAN_SAMPLES, seed: int = 0) -> ComplexChart:
    """Check the chart invariants and return a validated, deduplicated copy.

    Median-closure is checked on all triples up to ``exhaustive_limit``
    vertices and on ``samples`` seeded random triples beyond that; the mode
    used is recorded in ``validation``.
    """
    for w, weight in zip(chart.wall_ids, chart.weights):
        if weight <= 0:
            raise NonPositiveWeight(f"wall {w!r} has non-positive weight {weight}", w)
    seen: dict[int, int] = {}
    ids, masks = [], []
    for vid, m in zip(chart.vertex_ids, chart.masks):
        if m not in seen:
            seen[m] = len(masks)
            ids.append(vid)
            masks.append(m)
    if len(set(ids)) != len(ids):
        raise ChartError("duplicate vertex ids", ids)
    if not masks:
        raise ChartError("chart has no vertices")
    out = ComplexChart(chart.wall_ids, chart.weights, ids, masks)
    n = out.n_vertices

    union, inter = 0, out.full
    for m in masks:
        union |= m
        inter &= m
    for w in range(out.n_walls):
        if not (union >> w) & 1 or (inter >> w) & 1:
            raise NonSeparatingHyperplane(f"wall {out.wall_ids[w]!r} does not separate", out.wall_ids[w])

    partitions: dict[int, int] = {}
    for w, col in enumerate(out.columns):
        key = col if not col & 1 else out.all_vertices ^ col
        if key in partitions:
            other = partitions[key]
            raise DuplicateWallPartition(
                f"walls {out.wall_ids[other]!r} and {out.wall_ids[w]!r} induce the same bipartition",
                (out.wall_ids[other], out.wall_ids[w]))
        partitions[key] = w

    index = out._mask_index
    if n <= exhaustive_limit:
        mode = "exhaustive"
        for i, j, k in itertools.combinations(range(n), 3):
            m = majority(masks[i], masks[j], masks[k])
            if m not in index:
                raise NotMedianClosed(
                    f"median of {ids[i]}, {ids[j]}, {ids[k]} is not a vertex",
                    ((ids[i], ids[j], ids[k]), m))
        sources = range(n)
    else:
        mode = "sampled"
        rng = random.Random(seed)
        for _ in range(samples):
            i, j, k = rng.randrange(n), rng.randrange(n), rng.randrange(n)
            m = majority(masks[i], masks[j], masks[k])
            if m not in index:
                raise NotMedianClosed(
                    f"median of {ids[i]}, {ids[j]}, {ids[k]} is not a vertex",
                    ((ids[i], ids[j], ids[k]), m))
        sources = [0] + [rng.randrange(n) for _ in range(3)]

    for s in sources:
        hop = _bfs_hops(out, s)
        if len(hop) != n:
            missing = next(v for v in range(n) if v not in hop)
            raise DisconnectedChart(f"vertex {ids[missing]!r} unreachable from {ids[s]!r}",
                                    (ids[s], ids[missing]))
        ms = masks[s]
        for v, h in hop.items():
            if h != (ms ^ masks[v]).bit_count():
                raise DistanceMismatch(
                    f"graph distance {h} between {ids[s]!r} and {ids[v]!r} differs from wall count",
                    (ids[s], ids[v]))
    out.validation = mode
    return out


def _bfs_hops(chart: ComplexChart, source: int) -> dict[int, int]:
    dist = {source: 0}
    frontier = [source]
    nbrs = chart.neighbors
    while frontier:
        nxt = []
        for v in frontier:
            d = dist[v] + 1
            for u, _ in nbrs[v]:
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


# -- queries -----------------------------------------------------------------


def distance(chart: ComplexChart, x, y) -> Fraction:
    return chart.distance(chart.vid(x), chart.vid(y))


def separating_walls(chart: ComplexChart, A: Iterable, B: Iterable) -> set[Halfspace]:
    """Halfspaces containing all of ``B`` whose complement contains all of ``A``."""
    A = [chart.vid(a) for a in A]
    B = [chart.vid(b) for b in B]
    if not A or not B:
        raise ValueError("separating_walls needs nonempty vertex sets")
    plus_a, minus_a = _unanimous(chart, A)
    plus_b, minus_b = _unanimous(chart, B)
    out = {Halfspace(w, 1) for w in iter_bits(minus_a & plus_b)}
    out |= {Halfspace(w, -1) for w in iter_bits(plus_a & minus_b)}
    return out


def _unanimous(chart: ComplexChart, vertices: Sequence[int]) -> tuple[int, int]:
    """Walls on which every listed vertex is ``+`` and walls on which every one is ``-``."""
    plus, minus = chart.full, chart.full
    for v in vertices:
        m = chart.masks[v]
        plus &= m
        minus &= ~m
    return plus, minus & chart.full


def wall_set_between(chart: ComplexChart, A: Iterable, B: Iterable) -> int:
    """Bitmask of the walls separating ``A`` from ``B``."""
    out = 0
    for h in separating_walls(chart, A, B):
        out |= 1 << h.wall
    return out


def pocset_relation(chart: ComplexChart, h1: Halfspace, h2: Halfspace) -> Relation:
    """Nesting or transversality of two halfspaces, read off the inhabited sign cells."""
    if h1.wall == h2.wall:
        raise SameHyperplane("halfspaces share a hyperplane", (h1, h2))
    a, b = chart.side(h1), chart.side(h2)
    na, nb = chart.all_vertices ^ a, chart.all_vertices ^ b
    if not a & nb:
        return Relation.SUBSET
    if not na & b:
        return Relation.SUPERSET
    if not a & b:
        return Relation.DISJOINT
    if not na & nb:
        return Relation.COVERING
    return Relation.TRANSVERSE


pocset_relations = pocset_relation


def facing_triple(chart: ComplexChart, w1, w2, w3) -> bool:
    """Whether sides of the three walls can be chosen pairwise disjoint."""
    walls = [chart.wid(w) for w in (w1, w2, w3)]
    if len(set(walls)) != 3:
        raise SameHyperplane("facing_triple needs three distinct walls", walls)
    for signs in itertools.product((1, -1), repeat=3):
        sides = [chart.side(Halfspace(w, s)) for w, s in zip(walls, signs)]
        if all(not (p & q) for p, q in itertools.combinations(sides, 2)):
            return True
    return False


def cubes(chart: ComplexChart) -> set[Cube]:
    """Every cube of the chart, vertices included.

    A clique of the link spans a cube only when all of its corners are
    vertices; this is checked rather than assumed.
    """
    out = set()
    masks = chart.masks
    index = chart._mask_index
    for v in range(chart.n_vertices):
        lk = chart.link(v)
        adj = {e: set() for e in lk.elements}
        for a, b in lk.edges:
            adj[a].add(b)
            adj[b].add(a)
        mv = masks[v]

        def grow(walls: int, candidates: set):
            cube = Cube(walls, mv & ~walls)
            if all(c in index for c in cube.corners()):
                out.add(cube)
            else:
                return
            for c in sorted(candidates):
                grow(walls | (1 << c), candidates & adj[c] & {x for x in candidates if x > c})

        grow(0, set(lk.elements))
    return out


def maximal_cubes(chart: ComplexChart, all_cubes: set[Cube] | None = None) -> set[Cube]:
    all_cubes = cubes(chart) if all_cubes is None else all_cubes
    covered = set()
    for c in all_cubes:
        for f in c.faces():
            if f != c:
                covered.add(f)
    return all_cubes - covered


def free_faces(chart: ComplexChart, boundary: Iterable | None = None) -> list[Cube]:
    """Non-maximal cubes lying in exactly one maximal cube.

    With ``boundary`` given, cubes with a corner in that vertex set are
    dropped; finite charts of infinite complexes always have free faces
    along their edge.
    """
    all_cubes = cubes(chart)
    maximal = maximal_cubes(chart, all_cubes)
    count: dict[Cube, int] = {}
    for m in maximal:
        for f in m.faces():
            if f != m:
                count[f] = count.get(f, 0) + 1
    found = [c for c, k in count.items() if k == 1 and c not in maximal]
    if boundary is not None:
        bmasks = {chart.masks[chart.vid(b)] for b in boundary}
        found = [c for c in found if not any(x in bmasks for x in c.corners())]
    return sorted(found, key=lambda c: (c.dimension, c.walls, c.base))


def cube_label(chart: ComplexChart, cube: Cube) -> str:
    base = chart.vertex_ids[chart.lookup(cube.base)]
    if not cube.walls:
        return base
    return base + "*" + ",".join(chart.wall_ids[w] for w in iter_bits(cube.walls))


def irreducible_components(chart: ComplexChart) -> list[frozenset]:
    """Connected components of the non-transversality graph on walls."""
    parent = list(range(chart.n_walls))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in itertools.combinations(range(chart.n_walls), 2):
        if not chart.transverse(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict[int, set] = {}
    for w in range(chart.n_walls):
        groups.setdefault(find(w), set()).add(w)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def sector_heavy_defects(chart: ComplexChart, max_size: int | None = None) -> list[tuple[Halfspace, ...]]:
    """Pairwise-transverse halfspace families whose sector contains no halfspace.

    Families of size 2 up to ``max_size`` (default: the chart dimension) are
    examined.  An empty result means the chart is sector-heavy.
    """
    max_size = chart.dimension if max_size is None else max_size
    halfspace_sides = []
    for w in range(chart.n_walls):
        for s in (1, -1):
            halfspace_sides.append(chart.side(Halfspace(w, s)))
    trans = {w: {u for u in range(chart.n_walls) if chart.transverse(w, u)} for w in range(chart.n_walls)}
    defects = []

    def families(prefix, candidates):
        if len(prefix) >= 2:
            yield tuple(prefix)
        if len(prefix) == max_size:
            return
        for c in sorted(candidates):
            yield from families(prefix + [c], {x for x in candidates & trans[c] if x > c})

    for walls in families([], set(range(chart.n_walls))):
        for signs in itertools.product((1, -1), repeat=len(walls)):
            family = tuple(Halfspace(w, s) for w, s in zip(walls, signs))
            sector = chart.all_vertices
            for h in family:
                sector &= chart.side(h)
            if not any(hs & ~sector == 0 for hs in halfspace_sides):
                defects.append(family)
    return defects


def restriction_quotient(chart: ComplexChart, keep: Iterable, *, with_projection: bool = False):
    """Collapse every wall outside ``keep``; vertices are projected and deduplicated."""
    keep = sorted({chart.wid(w) for w in keep})
    if not keep:
        raise EmptyQuotient("restriction quotient needs at least one wall")
    new_index: dict[int, int] = {}
    ids, masks, proj = [], [], []
    for vid, m in zip(chart.vertex_ids, chart.masks):
        q = 0
        for i, w in enumerate(keep):
            if (m >> w) & 1:
                q |= 1 << i
        if q not in new_index:
            new_index[q] = len(masks)
            ids.append(vid)
            masks.append(q)
        proj.append(new_index[q])
    raw = ComplexChart([chart.wall_ids[w] for w in keep], [chart.weights[w] for w in keep], ids, masks)
    out = validate(raw)
    if with_projection:
        return out, tuple(proj)
    return out


def product(a: ComplexChart, b: ComplexChart, tags: tuple[str, str] = ("L", "R")) -> ComplexChart:
    """Cartesian product; walls are the disjoint union, tagged by factor."""
    shift = a.n_walls
    walls = [f"{tags[0]}.{w}" for w in a.wall_ids] + [f"{tags[1]}.{w}" for w in b.wall_ids]
    weights = list(a.weights) + list(b.weights)
    ids, masks = [], []
    for va, ma in zip(a.vertex_ids, a.masks):
        for vb, mb in zip(b.vertex_ids, b.masks):
            ids.append(f"({va},{vb})")
            masks.append(ma | (mb << shift))
    out = ComplexChart(walls, weights, ids, masks)
    if a.validated and b.validated:
        # products of valid charts are valid; keep the cheaper factor check
        out.validation = "product"
        return out
    return validate(out)


def product_vertex(a: ComplexChart, b: ComplexChart, prod: ComplexChart, x: int, y: int) -> int:
    return x * b.n_vertices + y


def reweight(chart: ComplexChart, table: Mapping) -> ComplexChart:
    """Same combinatorics with a new weight per wall (keys are wall ids)."""
    missing = [w for w in chart.wall_ids if w not in table]
    if missing:
        raise MissingWeight(f"no weight for walls {missing}", missing)
    weights = [as_weight(table[w]) for w in chart.wall_ids]
    for w, x in zip(chart.wall_ids, weights):
        if x <= 0:
            raise NonPositiveWeight(f"wall {w!r} has non-positive weight {x}", w)
    out = ComplexChart(chart.wall_ids, weights, chart.vertex_ids, chart.masks, chart.validation)
    return out


def scale(chart: ComplexChart, factor) -> ComplexChart:
    factor = as_weight(factor)
    return reweight(chart, {w: x * factor for w, x in zip(chart.wall_ids, chart.weights)})


@dataclass(frozen=True)
class Subdivision:
    """Cubical subdivision together with the inclusion of the old vertices."""

    source: ComplexChart
    chart: ComplexChart
    cubes: tuple[Cube, ...]
    inclusion: tuple[int, ...]
    halved: bool

    def lift(self, auto):
        from .actions import lift_to_subdivision
        return lift_to_subdivision(self, auto)


def _spread(mask: int) -> int:
    out = 0
    for b in iter_bits(mask):
        out |= 1 << (2 * b)
    return out


def subdivide(chart: ComplexChart, *, halve: bool = False) -> Subdivision:
    """First cubical subdivision.

    Each wall ``w`` becomes two parallel walls ``w:-`` and ``w:+``; a cube
    lies on the ``+`` side of ``w:-`` unless it sits entirely on the ``-``
    side of ``w``, and on the ``+`` side of ``w:+`` only when it sits
    entirely on the ``+`` side.  New walls keep the old weight, so distances
    between old vertices double, unless ``halve`` is set.
    """
    all_cubes = sorted(cubes(chart), key=lambda c: (c.dimension, chart.lookup(c.base), c.walls))
    walls, weights = [], []
    for w, x in zip(chart.wall_ids, chart.weights):
        y = x / 2 if halve else x
        walls += [f"{w}:-", f"{w}:+"]
        weights += [y, y]
    ids, masks = [], []
    inclusion = [0] * chart.n_vertices
    for c in all_cubes:
        masks.append(_spread(c.walls | c.base) | (_spread(c.base) << 1))
        ids.append(cube_label(chart, c))
        if not c.walls:
            inclusion[chart.lookup(c.base)] = len(masks) - 1
    new = ComplexChart(walls, weights, ids, masks)
    new = validate(new) if new.n_vertices <= EXHAUSTIVE_LIMIT else _trust(new, "subdivision")
    return Subdivision(chart, new, tuple(all_cubes), tuple(inclusion), halve)


def _trust(chart: ComplexChart, how: str) -> ComplexChart:
    chart.validation = how
    return chart
