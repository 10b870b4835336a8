"""Medians, intervals, convex hulls, gates and bridges."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    ChartError,
    ComplexChart,
    Halfspace,
    NotMedianClosed,
    iter_bits,
    majority,
    restriction_quotient,
    validate,
)


class NotConvex(ChartError):
    code = "not-convex"


class NotDisjoint(ChartError):
    code = "not-disjoint"


class EmptySet(ChartError):
    code = "empty-set"


@dataclass(frozen=True)
class ConvexSet:
    """A convex vertex set, recorded by the walls on which it is unanimous.

    ``fixed`` is the bitmask of walls not crossing the set and ``values`` the
    common signs on those walls; membership is ``mask & fixed == values``.
    """

    chart: ComplexChart
    fixed: int
    values: int
    members: frozenset

    @classmethod
    def from_constraints(cls, chart: ComplexChart, fixed: int, values: int) -> "ConvexSet":
        members = [v for v, m in enumerate(chart.masks) if m & fixed == values]
        if not members:
            raise EmptySet("no chart vertex satisfies the constraints")
        # record every wall the members agree on, not only the given ones
        plus, minus = chart.full, chart.full
        for v in members:
            m = chart.masks[v]
            plus &= m
            minus &= ~m
        return cls(chart, plus | (minus & chart.full), plus, frozenset(members))

    @property
    def walls(self) -> int:
        """Walls crossing the set."""
        return self.chart.full & ~self.fixed

    def __contains__(self, v) -> bool:
        return self.chart.masks[self.chart.vid(v)] & self.fixed == self.values

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def halfspaces(self) -> list[Halfspace]:
        """The halfspaces containing the set; their intersection is the set."""
        return [Halfspace(w, 1 if (self.values >> w) & 1 else -1) for w in iter_bits(self.fixed)]

    def ids(self) -> list[str]:
        return [self.chart.vertex_ids[v] for v in sorted(self.members)]


def median(chart: ComplexChart, x, y, z) -> int:
    x, y, z = chart.vid(x), chart.vid(y), chart.vid(z)
    m = majority(chart.masks[x], chart.masks[y], chart.masks[z])
    v = chart.lookup(m)
    if v is None:
        raise NotMedianClosed("median is not a chart vertex", (x, y, z))
    return v


def interval(chart: ComplexChart, x, y) -> ConvexSet:
    """Vertices on a geodesic from ``x`` to ``y``."""
    mx, my = chart.masks[chart.vid(x)], chart.masks[chart.vid(y)]
    fixed = chart.full & ~(mx ^ my)
    return ConvexSet.from_constraints(chart, fixed, mx & fixed)


def hull(chart: ComplexChart, A: Iterable) -> ConvexSet:
    """Smallest convex set containing ``A``."""
    A = [chart.vid(a) for a in A]
    if not A:
        raise EmptySet("hull of the empty set")
    plus, minus = chart.full, chart.full
    for a in A:
        m = chart.masks[a]
        plus &= m
        minus &= ~m
    fixed = plus | (minus & chart.full)
    return ConvexSet.from_constraints(chart, fixed, plus)


def halfspace_set(chart: ComplexChart, h: Halfspace) -> ConvexSet:
    bit = 1 << h.wall
    return ConvexSet.from_constraints(chart, bit, bit if h.sign > 0 else 0)


def is_convex(chart: ComplexChart, A: Iterable) -> bool:
    A = {chart.vid(a) for a in A}
    return bool(A) and hull(chart, A).members == A


def convex_set(chart: ComplexChart, A: Iterable) -> ConvexSet:
    A = {chart.vid(a) for a in A}
    h = hull(chart, A)
    if h.members != A:
        extra = sorted(h.members - A)
        raise NotConvex("vertex set is not convex", [chart.vertex_ids[v] for v in extra[:5]])
    return h


def gate(C: ConvexSet, x) -> int:
    """Nearest point projection of ``x`` onto ``C``.

    The gate keeps the signs of ``x`` on walls crossing ``C`` and takes the
    common sign of ``C`` elsewhere, so the walls separating ``x`` from its
    gate are exactly the walls separating ``x`` from ``C``.
    """
    chart = C.chart
    m = (chart.masks[chart.vid(x)] & ~C.fixed) | C.values
    v = chart.lookup(m)
    if v is None:
        raise NotMedianClosed("gate is not a chart vertex", x)
    return v


def separation(C1: ConvexSet, C2: ConvexSet) -> int:
    """Walls with ``C1`` and ``C2`` on opposite sides."""
    return C1.fixed & C2.fixed & (C1.values ^ C2.values)


def set_distance(C1: ConvexSet, C2: ConvexSet) -> Fraction:
    """Minimum distance between the sets, by exhaustive search."""
    chart = C1.chart
    return min(chart.distance(a, b) for a in C1.members for b in C2.members)


@dataclass(frozen=True)
class Bridge:
    """Bridge between two convex sets and its product decomposition.

    ``shore1`` and ``shore2`` are the gate images of each set in the other;
    ``hull`` is the bridge itself.  ``product_map`` sends a bridge vertex to
    its pair (vertex of ``shore_chart``, vertex of ``interval``).
    """

    C1: ConvexSet
    C2: ConvexSet
    shore1: frozenset
    shore2: frozenset
    shore_chart: ComplexChart
    interval: ConvexSet
    hull: ConvexSet
    gate_pair: tuple[int, int]
    distance: Fraction
    separating: int
    common: int
    product_map: dict

    @property
    def shore_is_point(self) -> bool:
        return len(self.shore1) == 1


def _point_chart(label: str) -> ComplexChart:
    return validate(ComplexChart([], [], [label], [0]))


def bridge_decomposition(C1: ConvexSet, C2: ConvexSet, *, pair_limit: int = 400, seed: int = 0) -> Bridge:
    """Decompose the bridge between two convex sets as shore times interval.

    Every claimed property is checked: gate pairs realise the set distance,
    shores are gate images of each other, the bridge meets each set in its
    shore, its walls split into common walls and separating walls, and the
    product map is a bijective isometry (all pairs up to ``pair_limit``
    bridge vertices, sampled pairs beyond).
    """
    chart = C1.chart
    sep = separation(C1, C2)
    common = C1.walls & C2.walls
    shore1 = frozenset(gate(C1, y) for y in C2.members)
    shore2 = frozenset(gate(C2, x) for x in C1.members)
    dist = set_distance(C1, C2)
    if dist != chart.weight_of(sep):
        raise AssertionError("set distance differs from weight of separating walls")
    x1 = min(shore1)
    x2 = gate(C2, x1)
    if gate(C1, x2) != x1 or chart.distance(x1, x2) != dist:
        raise AssertionError("gate pair does not realise the set distance")
    for a in shore1:
        b = gate(C2, a)
        if b not in shore2 or gate(C1, b) != a:
            raise AssertionError("shores are not gate images of each other")
    B = hull(chart, shore1 | shore2)
    if B.members & C1.members != shore1 or B.members & C2.members != shore2:
        raise AssertionError("bridge meets a set outside its shore")
    if B.walls != common | sep or common & sep:
        raise AssertionError("bridge walls do not split into common and separating walls")
    I = interval(chart, x1, x2)
    if common:
        S, proj = restriction_quotient(chart, sorted(iter_bits(common)), with_projection=True)
    else:
        S, proj = _point_chart(chart.vertex_ids[x1]), (0,) * chart.n_vertices
    pmap = {b: (proj[b], gate(I, b)) for b in B.members}
    if len(set(pmap.values())) != len(B) or len(B) != len(shore1) * len(I):
        raise AssertionError("bridge is not in bijection with shore times interval")
    if len({proj[a] for a in shore1}) != S.n_vertices:
        raise AssertionError("shore does not project onto the quotient")
    members = sorted(B.members)
    if len(members) <= pair_limit:
        pairs = itertools.combinations(members, 2)
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(members), rng.choice(members)) for _ in range(pair_limit * 20)]
    for a, b in pairs:
        (sa, ia), (sb, ib) = pmap[a], pmap[b]
        if chart.distance(a, b) != S.distance(sa, sb) + chart.distance(ia, ib):
            raise AssertionError("product map is not an isometry")
    return Bridge(C1, C2, shore1, shore2, S, I, B, (x1, x2), dist, sep, common, pmap)


def strongly_separated(chart: ComplexChart, h1: Halfspace, h2: Halfspace, *, verify: bool = False) -> bool:
    """Disjoint halfspaces with no wall transverse to both.

    With ``verify`` the answer is cross-checked against the bridge between
    the two halfspaces, whose shore is a single vertex exactly when they are
    strongly separated.
    """
    a, b = chart.side(h1), chart.side(h2)
    if a & b:
        raise NotDisjoint("halfspaces intersect", (h1, h2))
    answer = not (chart.transverse_walls(h1.wall) & chart.transverse_walls(h2.wall))
    if verify:
        br = bridge_decomposition(halfspace_set(chart, h1), halfspace_set(chart, h2))
        if br.shore_is_point != answer:
            raise AssertionError("strong separation disagrees with bridge shore")
    return answer
