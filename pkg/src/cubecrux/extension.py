"""Extending a distance-preserving bijection between vertex sets to an isomorphism.

Halfspaces adjacent to a vertex ``v`` of ``A`` are recognised by their
traces on ``A``; a distance-preserving ``phi`` matches traces at ``v`` with
traces at ``phi(v)``, which says where each edge at ``v`` must go.  One step
extends ``phi`` to the 1-neighbourhood of ``A``; iterating covers the chart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import ChartError, ComplexChart, Halfspace, iter_bits


class ExtensionError(ChartError):
    code = "extension-error"


class NoMatch(ExtensionError):
    code = "no-match"


class AmbiguousMatch(ExtensionError):
    code = "ambiguous-match"


class InconsistentExtension(ExtensionError):
    code = "inconsistent-extension"


class DistanceViolation(ExtensionError):
    code = "distance-violation"


class Stalled(ExtensionError):
    code = "stalled"


class BoundExceeded(ExtensionError):
    code = "bound-exceeded"


@dataclass(frozen=True)
class PartialIsometry:
    """A bijection ``phi: A -> B`` between vertex sets of two charts, checked to preserve distances."""

    X: ComplexChart
    Y: ComplexChart
    phi: Mapping

    def __post_init__(self):
        phi = {self.X.vid(a): self.Y.vid(b) for a, b in dict(self.phi).items()}
        object.__setattr__(self, "phi", phi)
        if len(set(phi.values())) != len(phi):
            raise DistanceViolation("map is not injective", None)
        for a, b in itertools.combinations(phi, 2):
            if self.X.distance(a, b) != self.Y.distance(phi[a], phi[b]):
                raise DistanceViolation(
                    f"d({self.X.vertex_ids[a]}, {self.X.vertex_ids[b]}) is not preserved",
                    (self.X.vertex_ids[a], self.X.vertex_ids[b]))

    @property
    def A(self) -> frozenset:
        return frozenset(self.phi)

    @property
    def B(self) -> frozenset:
        return frozenset(self.phi.values())

    @property
    def total(self) -> bool:
        return len(self.phi) == self.X.n_vertices

    def inverse(self) -> "PartialIsometry":
        return PartialIsometry(self.Y, self.X, {b: a for a, b in self.phi.items()})

    def ids(self) -> dict[str, str]:
        return {self.X.vertex_ids[a]: self.Y.vertex_ids[b] for a, b in sorted(self.phi.items())}


@dataclass(frozen=True)
class HSet:
    """Trace on ``A`` of the side of ``wall`` away from ``base``.

    ``witness`` is a member whose only wall at ``base`` separating it from
    ``base`` is ``wall``, or None when no member has that property.
    """

    base: int
    wall: int
    members: frozenset
    witness: int | None

    @property
    def has_witness(self) -> bool:
        return self.witness is not None


def _pi(chart: ComplexChart, v: int, x: int) -> int:
    """Walls adjacent to ``v`` separating ``v`` from ``x``."""
    return chart.adjacent_walls(v) & (chart.masks[v] ^ chart.masks[x])


def _star_condition(chart: ComplexChart, A, v: int, H: frozenset) -> bool:
    """Whether ``H`` satisfies: x in H iff every y in H has d(x, y) < d(x, v) + d(v, y)."""
    d = chart.distance
    for x in A:
        inside = all(d(x, y) < d(x, v) + d(v, y) for y in H)
        if inside != (x in H):
            return False
    return True


def _h_sets(chart: ComplexChart, A, v: int, check: bool = True) -> list[HSet]:
    out = []
    m = chart.masks
    for w in iter_bits(chart.adjacent_walls(v)):
        side = ((m[v] >> w) & 1) ^ 1
        members = frozenset(a for a in A if (m[a] >> w) & 1 == side)
        witness = next((a for a in sorted(members) if _pi(chart, v, a) == 1 << w), None)
        if check and witness is not None and not _star_condition(chart, A, v, members):
            raise AssertionError(f"trace of wall {chart.wall_ids[w]} at {chart.vertex_ids[v]} fails the "
                                 "characterising condition despite a witness")
        out.append(HSet(v, w, members, witness))
    return out


def h_sets(partial: PartialIsometry, v) -> list[HSet]:
    """One trace per wall adjacent to ``v``; witnesses are found, not assumed.

    Every trace with a witness is verified against the characterising
    condition; traces without one are returned flagged.
    """
    v = partial.X.vid(v)
    if v not in partial.phi:
        raise ValueError("vertex is not in the domain")
    return _h_sets(partial.X, partial.A, v)


def push_halfspace(partial: PartialIsometry, v, wall) -> Halfspace:
    """The halfspace of ``Y`` at ``phi(v)`` whose trace on ``B`` is ``phi`` of the trace of ``wall``.

    The returned side is the one away from ``phi(v)``.
    """
    X, Y = partial.X, partial.Y
    v = X.vid(v)
    w = X.wid(wall) if not isinstance(wall, int) else wall
    mine = next((h for h in _h_sets(X, partial.A, v) if h.wall == w), None)
    if mine is None:
        raise ValueError(f"wall {X.wall_ids[w]} is not adjacent to {X.vertex_ids[v]}")
    if mine.witness is None:
        raise NoMatch(f"trace of {X.wall_ids[w]} at {X.vertex_ids[v]} has no witness", (X.vertex_ids[v], X.wall_ids[w]))
    pv = partial.phi[v]
    image = frozenset(partial.phi[a] for a in mine.members)
    matches = [h for h in _h_sets(Y, partial.B, pv) if h.members == image]
    if not matches:
        raise NoMatch(f"no wall at {Y.vertex_ids[pv]} has the image trace of {X.wall_ids[w]}",
                      (X.vertex_ids[v], X.wall_ids[w]))
    if len(matches) > 1:
        raise AmbiguousMatch(f"several walls at {Y.vertex_ids[pv]} match {X.wall_ids[w]}",
                             [Y.wall_ids[h.wall] for h in matches])
    h = matches[0]
    if h.witness is None:
        raise NoMatch(f"matching trace at {Y.vertex_ids[pv]} has no witness", (X.vertex_ids[v], X.wall_ids[w]))
    if X.weights[w] != Y.weights[h.wall]:
        raise DistanceViolation(f"wall {X.wall_ids[w]} matched to a wall of different weight",
                                (X.wall_ids[w], Y.wall_ids[h.wall]))
    return Halfspace(h.wall, -Y.sign(pv, h.wall))


# -- one extension step -------------------------------------------------------


@dataclass(frozen=True)
class _Edge:
    v: int      # endpoint in A
    u: int      # other endpoint
    wall: int
    side: int   # sign of u on wall, so the halfspace containing u is (wall, side)


def _edge_distance(chart: ComplexChart, e1: _Edge, e2: _Edge) -> Fraction:
    """Distance between the far endpoints from the case table.

    With ``mu_i`` the weights, ``d(u1, u2) = d(v1, v2) + s1 mu1 + s2 mu2`` for
    different walls, where ``s1 = +1`` when ``v2`` is off the halfspace of
    ``u1`` and ``-1`` otherwise; for a shared wall the distance is unchanged.
    """
    base = chart.distance(e1.v, e2.v)
    if e1.wall == e2.wall:
        return base
    s1 = 1 if chart.sign(e2.v, e1.wall) != e1.side else -1
    s2 = 1 if chart.sign(e1.v, e2.wall) != e2.side else -1
    return base + s1 * chart.weights[e1.wall] + s2 * chart.weights[e2.wall]


def _vertex_edge_distance(chart: ComplexChart, e: _Edge, x: int) -> Fraction:
    s = 1 if chart.sign(x, e.wall) != e.side else -1
    return chart.distance(e.v, x) + s * chart.weights[e.wall]


def _trace(chart: ComplexChart, A, wall: int, side: int) -> frozenset:
    return frozenset(a for a in A if chart.sign(a, wall) == side)


def _check_dichotomy(X: ComplexChart, A, edges: list[_Edge]):
    """Traces equal to the complement trace of another edge fall into exactly one case.

    Either the halfspaces are opposite sides of one wall, and some point
    of the trace realises ``d(x, v2) = d(x, v1) + d(v1, v2) - 2 mu1``, or
    one strictly contains the other's complement and every point of the
    trace satisfies ``d(x, v2) <= d(x, v1) + d(v1, v2) - 2 (mu1 + mu2)``.
    """
    by_trace: dict[frozenset, list[_Edge]] = {}
    for e in edges:
        by_trace.setdefault(_trace(X, A, e.wall, e.side), []).append(e)
    d = X.distance
    for e2 in edges:
        comp = _trace(X, A, e2.wall, -e2.side)
        for e1 in by_trace.get(comp, ()):
            if e1.v == e2.v:
                continue
            H = comp
            mu1, mu2 = X.weights[e1.wall], X.weights[e2.wall]
            dv = d(e1.v, e2.v)
            case_a = bool(H) and all(d(x, e2.v) <= d(x, e1.v) + dv - 2 * (mu1 + mu2) for x in H)
            case_b = any(d(x, e2.v) == d(x, e1.v) + dv - 2 * mu1 for x in H)
            opposite = e1.wall == e2.wall and e1.side == -e2.side
            if case_a == case_b or case_b != opposite:
                raise AssertionError(
                    f"trace dichotomy fails for edges {X.vertex_ids[e1.v]}-{X.vertex_ids[e1.u]} and "
                    f"{X.vertex_ids[e2.v]}-{X.vertex_ids[e2.u]}")


def _one_side(partial: PartialIsometry, *, check_dichotomy: bool = True) -> tuple[dict, list]:
    X, Y = partial.X, partial.Y
    A, phi = partial.A, partial.phi
    m = X.masks
    proposals: dict[int, int] = {}
    edges = []
    for v in sorted(A):
        for w in iter_bits(X.adjacent_walls(v)):
            u = X.lookup(m[v] ^ (1 << w))
            h = push_halfspace(partial, v, w)
            pu = Y.lookup(Y.masks[phi[v]] ^ (1 << h.wall))
            edges.append((_Edge(v, u, w, X.sign(u, w)), _Edge(phi[v], pu, h.wall, h.sign)))
            if u in A and phi[u] != pu:
                raise InconsistentExtension(
                    f"edge {X.vertex_ids[v]}-{X.vertex_ids[u]} is pushed away from phi({X.vertex_ids[u]})",
                    (X.vertex_ids[v], X.vertex_ids[u]))
            prev = proposals.setdefault(u, pu)
            if prev != pu:
                raise InconsistentExtension(
                    f"two edges into {X.vertex_ids[u]} disagree on its image",
                    (X.vertex_ids[u], Y.vertex_ids[prev], Y.vertex_ids[pu]))
    if check_dichotomy:
        _check_dichotomy(X, A, [e for e, _ in edges])
    return proposals, edges


def extend_one_step(partial: PartialIsometry, *, check_dichotomy: bool = True) -> PartialIsometry:
    """Extend ``phi`` to every vertex adjacent to ``A``.

    The image of a new vertex is read off from any edge joining it to ``A``;
    all such edges must agree.  The case table is checked on every pair of
    defining edges in both charts, the inverse is extended the same way and
    must be the inverse, and distances are re-validated on the new domain.
    """
    if partial.total:
        return partial
    X, Y = partial.X, partial.Y
    proposals, edges = _one_side(partial, check_dichotomy=check_dichotomy)
    inv, _ = _one_side(partial.inverse(), check_dichotomy=check_dichotomy)
    new = dict(partial.phi)
    new.update(proposals)
    for u, pu in proposals.items():
        if inv.get(pu, partial.inverse().phi.get(pu)) != u:
            raise InconsistentExtension(
                f"extension of the inverse does not send {Y.vertex_ids[pu]} back to {X.vertex_ids[u]}",
                (X.vertex_ids[u], Y.vertex_ids[pu]))
    if len(set(new.values())) != len(new):
        raise InconsistentExtension("extension is not injective", None)
    for (ex, ey), (fx, fy) in itertools.combinations(edges, 2):
        dx = _edge_distance(X, ex, fx)
        if dx != X.distance(ex.u, fx.u):
            raise AssertionError("case table disagrees with the distance in the source chart")
        if _edge_distance(Y, ey, fy) != Y.distance(ey.u, fy.u):
            raise AssertionError("case table disagrees with the distance in the target chart")
        if dx != Y.distance(ey.u, fy.u):
            raise DistanceViolation(
                f"d({X.vertex_ids[ex.u]}, {X.vertex_ids[fx.u]}) is not preserved",
                (X.vertex_ids[ex.u], X.vertex_ids[fx.u]))
    for ex, ey in edges:
        for a in partial.A:
            if _vertex_edge_distance(X, ex, a) != X.distance(ex.u, a):
                raise AssertionError("case table disagrees with the distance in the source chart")
            if X.distance(ex.u, a) != Y.distance(ey.u, partial.phi[a]):
                raise DistanceViolation(
                    f"d({X.vertex_ids[ex.u]}, {X.vertex_ids[a]}) is not preserved",
                    (X.vertex_ids[ex.u], X.vertex_ids[a]))
    return PartialIsometry(X, Y, new)


def extend_full(partial: PartialIsometry, *, check_dichotomy: bool = True) -> dict[int, int]:
    """Iterate single steps until the domain is the whole chart.

    Returns the vertex map of the resulting isomorphism, verified to be a
    bijection preserving adjacency and weights.
    """
    from .actions import validate_automorphism

    X, Y = partial.X, partial.Y
    if not partial.phi:
        raise Stalled("empty domain", {"frontier": []})
    cur = partial
    while not cur.total:
        frontier = sorted({X.lookup(X.masks[v] ^ (1 << w)) for v in cur.A
                           for w in iter_bits(X.adjacent_walls(v))} - cur.A)
        try:
            nxt = extend_one_step(cur, check_dichotomy=check_dichotomy)
        except (NoMatch, AmbiguousMatch) as err:
            raise Stalled(f"no step possible: {err}",
                          {"frontier": [X.vertex_ids[u] for u in frontier], "cause": err.code,
                           "witness": err.witness}) from err
        if len(nxt.phi) == len(cur.phi):
            raise Stalled("extension made no progress", {"frontier": [X.vertex_ids[u] for u in frontier]})
        cur = nxt
    if X.n_vertices != Y.n_vertices:
        missing = sorted(set(range(Y.n_vertices)) - set(cur.phi.values()))
        raise Stalled("extension covers the source but not the target",
                      {"frontier": [], "cause": "not-surjective", "missing": [Y.vertex_ids[u] for u in missing[:5]]})
    validate_automorphism(X, cur.phi, Y)
    return dict(cur.phi)


# -- oracle and witness completeness ------------------------------------------


def brute_force_extensions(partial: PartialIsometry, *, bound: int = 64) -> list[dict[int, int]]:
    """All weight-preserving isomorphisms extending ``phi``, by backtracking.

    Vertices are placed in breadth-first order; a placement must keep the
    map injective and preserve distances (hence adjacency and weights) to
    every vertex placed before.
    """
    X, Y = partial.X, partial.Y
    if X.n_vertices > bound or Y.n_vertices > bound:
        raise BoundExceeded(f"charts exceed the {bound}-vertex bound", (X.n_vertices, Y.n_vertices))
    if X.n_vertices != Y.n_vertices:
        return []
    start = min(partial.phi) if partial.phi else 0
    order, seen = [start], {start}
    for v in order:
        for u, _ in X.neighbors[v]:
            if u not in seen:
                seen.add(u)
                order.append(u)
    order = [v for v in order if v in partial.phi] + [v for v in order if v not in partial.phi]
    out: list[dict[int, int]] = []
    assign: dict[int, int] = {}
    used: set[int] = set()

    def place(i):
        if i == len(order):
            out.append(dict(assign))
            return
        x = order[i]
        cands = [partial.phi[x]] if x in partial.phi else range(Y.n_vertices)
        for y in cands:
            if y in used:
                continue
            if all(X.distance(x, a) == Y.distance(y, b) for a, b in assign.items()):
                assign[x] = y
                used.add(y)
                place(i + 1)
                del assign[x]
                used.discard(y)

    place(0)
    return out


def witness_complete(X: ComplexChart, A) -> bool:
    """Whether every trace at every stage of the growth of ``A`` has a witness.

    Stages are ``A``, its 1-neighbourhood, and so on until the whole chart.
    """
    cur = frozenset(X.vid(a) for a in A)
    if not cur:
        return False
    while True:
        for v in cur:
            if not all(h.has_witness for h in _h_sets(X, cur, v, check=False)):
                return False
        if len(cur) == X.n_vertices:
            return True
        grown = cur | {X.lookup(X.masks[v] ^ (1 << w)) for v in cur for w in iter_bits(X.adjacent_walls(v))}
        if grown == cur:
            return False
        cur = frozenset(grown)
