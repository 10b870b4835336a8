"""Automorphisms of charts and certified translation lengths.

An automorphism is stored as a vertex map on a declared domain, usually a
ball in which the map is only partially defined.  Translation lengths are
only reported with a certificate: either the displacement minimum found is
protected by a large enough ball inside the audited region, or the sandwich
bounds ``n*l <= d(o, g^n o) <= n*l + D*d(o, g o)`` leave a single value.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .core import (
    ChartError,
    ComplexChart,
    Halfspace,
    Relation,
    Subdivision,
    iter_bits,
    pocset_relation,
    subdivide,
)
from .crossratio import cross_ratio_from_distances, cross_ratio
from .median import gate, halfspace_set, interval, strongly_separated
from .racg import RacgGroup, Word


class ActionError(ChartError):
    code = "action-error"


class NotAdjacencyPreserving(ActionError):
    code = "not-adjacency-preserving"


class WeightMismatch(ActionError):
    code = "weight-mismatch"


class InsufficientDomain(ActionError):
    code = "insufficient-domain"


class InsufficientRadius(ActionError):
    code = "insufficient-radius"


class InversionUnresolved(ActionError):
    code = "inversion-unresolved"


class NoStabilization(ActionError):
    code = "no-stabilization"


class FixedPointAction(ActionError):
    code = "fixed-point-action"


# -- automorphisms ---------------------------------------------------------------


class AutomorphismChart:
    """A weight-preserving vertex map defined on ``domain``.

    Walls are addressed by chart index; ``wall_map`` records, for every wall
    crossed by an edge inside the domain, its image wall and whether the
    sides are exchanged (``flip == -1``) relative to the ``+``/``-`` labels.
    """

    lazy = False

    def __init__(self, chart: ComplexChart, mapping: Mapping[int, int], name: str = "g",
                 target: ComplexChart | None = None):
        self.chart = chart
        self.target = chart if target is None else target
        self.mapping = dict(mapping)
        self.name = name

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} on {len(self.mapping)}/{self.chart.n_vertices} vertices>"

    @property
    def domain(self) -> frozenset:
        return frozenset(self.mapping)

    @property
    def total(self) -> bool:
        return len(self.mapping) == self.chart.n_vertices

    def image(self, v: int) -> int | None:
        return self.mapping.get(v)

    def displacement(self, v: int) -> Fraction | None:
        u = self.mapping.get(v)
        return None if u is None else self.chart.distance(v, u)

    def orbit_distance(self, v: int, n: int) -> Fraction | None:
        """``d(v, g^n v)`` for ``n >= 1``, or None once the orbit leaves the domain."""
        u = v
        for _ in range(n):
            u = self.mapping.get(u)
            if u is None:
                return None
        return self.chart.distance(v, u)

    @cached_property
    def wall_map(self) -> dict[int, tuple[int, int]]:
        return _wall_map(self.chart, self.target, self.mapping)

    def wall_power(self, w: int, k: int) -> tuple[int, int] | None:
        """Image of wall ``w`` under ``g^k`` with the accumulated side flip."""
        flip = 1
        for _ in range(k):
            im = self.wall_map.get(w)
            if im is None:
                return None
            w, f = im
            flip *= f
        return w, flip

    def audit_walls(self) -> list:
        return sorted(self.wall_map)

    def wall_label(self, w) -> str:
        return self.chart.wall_ids[w]

    def is_inverted(self, w, k: int) -> bool | None:
        im = self.wall_power(w, k)
        return None if im is None else (im[0] == w and im[1] == -1)

    def inversion_candidates(self, walls: Sequence, k: int) -> list:
        return list(walls)

    def transverse_to_image(self, w) -> bool | None:
        im = self.wall_map.get(w)
        if im is None:
            return None
        return im[0] in self.chart.transverse_walls(w)

    def walls_between(self, v: int) -> list | None:
        """Walls crossed by a geodesic from ``v`` to ``g v``."""
        u = self.mapping.get(v)
        if u is None:
            return None
        return list(iter_bits(self.chart.masks[v] ^ self.chart.masks[u]))

    def compose(self, other: "AutomorphismChart") -> "AutomorphismChart":
        """``self`` after ``other``."""
        m = {v: self.mapping[u] for v, u in other.mapping.items() if u in self.mapping}
        return AutomorphismChart(self.chart, m, f"{self.name}{other.name}", self.target)

    def power(self, n: int) -> "AutomorphismChart":
        if n < 0:
            return self.inverse().power(-n)
        m = {v: v for v in range(self.chart.n_vertices)}
        for _ in range(n):
            m = {v: self.mapping[u] for v, u in m.items() if u in self.mapping}
        return AutomorphismChart(self.chart, m, f"({self.name})^{n}", self.target)

    def inverse(self) -> "AutomorphismChart":
        return AutomorphismChart(self.target, {u: v for v, u in self.mapping.items()},
                                 f"({self.name})^-1", self.chart)


def _wall_map(chart: ComplexChart, target: ComplexChart, mapping: Mapping[int, int]):
    out: dict[int, tuple[int, int]] = {}
    tm = target.masks
    for x, y, w in chart.edges:
        gx, gy = mapping.get(x), mapping.get(y)
        if gx is None or gy is None:
            continue
        diff = tm[gx] ^ tm[gy]
        if diff.bit_count() != 1:
            raise NotAdjacencyPreserving(
                f"edge {chart.vertex_ids[x]}-{chart.vertex_ids[y]} is not sent to an edge",
                (chart.vertex_ids[x], chart.vertex_ids[y]))
        w2 = diff.bit_length() - 1
        if chart.weights[w] != target.weights[w2]:
            raise WeightMismatch(
                f"wall {chart.wall_ids[w]} (weight {chart.weights[w]}) sent to "
                f"{target.wall_ids[w2]} (weight {target.weights[w2]})",
                (chart.wall_ids[w], target.wall_ids[w2]))
        flip = 1 if chart.sign(x, w) == target.sign(gx, w2) else -1
        prev = out.get(w)
        if prev is None:
            out[w] = (w2, flip)
        elif prev != (w2, flip):
            raise NotAdjacencyPreserving(
                f"parallel edges across {chart.wall_ids[w]} are sent across different walls",
                (chart.vertex_ids[x], chart.vertex_ids[y]))
    images = [w2 for w2, _ in out.values()]
    if len(set(images)) != len(images):
        raise NotAdjacencyPreserving("two walls share an image wall", None)
    return out


def validate_automorphism(chart: ComplexChart, vertex_map: Mapping, target: ComplexChart | None = None,
                          name: str = "g", *, pair_limit: int = 200, seed: int = 0) -> AutomorphismChart:
    """Check a vertex map and return it with its induced signed wall map.

    Keys and values may be vertex ids or indices.  Edges inside the domain
    must go to edges across walls of equal weight, consistently per wall;
    distances are compared on all pairs for domains up to ``pair_limit``
    vertices and on seeded random pairs beyond.
    """
    target = chart if target is None else target
    mapping = {chart.vid(k): target.vid(v) for k, v in vertex_map.items()}
    if len(set(mapping.values())) != len(mapping):
        raise NotAdjacencyPreserving("vertex map is not injective", None)
    auto = AutomorphismChart(chart, mapping, name, target)
    _ = auto.wall_map
    dom = sorted(mapping)
    if len(dom) <= pair_limit:
        pairs = [(a, b) for i, a in enumerate(dom) for b in dom[i + 1:]]
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(dom), rng.choice(dom)) for _ in range(pair_limit * 50)]
    for a, b in pairs:
        if chart.distance(a, b) != target.distance(mapping[a], mapping[b]):
            if chart.hops(a, b) == 1:
                raise WeightMismatch("edge weight not preserved",
                                     (chart.vertex_ids[a], chart.vertex_ids[b]))
            raise NotAdjacencyPreserving(
                f"distance between {chart.vertex_ids[a]} and {chart.vertex_ids[b]} not preserved",
                (chart.vertex_ids[a], chart.vertex_ids[b]))
    return auto


class LeftMultiplication(AutomorphismChart):
    """Left multiplication by a group element on a Coxeter ball.

    The vertex map inside the ball is explicit; displacements and orbit
    distances of ball vertices whose images leave the ball are computed from
    the word problem, so the audited domain is the whole ball.  Walls are
    handled as reflections, which need not cross the ball.
    """

    lazy = True

    def __init__(self, ball: "BallChart", word: Word, name: str | None = None):
        self.ball = ball
        self.group = ball.group
        self.word = tuple(word)
        chart = ball.chart
        n = chart.n_vertices
        img = list(range(n))
        for s in reversed(self.word):
            gm = ball.gen_maps[s]
            img = [gm[u] if u >= 0 else -1 for u in img]
        mapping = {v: u for v, u in enumerate(img) if u >= 0}
        super().__init__(chart, mapping, name or self.group.format(self.word))

    def _element(self, v: int) -> Word:
        return self.ball.words[v]

    def displacement(self, v: int) -> Fraction:
        u = self.mapping.get(v)
        if u is not None:
            return self.chart.distance(v, u)
        x = self._element(v)
        return self.ball.word_weight(self.group.multiply(self.group.inverse(x), self.group.multiply(self.word, x)))

    def orbit_distance(self, v: int, n: int) -> Fraction:
        x = self._element(v)
        gn = self.group.power(self.word, n)
        return self.ball.word_weight(self.group.multiply(self.group.inverse(x), self.group.multiply(gn, x)))

    def point(self, v: int, k: int) -> Word:
        """The group element ``g^k x`` for the ball vertex ``x = v``."""
        return self.group.multiply(self.group.power(self.word, k), self._element(v))

    def audit_walls(self) -> list:
        return list(self.ball.reflections)

    def wall_label(self, r) -> str:
        return self.group.format(r)

    def _conj(self, g: Word, r: Word) -> Word:
        G = self.group
        return G.multiply(G.multiply(g, r), G.inverse(g))

    def inversion_candidates(self, walls: Sequence, k: int) -> list:
        # an inverted wall separates the identity from g^k, so it is one of
        # the walls crossed by the normal-form path of g^k
        G = self.group
        crossed, prefix = set(), ()
        for s in G.power(self.word, k):
            crossed.add(G.reflection(prefix, s))
            prefix = G.append(prefix, s)
        return [r for r in walls if r in crossed]

    def is_inverted(self, r, k: int) -> bool:
        G = self.group
        gk = G.power(self.word, k)
        if self._conj(gk, r) != r:
            return False
        # g^k keeps the wall; it swaps sides iff g^k and e lie on opposite sides
        return len(G.multiply(r, gk)) < len(gk)

    def transverse_to_image(self, r) -> bool:
        G = self.group
        r2 = self._conj(self.word, r)
        # in a right-angled Coxeter group two walls cross iff their reflections commute
        return r2 != r and G.multiply(r, r2) == G.multiply(r2, r)

    def walls_between(self, v: int) -> list:
        G = self.group
        x = self._element(v)
        path = G.multiply(G.inverse(x), G.multiply(self.word, x))
        out, prefix = [], x
        for s in path:
            out.append(G.reflection(prefix, s))
            prefix = G.append(prefix, s)
        return out

    def compose(self, other: AutomorphismChart) -> AutomorphismChart:
        if isinstance(other, LeftMultiplication) and other.ball is self.ball:
            return LeftMultiplication(self.ball, self.group.multiply(self.word, other.word))
        return super().compose(other)

    def power(self, n: int) -> AutomorphismChart:
        return LeftMultiplication(self.ball, self.group.power(self.word, n))

    def inverse(self) -> AutomorphismChart:
        return self.power(-1)


# -- balls -------------------------------------------------------------------------


@dataclass
class BallChart:
    """A chart of a ball around ``basepoint`` in a larger complex.

    ``radius`` bounds the distance of every vertex from the basepoint and
    ``complete_radius`` is a radius up to which every vertex of the ambient
    complex is present.  ``dimension`` is the dimension of the ambient
    complex.  Coxeter balls also carry the group, the element of each
    vertex, the reflection of each wall and per-generator index maps.
    """

    chart: ComplexChart
    basepoint: int
    radius: Fraction
    complete_radius: Fraction
    dimension: int
    generators: dict = field(default_factory=dict)
    group: RacgGroup | None = None
    words: tuple | None = None
    word_index: dict | None = None
    reflections: tuple | None = None
    reflection_index: dict | None = None
    gen_maps: dict | None = None
    letter_weights: tuple | None = None

    def word_weight(self, word) -> Fraction:
        """Weighted length of a normal-form word: the distance from the identity."""
        if self.letter_weights is None:
            return Fraction(len(word))
        return sum((self.letter_weights[s] for s in word), Fraction(0))

    def distance_from_base(self, v: int) -> Fraction:
        return self.chart.distance(self.basepoint, v)

    def left_mult(self, word) -> LeftMultiplication:
        if self.group is None:
            raise TypeError("left multiplication needs a Coxeter ball")
        if isinstance(word, str):
            word = self.group.parse(word)
        return LeftMultiplication(self, self.group.normal_form(word))

    def generator(self, name: str) -> AutomorphismChart:
        return self.generators[name]

    def ball_vertices(self, center: int, rho) -> list[int]:
        d = self.chart.distance
        return [u for u in range(self.chart.n_vertices) if d(center, u) <= rho]

    def contains_ball(self, center: int, rho) -> bool:
        """Whether every ambient vertex within ``rho`` of ``center`` is a chart vertex."""
        return self.distance_from_base(center) + rho <= self.complete_radius


def subdivide_ball(ball: BallChart, halve: bool = True) -> tuple[BallChart, Subdivision]:
    """Subdivide and lift the generators.

    With ``halve`` the metric scale is kept; otherwise distances double.  A
    cube belongs to the ball once its farthest corner does, which costs half
    a maximal cube diagonal in completeness.
    """
    sub = subdivide(ball.chart, halve=halve)
    max_w = max(ball.chart.weights) if ball.chart.n_walls else Fraction(0)
    k = 1 if halve else 2
    new = BallChart(
        chart=sub.chart,
        basepoint=sub.inclusion[ball.basepoint],
        radius=k * ball.radius,
        complete_radius=k * (ball.complete_radius - Fraction(ball.dimension) * max_w / 2),
        dimension=ball.dimension,
    )
    new.generators = {k: lift_to_subdivision(sub, g) for k, g in ball.generators.items()}
    return new, sub


def lift_to_subdivision(sub: Subdivision, auto: AutomorphismChart) -> AutomorphismChart:
    """The induced map on cubes; a cube maps when all of its corners do."""
    chart = sub.source
    index = {(c.walls, c.base): i for i, c in enumerate(sub.cubes)}
    mapping = {}
    for i, c in enumerate(sub.cubes):
        imgs = []
        for corner in c.corners():
            u = auto.image(chart.lookup(corner))
            if u is None:
                break
            imgs.append(chart.masks[u])
        else:
            walls = 0
            for m in imgs:
                walls |= m ^ imgs[0]
            j = index.get((walls, imgs[0] & ~walls))
            if j is not None:
                mapping[i] = j
    return AutomorphismChart(sub.chart, mapping, f"{auto.name}'")


def truncate_ball(ball: BallChart, r) -> BallChart:
    """Restrict a ball chart and its generators to a smaller radius."""
    from .core import validate
    r = Fraction(r)
    keep = [v for v in range(ball.chart.n_vertices) if ball.distance_from_base(v) <= r]
    pos = {v: i for i, v in enumerate(keep)}
    used = 0
    for v in keep:
        used |= ball.chart.masks[v] ^ ball.chart.masks[ball.basepoint]
    walls = list(iter_bits(used))
    masks = []
    for v in keep:
        m = ball.chart.masks[v]
        masks.append(sum(1 << i for i, w in enumerate(walls) if (m >> w) & 1))
    chart = ComplexChart([ball.chart.wall_ids[w] for w in walls], [ball.chart.weights[w] for w in walls],
                         [ball.chart.vertex_ids[v] for v in keep], masks)
    chart = validate(chart)
    gens = {}
    for k, g in ball.generators.items():
        m = {pos[v]: pos[u] for v, u in g.mapping.items() if v in pos and u in pos}
        gens[k] = AutomorphismChart(chart, m, g.name)
    return BallChart(chart, pos[ball.basepoint], r, min(r, ball.complete_radius), ball.dimension, gens)


def product_ball(a: BallChart, b: BallChart) -> BallChart:
    """Product of two balls; generators present in both act diagonally."""
    from .core import product
    chart = product(a.chart, b.chart)
    nb = b.chart.n_vertices
    gens = {}
    for k in a.generators.keys() & b.generators.keys():
        ga, gb = a.generators[k], b.generators[k]
        m = {}
        for x, gx in ga.mapping.items():
            for y, gy in gb.mapping.items():
                m[x * nb + y] = gx * nb + gy
        gens[k] = AutomorphismChart(chart, m, f"({ga.name},{gb.name})")
    return BallChart(chart, a.basepoint * nb + b.basepoint, a.radius + b.radius,
                     min(a.complete_radius, b.complete_radius), a.dimension + b.dimension, gens)


# -- inversions and transversality ------------------------------------------------


@dataclass(frozen=True)
class InversionReport:
    max_power: int
    inverted: dict
    transverse: list
    audited_walls: int
    stably_without_inversions: bool
    non_transverse: bool


def inversion_report(auto: AutomorphismChart, max_power: int, walls: Sequence | None = None,
                     nt_walls: Sequence | None = None) -> InversionReport:
    """Walls inverted by ``g^k`` for ``k <= max_power`` and walls crossing their image.

    ``walls`` restricts the inversion audit and ``nt_walls`` the
    transversality audit; both default to every wall the map can evaluate.
    """
    walls = auto.audit_walls() if walls is None else list(walls)
    nt_walls = walls if nt_walls is None else list(nt_walls)
    if not walls:
        raise InsufficientDomain("no wall can be audited inside the domain", auto.name)
    inverted = {}
    for k in range(1, max_power + 1):
        hit = [auto.wall_label(w) for w in auto.inversion_candidates(walls, k) if auto.is_inverted(w, k)]
        if hit:
            inverted[k] = hit
    transverse = []
    for w in nt_walls:
        if auto.transverse_to_image(w):
            transverse.append(auto.wall_label(w))
    return InversionReport(max_power, inverted, transverse, len(walls), not inverted, not transverse)


# -- translation length ------------------------------------------------------------


@dataclass(frozen=True)
class LengthCertificate:
    """A certified translation length.

    ``ball`` and ``auto`` are the chart and map the certificate was issued
    on, after any subdivision or passage to a power; ``transforms`` records
    those steps and ``value`` is already rescaled to the original map.
    """

    value: Fraction
    witness: int | None
    method: str
    ball: BallChart
    auto: AutomorphismChart
    min_displacement: Fraction
    transforms: tuple
    audit: dict

    @property
    def power(self) -> int:
        p = 1
        for t in self.transforms:
            if t[0] == "power":
                p *= t[1]
        return p

    @property
    def subdivided(self) -> bool:
        return any(t[0] == "subdivide" for t in self.transforms)


def _lattice_step(chart: ComplexChart) -> Fraction:
    if not chart.weights:
        return Fraction(1)
    den = math.lcm(*(w.denominator for w in chart.weights))
    num = math.gcd(*(w.numerator * (den // w.denominator) for w in chart.weights))
    return Fraction(num, den)


def _scan_min(ball: BallChart, g: AutomorphismChart) -> tuple[Fraction, int]:
    best, where = None, None
    o = ball.basepoint
    d = ball.chart.distance
    for v, u in g.mapping.items():
        disp = d(v, u)
        key = (disp, d(o, v), v)
        if best is None or key < best:
            best, where = key, v
    if best is None:
        if g.lazy:
            return g.displacement(o), o
        raise InsufficientDomain("automorphism has empty domain", g.name)
    return best[0], where


def _method_a(ball: BallChart, g: AutomorphismChart, delta: Fraction, v0: int, D: int):
    """Refine the minimum locally and certify it if the protecting ball is audited."""
    while True:
        rho = Fraction(D) * delta / 2
        if not ball.contains_ball(v0, rho):
            return None, {"required_radius": rho, "centre_depth": ball.distance_from_base(v0),
                          "complete_radius": ball.complete_radius}
        lower = None
        for u in ball.ball_vertices(v0, rho):
            disp = g.displacement(u)
            if disp is None:
                return None, {"required_radius": rho, "uncomputable_vertex": ball.chart.vertex_ids[u]}
            if disp < delta:
                lower = (disp, u)
                break
        if lower is None:
            return (delta, v0), {"required_radius": rho, "centre_depth": ball.distance_from_base(v0),
                                 "complete_radius": ball.complete_radius}
        delta, v0 = lower


def _method_b(ball: BallChart, g: AutomorphismChart, delta: Fraction, v0: int, D: int, n_max: int):
    """Sandwich bounds at a base vertex ``v``.

    With ``m`` a nearest point of Min(g), ``d(v, g^n v) <= n*l + 2 d(v, m)``
    and ``2 d(v, m) <= D (d(v, g v) - l)``.  So every ``n`` gives
    ``l <= d_n / n`` and, for ``n > D``, ``l >= (d_n - D d_1) / (n - D)``.
    """
    base = v0 if g.orbit_distance(v0, 1) is not None else ball.basepoint
    d1 = g.orbit_distance(base, 1)
    if d1 is None:
        return None, {"sandwich_depth": 0}
    step = _lattice_step(ball.chart)
    lower, upper = Fraction(0), min(delta, d1)
    used = 0
    for n in range(1, n_max + 1):
        dn = g.orbit_distance(base, n)
        if dn is None:
            break
        used = n
        upper = min(upper, dn / n)
        if n > D:
            lower = max(lower, (dn - D * d1) / (n - D))
        if lower > upper or dn > n * upper + D * d1:
            raise AssertionError("sandwich bounds are inconsistent")
        k_lo = math.ceil(lower / step)
        k_hi = math.floor(upper / step)
        if k_lo == k_hi:
            return k_lo * step, {"sandwich_depth": n, "sandwich_base": ball.chart.vertex_ids[base],
                                 "lower": lower, "upper": upper, "step": step}
    return None, {"sandwich_depth": used, "lower": lower, "upper": upper, "step": step}


def translation_length(ball: BallChart, g: AutomorphismChart, *, max_power: int | None = None,
                       n_max: int = 64, _transforms: tuple = ()) -> LengthCertificate:
    """Certified translation length of ``g`` on the ambient complex of ``ball``.

    Inversions are removed by passing to the subdivision (weights halved, so
    the scale is unchanged); a wall crossing its own image near the minimal
    set triggers passage to ``g^(D!)``.  Both steps are recorded.
    """
    D = max(ball.dimension, 1)
    max_power = math.factorial(D) if max_power is None else max_power
    inv = inversion_report(g, max_power, nt_walls=[])
    if not inv.stably_without_inversions:
        if any(t[0] == "subdivide" for t in _transforms):
            raise InversionUnresolved("inversions persist after subdivision", inv.inverted)
        new_ball, sub = subdivide_ball(ball)
        lifted = lift_to_subdivision(sub, g)
        return translation_length(new_ball, lifted, max_power=max_power, n_max=n_max,
                                  _transforms=_transforms + (("subdivide", inv.inverted),))

    delta, v0 = _scan_min(ball, g)
    nt_walls = g.walls_between(v0) or []
    nt = inversion_report(g, 1, walls=nt_walls or [None], nt_walls=nt_walls) if nt_walls else None
    if nt is not None and not nt.non_transverse:
        if any(t[0] == "power" for t in _transforms):
            raise InversionUnresolved("transverse wall images persist after passing to a power", nt.transverse)
        p = math.factorial(D)
        cert = translation_length(ball, g.power(p), max_power=max_power, n_max=n_max,
                                  _transforms=_transforms + (("power", p, nt.transverse),))
        return LengthCertificate(cert.value / p, cert.witness, cert.method, cert.ball, cert.auto,
                                 cert.min_displacement, cert.transforms, cert.audit)

    audit = {"dimension": D, "stable_up_to": max_power, "audited_walls": inv.audited_walls,
             "non_transverse_walls": len(nt_walls), "domain_size": len(g.mapping), "lazy": g.lazy}
    found, info = _method_a(ball, g, delta, v0, D)
    audit.update(info)
    if found is not None:
        value, witness = found
        return LengthCertificate(value, witness, "min-displacement", ball, g, value, _transforms, audit)
    value, info = _method_b(ball, g, delta, v0, D, n_max)
    audit.update(info)
    if value is None:
        raise InsufficientRadius("neither the displacement minimum nor the sandwich bounds certify a length",
                                 audit)
    witness = v0 if g.displacement(v0) == value else None
    return LengthCertificate(value, witness, "sandwich", ball, g, delta, _transforms, audit)


def min_set(ball: BallChart, g: AutomorphismChart, cert: LengthCertificate, *, pair_limit: int = 2000,
            seed: int = 0) -> list[int]:
    """Audited vertices of ``ball`` whose displacement equals the certified length.

    Convexity is checked inside the audited region: for pairs of minimal
    vertices, every audited vertex between them must be minimal too.
    """
    domain = range(ball.chart.n_vertices) if g.lazy else sorted(g.mapping)
    M = [v for v in domain if g.displacement(v) == cert.value]
    for v in domain:
        disp = g.displacement(v)
        if disp is not None and disp < cert.value:
            raise AssertionError("audited vertex displaced less than the certified length")
    Mset = set(M)
    pairs = [(a, b) for i, a in enumerate(M) for b in M[i + 1:]]
    if len(pairs) > pair_limit:
        pairs = random.Random(seed).sample(pairs, pair_limit)
    for a, b in pairs:
        for u in interval(ball.chart, a, b).members:
            if u in Mset:
                continue
            disp = g.displacement(u)
            if disp is not None:
                raise AssertionError("minimal set is not convex inside the audited region")
    return M


# -- tau and reduced lengths ---------------------------------------------------------


def tau_and_reduced(ball: BallChart, generators: Sequence[str] | None = None,
                    words: Mapping[str, Sequence[str]] | None = None):
    """Minimal largest generator displacement and the reduced length function.

    ``tau`` is minimised over vertices of the subdivision with halved
    weights, so it is on the original scale.  Returns ``(tau, reduced)``
    where ``reduced`` maps each generator name and each supplied word name
    to its certified length divided by ``tau``.
    """
    names = sorted(ball.generators) if generators is None else list(generators)
    if not names:
        raise ValueError("tau needs at least one generator")
    sub_ball, sub = subdivide_ball(ball)
    gens = [sub_ball.generators[k] for k in names]
    common = set(gens[0].mapping)
    for g in gens[1:]:
        common &= set(g.mapping)
    if not common:
        raise InsufficientDomain("generators share no domain vertex", names)
    d = sub_ball.chart.distance
    tau = min(max(d(v, g.mapping[v]) for g in gens) for v in common)
    if tau == 0:
        raise FixedPointAction("the generators fix a point", names)
    lengths = {k: translation_length(ball, ball.generators[k]).value for k in names}
    if tau != max(lengths.values()):
        raise InsufficientRadius("tau is not pinned by the generator lengths inside the ball",
                                 {"tau_upper": tau, "lengths": lengths})
    reduced = {k: v / tau for k, v in lengths.items()}
    for key, word in (words or {}).items():
        g = None
        for letter in word:
            h = ball.generators[letter]
            g = h if g is None else g.compose(h)
        ell = translation_length(ball, g).value
        if ell > tau * len(word):
            raise AssertionError(f"length of {key} exceeds tau times its word length")
        reduced[key] = ell / tau
    return tau, reduced


# -- neatly contracting witnesses -----------------------------------------------------


@dataclass(frozen=True)
class NeatWitness:
    """Halfspaces with ``g h1 <= h2 <= h1`` and the required strong separations.

    ``gate`` is the vertex of ``h2`` closest to ``h1*``; ``plus`` and
    ``minus`` list ``g^n gate`` and ``g^-n gate`` while they stay in the chart.
    """

    h1: Halfspace
    h2: Halfspace
    g_h1: Halfspace
    gate: int
    plus: tuple
    minus: tuple


def _image_halfspace(g: AutomorphismChart, h: Halfspace) -> Halfspace | None:
    if g.lazy:
        ball = g.ball
        r = ball.reflections[h.wall]
        G = g.group
        r2 = G.multiply(G.multiply(g.word, r), G.inverse(g.word))
        w2 = ball.reflection_index.get(r2)
        if w2 is None:
            return None
        # g sends the side of r containing e to the side of r2 containing g
        g_plus = len(G.multiply(r2, g.word)) < len(g.word)
        flip = -1 if g_plus else 1
        return Halfspace(w2, h.sign * flip)
    im = g.wall_map.get(h.wall)
    return None if im is None else Halfspace(im[0], h.sign * im[1])


def _contained(chart: ComplexChart, a: Halfspace, b: Halfspace) -> bool:
    if a == b:
        return True
    if a.wall == b.wall:
        return False
    return pocset_relation(chart, a, b) is Relation.SUBSET


def neatly_contracting_witness(ball: BallChart, g: AutomorphismChart,
                               cert: LengthCertificate | None = None) -> NeatWitness | None:
    """Search the audited ball for halfspaces exhibiting ``g`` as neatly contracting.

    Candidate walls are those crossing two periods of an axis through the
    certified witness, which is where any such pair must live.
    """
    cert = translation_length(ball, g) if cert is None else cert
    if cert.transforms:
        raise InsufficientRadius("witness search needs a certificate on the original chart", cert.transforms)
    if cert.value == 0:
        return None
    chart = ball.chart
    v0 = cert.witness if cert.witness is not None else ball.basepoint
    cand = []
    for w in (g.walls_between(v0) or []):
        idx = w if not g.lazy else ball.reflection_index.get(w)
        if idx is not None:
            cand.append(idx)
    g2 = g.power(2)
    for w in (g2.walls_between(v0) or []):
        idx = w if not g.lazy else ball.reflection_index.get(w)
        if idx is not None and idx not in cand:
            cand.append(idx)
    for w1 in cand:
        for s1 in (1, -1):
            h1 = Halfspace(w1, s1)
            gh1 = _image_halfspace(g, h1)
            if gh1 is None or gh1.wall == w1 or not _contained(chart, gh1, h1):
                continue
            for w2 in [w1, gh1.wall] + [w for w in cand if w not in (w1, gh1.wall)]:
                for s2 in (1, -1):
                    h2 = Halfspace(w2, s2)
                    if not (_contained(chart, gh1, h2) and _contained(chart, h2, h1)):
                        continue
                    if not strongly_separated(chart, h2, h1.star):
                        continue
                    if not strongly_separated(chart, gh1, h2.star):
                        continue
                    y0 = next(iter(chart.side_vertices(h1.star)))
                    p = gate(halfspace_set(chart, h2), y0)
                    return NeatWitness(h1, h2, gh1, p, _orbit(g, p, 1), _orbit(g.inverse(), p, 1))
    return None


def _orbit(g: AutomorphismChart, v: int, _k: int) -> tuple:
    out = [v]
    while True:
        u = g.image(out[-1])
        if u is None or u in out:
            return tuple(out)
        out.append(u)


# -- lengths versus cross ratios --------------------------------------------------------


@dataclass(frozen=True)
class CrFromEllReport:
    """Length-side and cross-ratio-side sequences with their stabilised values.

    ``s`` holds ``l(g^n) + l(h^n) - l(g^n h^n)``; ``c`` holds the wall-count
    cross ratio of ``(g^-k u, h^-k w, g^k u, h^k w)``.  In wall-count
    normalisation the two sides are related by ``s = -2 c``.
    """

    s: tuple
    c: tuple
    window: int
    s_stable: Fraction
    c_stable: Fraction
    agree: bool
    witnesses: tuple


def _stable(seq: Sequence, window: int, what: str):
    if len(seq) < window or len(set(seq[-window:])) != 1:
        raise NoStabilization(f"{what} is not constant over the last {window} terms", list(seq))
    return seq[-1]


def cr_from_ell_check(ball: BallChart, g: AutomorphismChart, h: AutomorphismChart, n_max: int,
                      k_max: int | None = None) -> CrFromEllReport:
    """Compare the length combination with deep-axis cross ratios.

    Both ``g`` and ``h`` must be neatly contracting with pairwise distinct
    endpoints; distinctness is read off bounded Gromov products between the
    four approximant sequences.
    """
    k_max = n_max if k_max is None else k_max
    D = max(ball.dimension, 1)
    o = ball.basepoint
    window = math.ceil(D * max(g.orbit_distance(o, 1), h.orbit_distance(o, 1)))
    cg, ch = translation_length(ball, g), translation_length(ball, h)
    if cg.transforms or ch.transforms or cg.witness is None or ch.witness is None:
        raise InsufficientRadius("axis witnesses must be certified on the original chart")
    for a, c in ((g, cg), (h, ch)):
        if neatly_contracting_witness(ball, a, c) is None:
            raise InsufficientRadius(f"no neatly contracting witness for {a.name} in the ball")
    u, w = cg.witness, ch.witness

    if g.lazy:
        G = g.group

        def pt(a, v, k):
            return a.point(v, k)

        def dist(p, q):
            return ball.word_weight(G.multiply(G.inverse(p), q))
    else:
        def pt(a, v, k):
            return v if k == 0 else a.power(k).image(v)

        def dist(p, q):
            return ball.chart.distance(p, q)

    s = []
    for n in range(1, n_max + 1):
        gn, hn = g.power(n), h.power(n)
        s.append(translation_length(ball, gn).value + translation_length(ball, hn).value
                 - translation_length(ball, gn.compose(hn)).value)
    c = []
    gp = []
    base = ball.words[o] if g.lazy else o
    for k in range(1, k_max + 1):
        pts = (pt(g, u, -k), pt(h, w, -k), pt(g, u, k), pt(h, w, k))
        if any(p is None for p in pts):
            break
        val = cross_ratio_from_distances(dist, *pts)
        if not g.lazy:
            if cross_ratio(ball.chart, *pts) != val:
                raise AssertionError("wall-count and distance cross ratios disagree")
        c.append(val)
        gp.append(tuple((dist(base, p) + dist(base, q) - dist(p, q)) / 2
                        for i, p in enumerate(pts) for q in pts[i + 1:]))
    s_st = _stable(s, window, "length combination")
    c_st = _stable(c, window, "cross ratio sequence")
    # distinct endpoints: pairwise Gromov products at the basepoint stay bounded
    _stable(gp, window, "approximant Gromov products")
    return CrFromEllReport(tuple(s), tuple(c), window, s_st, c_st, s_st == -2 * c_st, (u, w))
