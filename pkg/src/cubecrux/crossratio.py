"""Gromov products, cross ratios, opposite points and cut points."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .core import ComplexChart, iter_bits, majority
from .median import median

#: entry value reserved for cross ratios of diverging boundary approximants
INFINITY = math.inf


def _sep(chart: ComplexChart, a: int, b: int, c: int, d: int) -> int:
    """Walls putting ``a, b`` on one side and ``c, d`` on the other."""
    m = chart.masks
    return ~(m[a] ^ m[b]) & ~(m[c] ^ m[d]) & (m[a] ^ m[c]) & chart.full


def separated_weight(chart: ComplexChart, A: Iterable, B: Iterable) -> Fraction:
    """Weight of the walls separating vertex set ``A`` from vertex set ``B``."""
    A = [chart.vid(a) for a in A]
    B = [chart.vid(b) for b in B]
    m = chart.masks
    ref = m[A[0]]
    same = chart.full
    for v in A:
        same &= ~(m[v] ^ ref)
    for v in B:
        same &= m[v] ^ ref
    return chart.weight_of(same)


def gromov_product(chart: ComplexChart, v, x, y) -> Fraction:
    """Weight of the walls separating ``v`` from both ``x`` and ``y``."""
    v, x, y = chart.vid(v), chart.vid(x), chart.vid(y)
    m = chart.masks
    return chart.weight_of(~(m[x] ^ m[y]) & (m[x] ^ m[v]) & chart.full)


@dataclass(frozen=True)
class CrossRatioTriple:
    """The three partition weights of a 4-tuple, normalised to have a zero entry.

    Entries are, in order, the weights for the partitions
    ``xy|zw``, ``xz|yw`` and ``xw|yz``.
    """

    entries: tuple

    @classmethod
    def of(cls, a, b, c) -> "CrossRatioTriple":
        low = min(a, b, c)
        if low == INFINITY:
            return cls((INFINITY,) * 3)
        return cls(tuple(e - low for e in (a, b, c)))

    @property
    def cr(self):
        """``cr(x, y, z, w)``, the second entry minus the third."""
        return self.entries[1] - self.entries[2]

    def __str__(self):
        return "[" + ":".join(str(e) for e in self.entries) + "]"


def crt(chart: ComplexChart, x, y, z, w) -> CrossRatioTriple:
    x, y, z, w = (chart.vid(a) for a in (x, y, z, w))
    return CrossRatioTriple.of(
        chart.weight_of(_sep(chart, x, y, z, w)),
        chart.weight_of(_sep(chart, x, z, y, w)),
        chart.weight_of(_sep(chart, x, w, y, z)),
    )


def cross_ratio(chart: ComplexChart, x, y, z, w) -> Fraction:
    """Weight of walls separating ``x, z`` from ``y, w`` minus those separating ``x, w`` from ``y, z``."""
    x, y, z, w = (chart.vid(a) for a in (x, y, z, w))
    return chart.weight_of(_sep(chart, x, z, y, w)) - chart.weight_of(_sep(chart, x, w, y, z))


def cross_ratio_from_distances(d: Callable, x, y, z, w) -> Fraction:
    """The same quantity from a distance function alone."""
    return Fraction(d(x, w) + d(y, z) - d(x, z) - d(y, w)) / 2


# -- opposite points and cut points -------------------------------------------


@dataclass(frozen=True)
class OppositeWitness:
    x: int
    y: int
    z: int
    median: int
    toward_x: frozenset
    toward_y: frozenset
    conditions: tuple[bool, bool, bool]

    @property
    def opposite(self) -> bool:
        return self.conditions[2]


def cut_point_conditions(chart: ComplexChart, x, y, v) -> tuple[bool, bool, bool]:
    """Three characterisations of ``v`` cutting the interval from ``x`` to ``y``.

    1. the link of ``v`` inside the interval has as many components as it
       has nonempty sides (two at interior vertices);
    2. that link is the disjoint union of the cliques of walls toward ``x``
       and toward ``y``;
    3. the interval is the union of the intervals ``[x, v]`` and ``[v, y]``.

    The sides are allowed to be empty so the statements also make sense at
    the endpoints.
    """
    x, y, v = chart.vid(x), chart.vid(y), chart.vid(v)
    m = chart.masks
    xy = m[x] ^ m[y]
    if (m[v] ^ m[x]) & ~xy & chart.full:
        raise ValueError("vertex is not in the interval")
    adj = chart.adjacent_walls(v)
    tx = adj & (m[v] ^ m[x])
    ty = adj & (m[v] ^ m[y])
    lk = chart.link(v)
    inside = tx | ty
    elems = [w for w in lk.elements if (inside >> w) & 1]
    edges = [(a, b) for a, b in lk.edges if (inside >> a) & 1 and (inside >> b) & 1]
    cross = any(((tx >> a) & 1) != ((tx >> b) & 1) for a, b in edges)
    # components of the restricted link
    parent = {e: e for e in elems}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    n_components = len({find(e) for e in elems})
    sides = int(bool(tx)) + int(bool(ty))
    c1 = n_components == sides
    c2 = (not cross) and all(
        chart.lookup(m[v] ^ (1 << a) ^ (1 << b)) is not None
        for part in (tx, ty) for a, b in itertools.combinations(iter_bits(part), 2))
    # interval condition: every vertex of I(x, y) lies in I(x, v) or I(v, y)
    fixed = chart.full & ~xy
    mvx, mvy = m[v] ^ m[x], m[v] ^ m[y]
    c3 = True
    for u in m:
        if (u ^ m[x]) & fixed:
            continue
        in_xv = not ((u ^ m[x]) & ~mvx & chart.full)
        in_vy = not ((u ^ m[y]) & ~mvy & chart.full)
        if not (in_xv or in_vy):
            c3 = False
            break
    return c1, c2, c3


def _check_agree(conds, where):
    if len(set(conds)) != 1:
        raise AssertionError(f"cut-point characterisations disagree at {where}: {conds}")


def is_cut_point(chart: ComplexChart, x, y, v) -> bool:
    conds = cut_point_conditions(chart, x, y, v)
    _check_agree(conds, (x, y, v))
    return conds[2]


def is_opposite(chart: ComplexChart, x, y, z, *, witness: bool = False):
    """Whether ``x`` and ``y`` are opposite with respect to ``z``.

    This holds when the median of the three cuts the interval from ``x`` to
    ``y``.  All three cut-point characterisations are evaluated and must
    agree.
    """
    x, y, z = chart.vid(x), chart.vid(y), chart.vid(z)
    m = median(chart, x, y, z)
    conds = cut_point_conditions(chart, x, y, m)
    _check_agree(conds, (x, y, z))
    if not witness:
        return conds[2]
    masks = chart.masks
    adj = chart.adjacent_walls(m)
    return OppositeWitness(
        x, y, z, m,
        frozenset(iter_bits(adj & (masks[m] ^ masks[x]))),
        frozenset(iter_bits(adj & (masks[m] ^ masks[y]))),
        conds,
    )


def cut_points(chart: ComplexChart, x, y) -> list[int]:
    """Vertices of the interval from ``x`` to ``y`` that cut it."""
    x, y = chart.vid(x), chart.vid(y)
    m = chart.masks
    fixed = chart.full & ~(m[x] ^ m[y])
    out = []
    for v, mv in enumerate(m):
        if (mv ^ m[x]) & fixed:
            continue
        if is_cut_point(chart, x, y, v):
            out.append(v)
    return out


def opposite_triples_through(chart: ComplexChart, v, candidates: Iterable) -> list[tuple[int, int, int]]:
    """Triples ``(x, y, z)`` of distinct candidates with median ``v`` and ``x``, ``y`` opposite.

    ``x`` and ``y`` are required to differ from ``v`` and are reported with
    ``x < y``; ``z`` may be ``v`` itself when ``v`` is a candidate.
    """
    v = chart.vid(v)
    cands = sorted({chart.vid(c) for c in candidates})
    m = chart.masks
    out = []
    for x, y in itertools.combinations(cands, 2):
        if v in (x, y):
            continue
        for z in cands:
            if z in (x, y):
                continue
            if majority(m[x], m[y], m[z]) != m[v]:
                continue
            if is_opposite(chart, x, y, z):
                out.append((x, y, z))
    return out


# -- Moebius maps ----------------------------------------------------------------


@dataclass(frozen=True)
class MobiusReport:
    passed: bool
    checked: int
    violation: tuple | None = None
    source_triple: CrossRatioTriple | None = None
    target_triple: CrossRatioTriple | None = None


def mobius_check(chart_x: ComplexChart, chart_y: ComplexChart, pairs) -> MobiusReport:
    """Check that a vertex correspondence preserves every cross ratio.

    All 4-tuples with repetition are covered: the cross-ratio triple of a
    sorted tuple determines the cross ratio of each of its reorderings.
    """
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    corr = [(chart_x.vid(a), chart_y.vid(b)) for a, b in items]
    checked = 0
    for quad in itertools.combinations_with_replacement(range(len(corr)), 4):
        xs = [corr[i][0] for i in quad]
        ys = [corr[i][1] for i in quad]
        tx, ty = crt(chart_x, *xs), crt(chart_y, *ys)
        checked += 1
        if tx != ty:
            return MobiusReport(False, checked, (tuple(xs), tuple(ys)), tx, ty)
    return MobiusReport(True, checked)
