"""Reproducible acceptance suites.

Each suite returns an :class:`AcceptanceReport` with a pass flag, the number
of individual checks and the first few counterexamples.  Suites are seeded
and deterministic.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .actions import (
    cr_from_ell_check,
    lift_to_subdivision,
    product_ball,
    subdivide_ball,
    tau_and_reduced,
    translation_length,
)
from .core import ChartError, ComplexChart, Halfspace, facing_triple, make_chart, reweight, scale
from .crossratio import cross_ratio, crt, cut_point_conditions, gromov_product, is_opposite
from .extension import ExtensionError, PartialIsometry, brute_force_extensions, extend_full, witness_complete
from .generators import (
    RacgSpec,
    fig1_fixtures,
    gen_grid,
    gen_line_ball,
    gen_path,
    gen_racg_ball,
    pentagon_ball,
    random_suite,
    tree_ball,
)
from .median import bridge_decomposition, gate, halfspace_set, hull, interval, median, strongly_separated

MAX_COUNTEREXAMPLES = 5


class UnknownSuite(ChartError):
    code = "unknown-suite"


@dataclass
class AcceptanceReport:
    suite: str
    criterion: int
    passed: bool = True
    checks: int = 0
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def check(self, ok: bool, what=None) -> bool:
        self.checks += 1
        if not ok:
            self.passed = False
            if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                self.counterexamples.append(what)
        return ok

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.criterion}] {self.suite}: {self.checks} checks in {self.elapsed:.2f}s"

    def to_json(self) -> dict:
        return {"suite": self.suite, "criterion": self.criterion, "passed": self.passed, "checks": self.checks,
                "details": {k: str(v) for k, v in self.details.items()},
                "counterexamples": [str(c) for c in self.counterexamples]}


def suite_charts(seed: int = 0) -> list[tuple[str, ComplexChart]]:
    """The shared chart suite: random median charts, a weighted copy of each, and fixed shapes."""
    rng = random.Random(seed)
    out = [(f"random{i}", c) for i, c in enumerate(random_suite(20, 12, seed))]
    weights = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]
    for name, c in list(out[:10]):
        out.append((f"{name}w", reweight(c, {w: rng.choice(weights) for w in c.wall_ids})))
    f = fig1_fixtures()
    out += [
        ("path5", gen_path(5)),
        ("grid3x3", gen_grid([3, 3])),
        ("cube", gen_grid([1, 1, 1])),
        ("grid2x1x1", gen_grid([2, 1, 1], Fraction(2, 3))),
        ("fig1-left", f.left),
        ("fig1-right", f.right),
        ("tree3", tree_ball(3).chart),
        ("pentagon2", pentagon_ball(2).chart),
    ]
    return out


def _tuples(rng: random.Random, n: int, k: int, count: int):
    return [tuple(rng.randrange(n) for _ in range(k)) for _ in range(count)]


# -- 1 -------------------------------------------------------------------------------


def _cr_axioms(rep: AcceptanceReport, seed: int):
    rng = random.Random(seed)
    charts = random_suite(20, 12, seed)
    for ci, c in enumerate(charts):
        def cr(a, b, e, f, c=c):
            return cross_ratio(c, a, b, e, f)
        for x, y, z, w, t in _tuples(rng, c.n_vertices, 5, 1000):
            v = cr(x, y, z, w)
            ok = (v == -cr(y, x, z, w)
                  and v == cr(z, w, x, y)
                  and v == cr(x, y, z, t) + cr(x, y, t, w)
                  and v + cr(y, z, x, w) + cr(z, x, y, w) == 0)
            rep.check(ok, (ci, x, y, z, w, t))
    rep.details["charts"] = len(charts)


# -- 2 -------------------------------------------------------------------------------


def _basepoint(rep: AcceptanceReport, seed: int):
    rng = random.Random(seed)
    for name, c in suite_charts(seed):
        for v, x, y, z, w in _tuples(rng, c.n_vertices, 5, 200):
            gp = (gromov_product(c, v, x, z) + gromov_product(c, v, y, w)
                  - gromov_product(c, v, x, w) - gromov_product(c, v, y, z))
            rep.check(gp == cross_ratio(c, x, y, z, w), (name, v, x, y, z, w))


# -- 3 -------------------------------------------------------------------------------


def _dist_matrix(c: ComplexChart):
    n = c.n_vertices
    return [[c.distance(a, b) for b in range(n)] for a in range(n)]


def _median_gate(rep: AcceptanceReport, seed: int):
    covered = 0
    for name, c in suite_charts(seed):
        n = c.n_vertices
        if n > 64:
            continue
        covered += 1
        D = _dist_matrix(c)
        between = [[[u for u in range(n) if D[x][u] + D[u][y] == D[x][y]] for y in range(n)] for x in range(n)]
        for x, y, z in itertools.combinations_with_replacement(range(n), 3):
            common = set(between[x][y]) & set(between[y][z]) & set(between[x][z])
            rep.check(len(common) == 1 and median(c, x, y, z) in common, (name, "median", x, y, z))
        convex = [halfspace_set(c, Halfspace(w, s)) for w in range(c.n_walls) for s in (1, -1)]
        convex += [interval(c, a, b) for a, b in itertools.combinations(range(n), 2)]
        for C in convex:
            members = sorted(C.members)
            for x in range(n):
                best = min(D[x][u] for u in members)
                near = [u for u in members if D[x][u] == best]
                g = gate(C, x)
                sep = 0
                for w in range(c.n_walls):
                    sx = (c.masks[x] >> w) & 1
                    if all((c.masks[u] >> w) & 1 != sx for u in members):
                        sep |= 1 << w
                rep.check(near == [g] and (c.masks[x] ^ c.masks[g]) == sep, (name, "gate", members[:3], x))
    rep.details["charts"] = covered


# -- 4 -------------------------------------------------------------------------------


def _bridge(rep: AcceptanceReport, seed: int):
    rng = random.Random(seed)
    charts = suite_charts(seed)
    done = 0
    while done < 100:
        name, c = charts[rng.randrange(len(charts))]
        n = c.n_vertices
        A = hull(c, rng.sample(range(n), rng.randint(1, min(3, n))))
        B = hull(c, rng.sample(range(n), rng.randint(1, min(3, n))))
        try:
            br = bridge_decomposition(A, B)
        except AssertionError as err:
            rep.check(False, (name, "bridge", str(err)))
            done += 1
            continue
        S = br.shore_chart
        ok = len(set(br.product_map.values())) == len(br.hull)
        for a, b in itertools.combinations(sorted(br.hull.members), 2):
            (sa, ia), (sb, ib) = br.product_map[a], br.product_map[b]
            ok = ok and c.distance(a, b) == S.distance(sa, sb) + c.distance(ia, ib)
        rep.check(ok, (name, sorted(A.members)[:3], sorted(B.members)[:3]))
        done += 1
    strong = 0
    for name, c in charts:
        for w1, w2 in itertools.combinations(range(c.n_walls), 2):
            for s1, s2 in itertools.product((1, -1), repeat=2):
                h1, h2 = Halfspace(w1, s1), Halfspace(w2, s2)
                if c.side(h1) & c.side(h2):
                    continue
                if strongly_separated(c, h1, h2):
                    br = bridge_decomposition(halfspace_set(c, h1), halfspace_set(c, h2))
                    rep.check(len(br.shore1) == 1 and len(br.shore2) == 1 and br.shore_chart.n_vertices == 1,
                              (name, h1.label(c), h2.label(c)))
                    strong += 1
    rep.details["strongly_separated_pairs"] = strong
    rep.check(strong > 0, "no strongly separated pairs found")


# -- 5 -------------------------------------------------------------------------------


def _two_cuts(rep: AcceptanceReport, seed: int):
    for name, c in suite_charts(seed):
        for x, y in itertools.combinations(range(c.n_vertices), 2):
            for v in interval(c, x, y).members:
                conds = cut_point_conditions(c, x, y, v)
                rep.check(conds[0] == conds[1] == conds[2], (name, x, y, v, conds))


# -- 6 -------------------------------------------------------------------------------


def _fig1(rep: AcceptanceReport, seed: int):
    f = fig1_fixtures()
    for side, c, p in (("left", f.left, f.left_points), ("right", f.right, f.right_points)):
        pts = [p["x"], p["y"], p["z"], p["z'"]]
        for perm in itertools.permutations(pts):
            rep.check(cross_ratio(c, *perm) == 0, (side, "cr", perm))
        rep.details[f"{side}_crt"] = crt(c, *pts)
    lp, rp = f.left_points, f.right_points
    ml = (median(f.left, lp["x"], lp["y"], lp["z"]), median(f.left, lp["x"], lp["y"], lp["z'"]))
    mr = (median(f.right, rp["x"], rp["y"], rp["z"]), median(f.right, rp["x"], rp["y"], rp["z'"]))
    rep.check(ml[0] == ml[1], ("left medians differ", ml))
    rep.check(mr[0] != mr[1], ("right medians coincide", mr))
    for z in ("z", "z'"):
        rep.check(is_opposite(f.left, lp["x"], lp["y"], lp[z]), ("left not opposite", z))
        rep.check(not is_opposite(f.right, rp["x"], rp["y"], rp[z]), ("right opposite", z))
    rep.details["medians_left"] = [f.left.vertex_ids[m] for m in ml]
    rep.details["medians_right"] = [f.right.vertex_ids[m] for m in mr]


# -- 7 -------------------------------------------------------------------------------


def _certified(cert) -> bool:
    return cert.method in ("min-displacement", "sandwich")


def _length_spectrum(rep: AcceptanceReport, seed: int):
    ball = tree_ball(12)
    for n in range(1, 5):
        cert = translation_length(ball, ball.left_mult("ab" * n))
        rep.check(cert.value == 2 * n and _certified(cert), (f"(ab)^{n}", cert.value))
        rep.details[f"l((ab)^{n})"] = cert.value
    small = tree_ball(6)
    ab = small.left_mult("ab")
    sub_ball, sub = subdivide_ball(small, halve=False)
    lifted = lift_to_subdivision(sub, ab)
    cert = translation_length(sub_ball, lifted)
    rep.check(cert.value == 4 and _certified(cert), ("subdivision lift", cert.value))
    rep.details["l(lift ab)"] = cert.value
    prod = product_ball(small, small)
    diag = prod.generators["a"].compose(prod.generators["b"])
    cert = translation_length(prod, diag)
    rep.check(cert.value == 4 and _certified(cert), ("product diagonal", cert.value))
    rep.details["l(ab x ab)"] = cert.value


# -- 8 -------------------------------------------------------------------------------


def _cr_from_ell(rep: AcceptanceReport, seed: int):
    cases = [("tree", tree_ball(12), "ab", "cb"), ("pentagon", pentagon_ball(8), "acd", "cae")]
    for name, ball, g, h in cases:
        r = cr_from_ell_check(ball, ball.left_mult(g), ball.left_mult(h), 8)
        rep.check(r.agree, (name, g, h, r.s, r.c))
        rep.details[f"{name} {g},{h}"] = f"s={r.s_stable} c={r.c_stable} window={r.window}"


# -- 9 -------------------------------------------------------------------------------


def _relabelled(c: ComplexChart, rng: random.Random) -> tuple[ComplexChart, list[int]]:
    """An isomorphic copy with shuffled vertices, renamed walls and flipped orientations."""
    order = list(range(c.n_vertices))
    rng.shuffle(order)
    flip = rng.getrandbits(max(c.n_walls, 1)) & c.full
    masks = [c.masks[v] ^ flip for v in order]
    ids = [f"y{i}" for i in range(c.n_vertices)]
    Y = make_chart([f"k{w}" for w in range(c.n_walls)], masks, c.weights, ids)
    pos = [0] * c.n_vertices
    for i, v in enumerate(order):
        pos[v] = i
    return Y, pos


def _automorphisms(c: ComplexChart, limit: int = 64) -> list[dict]:
    if c.n_vertices > 20:
        return [{v: v for v in range(c.n_vertices)}]
    return brute_force_extensions(PartialIsometry(c, c, {}), bound=limit)[:limit]


def _complete_subset(c: ComplexChart, rng: random.Random) -> list[int]:
    n = c.n_vertices
    for _ in range(20):
        A = rng.sample(range(n), min(2, n))
        rest = [v for v in range(n) if v not in A]
        rng.shuffle(rest)
        while not witness_complete(c, A):
            A.append(rest.pop())
        if len(A) < n:
            return A
    return A


def _extension_instances(seed: int):
    rng = random.Random(seed)
    sources = [gen_path(5), gen_grid([2, 2]), gen_grid([3, 3]), gen_grid([2, 3]), gen_grid([1, 1, 1]),
               tree_ball(2).chart, tree_ball(3).chart]
    sources += [c for c in random_suite(20, 10, seed + 1) if c.n_vertices <= 64]
    out = []
    i = 0
    while len(out) < 50:
        X = sources[i % len(sources)]
        i += 1
        autos = _automorphisms(X)
        sigma = autos[rng.randrange(len(autos))]
        Y, pos = _relabelled(X, rng)
        iso = {v: pos[sigma[v]] for v in range(X.n_vertices)}
        A = _complete_subset(X, rng)
        out.append((X, Y, iso, A))
    return out


def _adversarial(seed: int) -> list[tuple[str, Callable]]:
    P5, P3 = gen_path(5), gen_path(3)
    sq, g33, g23 = gen_grid([1, 1]), gen_grid([3, 3]), gen_grid([2, 3])
    tripod = make_chart(["l0", "l1", "l2"], [0, 1, 2, 4], None, ["o", "a", "b", "c"])
    P12 = reweight(gen_path(2), {"p0": 1, "p1": 2})
    P21 = reweight(gen_path(2), {"p0": 2, "p1": 1})
    return [
        ("path translation", lambda: PartialIsometry(P5, P5, {"0": "3", "1": "4", "2": "5"})),
        ("path translation by one", lambda: PartialIsometry(P5, P5, {"0": "1", "1": "2"})),
        ("path vs tripod", lambda: PartialIsometry(gen_path(3), tripod, {"0": "a", "1": "o", "2": "b"})),
        ("square vs path", lambda: PartialIsometry(sq, P3, {"0,0": "0", "0,1": "1"})),
        ("grid translation", lambda: PartialIsometry(g33, g33, {"0,0": "1,0", "0,1": "1,1", "1,0": "2,0"})),
        ("grid 2x3 translation", lambda: PartialIsometry(g23, g23, {"0,0": "0,1", "1,0": "1,1"})),
        ("weights swapped", lambda: PartialIsometry(P12, P21, {"0": "0", "1": "1"})),
        ("weights reversed", lambda: PartialIsometry(P12, P21, {"0": "0"})),
        ("grid vs longer path", lambda: PartialIsometry(g33, gen_path(8), {"0,0": "0", "1,0": "1"})),
        ("distance violated", lambda: PartialIsometry(P5, P5, {"0": "0", "2": "3"})),
    ]


def _extension(rep: AcceptanceReport, seed: int):
    for k, (X, Y, iso, A) in enumerate(_extension_instances(seed)):
        partial = PartialIsometry(X, Y, {a: iso[a] for a in A})
        try:
            got = extend_full(partial)
        except ExtensionError as err:
            rep.check(False, (k, "extend_full failed", str(err)))
            continue
        oracle = brute_force_extensions(partial)
        rep.check(got == iso and oracle == [iso], (k, X, len(A), len(oracle)))
    for name, build in _adversarial(seed):
        partial = None
        try:
            partial = build()
            extend_full(partial)
        except ChartError:
            # a rejected map must also have no extension according to the oracle
            rep.check(partial is None or brute_force_extensions(partial) == [], (name, "oracle found an extension"))
        else:
            rep.check(False, (name, "extension unexpectedly succeeded"))
    rep.details["instances"] = 50
    rep.details["adversarial"] = 10


# -- 10 ------------------------------------------------------------------------------


def _predicates(c: ComplexChart, rng: random.Random):
    n = c.n_vertices
    out = []
    for x, y, z in _tuples(rng, n, 3, 30):
        if x != y:
            out.append(("opp", is_opposite(c, x, y, z)))
    for w1, w2 in itertools.combinations(range(c.n_walls), 2):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            h1, h2 = Halfspace(w1, s1), Halfspace(w2, s2)
            if not c.side(h1) & c.side(h2):
                out.append(("ssep", strongly_separated(c, h1, h2)))
    for t in itertools.islice(itertools.combinations(range(c.n_walls), 3), 200):
        out.append(("facing", facing_triple(c, *t)))
    return out


def _homogeneity(rep: AcceptanceReport, seed: int):
    for lam in (Fraction(2), Fraction(1, 3)):
        for name, c in suite_charts(seed):
            sc = scale(c, lam)
            rng = random.Random(seed)
            for x, y, z, w in _tuples(rng, c.n_vertices, 4, 50):
                ok = (sc.distance(x, y) == lam * c.distance(x, y)
                      and gromov_product(sc, x, y, z) == lam * gromov_product(c, x, y, z)
                      and cross_ratio(sc, x, y, z, w) == lam * cross_ratio(c, x, y, z, w))
                rep.check(ok, (name, lam, x, y, z, w))
            rep.check(_predicates(c, random.Random(seed)) == _predicates(sc, random.Random(seed)), (name, lam))
        for R in (4,):
            base = gen_racg_ball(RacgSpec(("a", "b", "c"), (), R))
            scaled = gen_racg_ball(RacgSpec(("a", "b", "c"), (), R, {"a": lam, "b": lam, "c": lam}))
            for word in ("ab", "abc", "abab"):
                l0 = translation_length(base, base.left_mult(word)).value
                l1 = translation_length(scaled, scaled.left_mult(word)).value
                rep.check(l1 == lam * l0, ("tree", lam, word, l0, l1))
        line0, line1 = gen_line_ball(6), gen_line_ball(6, lam)
        words = {"shift.shift.flip": ["shift", "shift", "flip"], "shift.shift": ["shift", "shift"]}
        t0, r0 = tau_and_reduced(line0, words=words)
        t1, r1 = tau_and_reduced(line1, words=words)
        rep.check(t1 == lam * t0 and r0 == r1, ("line", lam, t0, t1, r0, r1))
        rep.details[f"reduced lam={lam}"] = r1


SUITES: dict[str, tuple[int, Callable]] = {
    "cr-axioms": (1, _cr_axioms),
    "basepoint": (2, _basepoint),
    "median-gate": (3, _median_gate),
    "bridge": (4, _bridge),
    "two-cuts": (5, _two_cuts),
    "fig1": (6, _fig1),
    "length-spectrum": (7, _length_spectrum),
    "cr-from-ell": (8, _cr_from_ell),
    "extension": (9, _extension),
    "homogeneity": (10, _homogeneity),
}


def run_acceptance(suite_name: str, seed: int = 0) -> AcceptanceReport:
    """Run one named suite; unknown names raise :class:`UnknownSuite` listing the valid ones."""
    if suite_name not in SUITES:
        raise UnknownSuite(f"unknown suite {suite_name!r}; available: {', '.join(SUITES)}", list(SUITES))
    number, fn = SUITES[suite_name]
    rep = AcceptanceReport(suite_name, number)
    start = time.perf_counter()
    try:
        fn(rep, seed)
    except (ChartError, AssertionError) as err:
        rep.check(False, f"{type(err).__name__}: {err}")
    rep.elapsed = time.perf_counter() - start
    return rep
