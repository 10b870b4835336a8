"""Command-line interface.

Every subcommand prints one canonical JSON document.  Exit status is 0 on
success, 1 for a structured domain error (printed as ``{"error": ...}``) and
2 for usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import __version__
from . import io as cio
from .actions import (
    BallChart,
    min_set,
    neatly_contracting_witness,
    tau_and_reduced,
    translation_length,
)
from .core import ChartError, Halfspace, product, restriction_quotient, reweight, scale, subdivide
from .crossratio import crt, cross_ratio, cut_point_conditions, cut_points, gromov_product, is_opposite
from .median import bridge_decomposition, convex_set, gate, hull, interval, median, strongly_separated


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    inputs: dict
    seed: int
    version: str
    result: str


def _seed(args) -> int:
    env = os.environ.get("CUBECRUX_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _w(x):
    return cio.format_weight(x) if isinstance(x, (Fraction, int)) and not isinstance(x, bool) else x


def _ids(chart, vs):
    return [chart.vertex_ids[v] for v in sorted(vs)]


def _list(text: str) -> list[str]:
    # vertex ids may contain commas (grid coordinates), so lists use semicolons
    return [t for t in text.split(";") if t]


def _chart(args):
    return cio.chart_from_json(cio.load(args.chart))


def _ball(args) -> BallChart:
    return cio.ball_from_json(cio.load(args.ball))


def _element(ball: BallChart, spec: str):
    """A group element: a Coxeter word, or dot-separated generator names with optional ``^n``."""
    if ball.group is not None:
        return ball.left_mult(spec)
    g = None
    for part in spec.split("."):
        name, _, exp = part.partition("^")
        h = ball.generator(name)
        if exp:
            h = h.power(int(exp))
        g = h if g is None else g.compose(h)
    if g is None:
        raise ChartError("empty group element")
    return g


def _cert_json(ball: BallChart, cert) -> dict:
    chart = cert.ball.chart
    return {
        "length": _w(cert.value),
        "method": cert.method,
        "witness": None if cert.witness is None else chart.vertex_ids[cert.witness],
        "min_displacement": _w(cert.min_displacement),
        "transforms": [t[0] if t[0] == "subdivide" else f"power {t[1]}" for t in cert.transforms],
    }


# -- handlers -------------------------------------------------------------------------


def cmd_validate(args):
    c = _chart(args)
    return {"valid": True, "vertices": c.n_vertices, "walls": c.n_walls, "dimension": c.dimension,
            "validation": c.validation, "hash": cio.chart_hash(c)}


def cmd_median(args):
    c = _chart(args)
    return {"median": c.vertex_ids[median(c, args.x, args.y, args.z)]}


def cmd_interval(args):
    c = _chart(args)
    return {"interval": _ids(c, interval(c, args.x, args.y).members)}


def cmd_hull(args):
    c = _chart(args)
    return {"hull": _ids(c, hull(c, _list(args.vertices)).members)}


def cmd_gate(args):
    c = _chart(args)
    C = convex_set(c, _list(args.set))
    return {"gate": c.vertex_ids[gate(C, args.x)]}


def cmd_bridge(args):
    c = _chart(args)
    b = bridge_decomposition(convex_set(c, _list(args.set1)), convex_set(c, _list(args.set2)))
    return {"shore1": _ids(c, b.shore1), "shore2": _ids(c, b.shore2), "bridge": _ids(c, b.hull.members),
            "interval": _ids(c, b.interval.members), "distance": _w(b.distance),
            "shore_is_point": b.shore_is_point}


def cmd_ssep(args):
    c = _chart(args)
    h1, h2 = Halfspace.parse(c, args.h1), Halfspace.parse(c, args.h2)
    return {"strongly_separated": strongly_separated(c, h1, h2, verify=True)}


def cmd_cr(args):
    c = _chart(args)
    return {"cr": _w(cross_ratio(c, *_list(args.points)))}


def cmd_crt(args):
    c = _chart(args)
    t = crt(c, *_list(args.points))
    return {"crt": [_w(e) for e in t.entries]}


def cmd_gromov(args):
    c = _chart(args)
    return {"gromov": _w(gromov_product(c, args.base, args.x, args.y))}


def cmd_opposite(args):
    c = _chart(args)
    wit = is_opposite(c, args.x, args.y, args.z, witness=True)
    return {"opposite": wit.opposite, "median": c.vertex_ids[wit.median], "conditions": list(wit.conditions)}


def cmd_cutpoints(args):
    c = _chart(args)
    pts = cut_points(c, args.x, args.y)
    for v in interval(c, args.x, args.y).members:
        cut_point_conditions(c, args.x, args.y, v)
    return {"cut_points": _ids(c, pts)}


def cmd_length(args):
    ball = _ball(args)
    g = _element(ball, args.g)
    return _cert_json(ball, translation_length(ball, g, n_max=args.nmax))


def cmd_minset(args):
    ball = _ball(args)
    g = _element(ball, args.g)
    cert = translation_length(ball, g, n_max=args.nmax)
    if cert.transforms:
        raise ChartError("minimal set is only reported on the original chart", cert.transforms)
    M = min_set(ball, g, cert, seed=args.seed_value)
    return {"length": _w(cert.value), "min_set": _ids(ball.chart, M)}


def cmd_tau(args):
    ball = _ball(args)
    names = _list(args.generators) if args.generators else None
    words = {w: list(w.split(".")) if ball.group is None else list(w) for w in _list(args.words or "")}
    tau, reduced = tau_and_reduced(ball, names, words)
    return {"tau": _w(tau), "reduced": {k: _w(v) for k, v in sorted(reduced.items())}}


def cmd_neat(args):
    ball = _ball(args)
    g = _element(ball, args.g)
    wit = neatly_contracting_witness(ball, g)
    if wit is None:
        return {"neat": False}
    c = ball.chart
    return {"neat": True, "h1": wit.h1.label(c), "h2": wit.h2.label(c), "g_h1": wit.g_h1.label(c),
            "gate": c.vertex_ids[wit.gate]}


def cmd_crfromell(args):
    from .actions import cr_from_ell_check
    ball = _ball(args)
    rep = cr_from_ell_check(ball, _element(ball, args.g), _element(ball, args.h), args.nmax)
    return {"s": [_w(x) for x in rep.s], "c": [_w(x) for x in rep.c], "window": rep.window,
            "s_stable": _w(rep.s_stable), "c_stable": _w(rep.c_stable), "agree": rep.agree}


def cmd_extend(args):
    from .extension import brute_force_extensions, extend_full
    X = cio.chart_from_json(cio.load(args.x))
    Y = cio.chart_from_json(cio.load(args.y))
    partial = cio.phi_from_json(cio.load(args.phi), X, Y)
    phi = extend_full(partial)
    out = {"map": {X.vertex_ids[a]: Y.vertex_ids[b] for a, b in sorted(phi.items())}}
    if args.oracle:
        found = brute_force_extensions(partial)
        out["oracle_count"] = len(found)
        out["oracle_agrees"] = found == [phi]
    return out


def cmd_gen(args):
    from . import generators as gen
    kind = args.kind
    if kind == "path":
        return cio.chart_to_json(gen.gen_path(args.n, args.weight))
    if kind == "grid":
        return cio.chart_to_json(gen.gen_grid([int(d) for d in args.dims.split(",")], args.weight))
    if kind == "racg":
        edges = [tuple(e.split("-")) for e in (args.edges or "").split(",") if e]
        spec = gen.RacgSpec(tuple(args.generators.split(",")), tuple(edges), args.radius)
        return cio.ball_to_json(gen.gen_racg_ball(spec))
    if kind == "random":
        return cio.chart_to_json(gen.gen_random_median(args.walls, args.seeds, args.seed_value))
    f = gen.fig1_fixtures()
    return {"left": cio.chart_to_json(f.left), "right": cio.chart_to_json(f.right),
            "left_points": {k: f.left.vertex_ids[v] for k, v in f.left_points.items()},
            "right_points": {k: f.right.vertex_ids[v] for k, v in f.right_points.items()}}


def cmd_quotient(args):
    return cio.chart_to_json(restriction_quotient(_chart(args), _list(args.keep)))


def cmd_subdivide(args):
    return cio.chart_to_json(subdivide(_chart(args), halve=args.halve).chart)


def cmd_product(args):
    a = cio.chart_from_json(cio.load(args.a))
    b = cio.chart_from_json(cio.load(args.b))
    return cio.chart_to_json(product(a, b))


def cmd_reweight(args):
    c = _chart(args)
    if args.scale is not None:
        return cio.chart_to_json(scale(c, cio.parse_weight(args.scale, "--scale")))
    table = cio.load(args.weights)
    if not isinstance(table, dict):
        raise cio.SchemaError("weights file must map wall ids to weights")
    return cio.chart_to_json(reweight(c, {k: cio.parse_weight(v, f"$.{k}") for k, v in table.items()}))


def cmd_accept(args):
    from .acceptance import SUITES, run_acceptance
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_acceptance(n, seed=args.seed_value) for n in names]
    return {"reports": [r.to_json() for r in reports], "passed": all(r.passed for r in reports)}


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubecrux", description="Exact computations on weighted cube complexes.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *opts, help=None):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        sp.add_argument("--seed", type=int, default=0, help="RNG seed (CUBECRUX_SEED overrides)")
        sp.add_argument("--manifest", help="write a run manifest to this path")
        for o in opts:
            sp.add_argument(o, required=True)
        return sp

    add("validate", cmd_validate, "--chart", help="validate a chart")
    add("median", cmd_median, "--chart", "--x", "--y", "--z")
    add("interval", cmd_interval, "--chart", "--x", "--y")
    add("hull", cmd_hull, "--chart", "--vertices")
    add("gate", cmd_gate, "--chart", "--set", "--x")
    add("bridge", cmd_bridge, "--chart", "--set1", "--set2")
    add("ssep", cmd_ssep, "--chart", "--h1", "--h2")
    add("cr", cmd_cr, "--chart", "--points")
    add("crt", cmd_crt, "--chart", "--points")
    add("gromov", cmd_gromov, "--chart", "--base", "--x", "--y")
    add("opposite", cmd_opposite, "--chart", "--x", "--y", "--z")
    add("cutpoints", cmd_cutpoints, "--chart", "--x", "--y")
    for name, fn in (("length", cmd_length), ("minset", cmd_minset)):
        add(name, fn, "--ball", "--g").add_argument("--nmax", type=int, default=64)
    sp = add("tau", cmd_tau, "--ball")
    sp.add_argument("--generators")
    sp.add_argument("--words")
    add("neat", cmd_neat, "--ball", "--g")
    add("crfromell", cmd_crfromell, "--ball", "--g", "--h").add_argument("--nmax", type=int, default=8)
    add("extend", cmd_extend, "--x", "--y", "--phi").add_argument("--oracle", action="store_true")
    sp = add("gen", cmd_gen)
    sp.add_argument("kind", choices=["grid", "path", "racg", "random", "fig1"])
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--dims", default="2,2")
    sp.add_argument("--weight", type=lambda s: cio.parse_weight(s, "--weight"), default=Fraction(1))
    sp.add_argument("--generators", default="a,b,c")
    sp.add_argument("--edges")
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--walls", type=int, default=8)
    sp.add_argument("--seeds", type=int, default=6)
    add("quotient", cmd_quotient, "--chart", "--keep")
    add("subdivide", cmd_subdivide, "--chart").add_argument("--halve", action="store_true")
    add("product", cmd_product, "--a", "--b")
    sp = add("reweight", cmd_reweight, "--chart")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--weights")
    grp.add_argument("--scale")
    add("accept", cmd_accept).add_argument("suite")
    return p


_FILE_ARGS = ("chart", "ball", "x", "y", "phi", "a", "b", "weights")


def _input_digests(args) -> dict:
    out = {}
    for k in _FILE_ARGS:
        path = getattr(args, k, None)
        if isinstance(path, str) and os.path.isfile(path):
            with open(path, "rb") as fh:
                out[k] = hashlib.sha256(fh.read()).hexdigest()
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.seed_value = _seed(args)
    try:
        result = args.fn(args)
        code = 0
        if args.command == "accept" and not result["passed"]:
            code = 1
    except ChartError as err:
        result = {"error": getattr(err, "code", type(err).__name__), "type": type(err).__name__,
                  "message": str(err)}
        code = 1
    except (KeyError, ValueError) as err:
        result = {"error": "bad-argument", "type": type(err).__name__, "message": str(err)}
        code = 2
    text = cio.dumps(result)
    print(text)
    if args.manifest:
        man = RunManifest(args.command, _input_digests(args), args.seed_value, __version__, cio.digest(text))
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(cio.dumps(asdict(man)) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
