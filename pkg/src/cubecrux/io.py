"""JSON formats for charts, actions, balls and partial maps.

Weights are written as integer strings or ``"p/q"``; decimal strings are
accepted on input.  ``dumps`` produces the canonical form: keys sorted, no
insignificant whitespace, walls and vertices in chart order.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .actions import AutomorphismChart, BallChart
from .core import ChartError, ComplexChart, as_weight, make_chart


class SchemaError(ChartError):
    code = "schema-error"

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}", path)
        self.path = path


def format_weight(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_weight(text, path: str = "$") -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise SchemaError("weight must be a string or integer", path)
    try:
        return as_weight(Fraction(text))
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise SchemaError(f"bad weight {text!r}: {err}", path) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    text = obj if isinstance(obj, str) else dumps(obj)
    return hashlib.sha256(text.encode()).hexdigest()


def _need(obj, key, kind, path):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    if key not in obj:
        raise SchemaError(f"missing key {key!r}", path)
    val = obj[key]
    if not isinstance(val, kind):
        raise SchemaError(f"{key!r} has the wrong type", f"{path}.{key}")
    return val


# -- charts ---------------------------------------------------------------------


def chart_to_json(chart: ComplexChart) -> dict:
    return {
        "hyperplanes": [{"id": w, "weight": format_weight(x)} for w, x in zip(chart.wall_ids, chart.weights)],
        "vertices": [{"id": v, "signs": chart.signs(i)} for i, v in enumerate(chart.vertex_ids)],
    }


def chart_from_json(obj: dict, *, check: bool = True) -> ComplexChart:
    hyper = _need(obj, "hyperplanes", list, "$")
    verts = _need(obj, "vertices", list, "$")
    walls, weights = [], []
    for i, h in enumerate(hyper):
        p = f"$.hyperplanes[{i}]"
        walls.append(_need(h, "id", str, p))
        weights.append(parse_weight(_need(h, "weight", (str, int), p), f"{p}.weight"))
    ids, signs = [], []
    for i, v in enumerate(verts):
        p = f"$.vertices[{i}]"
        ids.append(_need(v, "id", str, p))
        s = _need(v, "signs", dict, p)
        for w, val in s.items():
            if val not in ("+", "-"):
                raise SchemaError(f"sign must be '+' or '-', got {val!r}", f"{p}.signs.{w}")
        extra = set(s) - set(walls)
        if extra:
            raise SchemaError(f"unknown walls {sorted(extra)}", f"{p}.signs")
        missing = set(walls) - set(s)
        if missing:
            raise SchemaError(f"missing walls {sorted(missing)}", f"{p}.signs")
        signs.append(s)
    # weights are checked by the chart validator, which raises NonPositiveWeight
    return make_chart(walls, signs, weights, ids, check=check)


def chart_hash(chart: ComplexChart) -> str:
    return digest(chart_to_json(chart))


def to_dot(chart: ComplexChart, name: str = "chart") -> str:
    """Graphviz source of the 1-skeleton, edges labelled by wall id and weight."""
    lines = [f"graph {json.dumps(name)} {{"]
    for v in chart.vertex_ids:
        lines.append(f"  {json.dumps(v)};")
    for x, y, w in chart.edges:
        label = f"{chart.wall_ids[w]} ({format_weight(chart.weights[w])})"
        lines.append(f"  {json.dumps(chart.vertex_ids[x])} -- {json.dumps(chart.vertex_ids[y])} "
                     f"[label={json.dumps(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- actions and balls -------------------------------------------------------------


def action_to_json(auto: AutomorphismChart) -> dict:
    ids, tids = auto.chart.vertex_ids, auto.target.vertex_ids
    dom = sorted(auto.mapping)
    return {"domain": [ids[v] for v in dom], "map": {ids[v]: tids[auto.mapping[v]] for v in dom}}


def action_from_json(obj: dict, chart: ComplexChart, name: str = "g", path: str = "$") -> AutomorphismChart:
    from .actions import validate_automorphism
    domain = _need(obj, "domain", list, path)
    mp = _need(obj, "map", dict, path)
    if set(domain) != set(mp):
        raise SchemaError("domain and map keys differ", path)
    try:
        pairs = {chart.vid(k): chart.vid(v) for k, v in mp.items()}
    except KeyError as err:
        raise SchemaError(f"unknown vertex {err}", f"{path}.map") from None
    return validate_automorphism(chart, pairs, name=name)


def ball_to_json(ball: BallChart) -> dict:
    out = chart_to_json(ball.chart)
    out["basepoint"] = ball.chart.vertex_ids[ball.basepoint]
    out["radius"] = format_weight(ball.radius)
    out["complete_radius"] = format_weight(ball.complete_radius)
    out["dimension"] = ball.dimension
    out["generators"] = {k: action_to_json(g) for k, g in sorted(ball.generators.items())}
    if ball.group is not None:
        G = ball.group
        edges = sorted((G.names[i], G.names[j]) for i in range(G.rank) for j in range(i + 1, G.rank)
                       if G.commutes[i][j])
        spec = {"generators": list(G.names), "edges": [list(e) for e in edges]}
        if ball.letter_weights is not None:
            spec["weights"] = {G.names[i]: format_weight(x) for i, x in enumerate(ball.letter_weights)}
        out["racg"] = spec
    return out


def ball_from_json(obj: dict) -> BallChart:
    """Rebuild a ball; Coxeter balls are regenerated and compared with the stored chart."""
    if "racg" in obj:
        from .generators import RacgSpec, gen_racg_ball
        spec = obj["racg"]
        gens = _need(spec, "generators", list, "$.racg")
        edges = [tuple(e) for e in _need(spec, "edges", list, "$.racg")]
        weights = spec.get("weights")
        radius = _need(obj, "radius", (str, int), "$")
        r = parse_weight(radius, "$.radius")
        if weights:
            weights = {k: parse_weight(v, f"$.racg.weights.{k}") for k, v in weights.items()}
            r = r / max(weights.values())
        if r.denominator != 1:
            raise SchemaError("Coxeter ball radius must be a whole number of steps", "$.radius")
        ball = gen_racg_ball(RacgSpec(tuple(gens), tuple(edges), int(r), weights))
        if dumps(chart_to_json(ball.chart)) != dumps({k: obj[k] for k in ("hyperplanes", "vertices")}):
            raise SchemaError("stored chart differs from the regenerated Coxeter ball", "$")
        return ball
    chart = chart_from_json(obj)
    base = _need(obj, "basepoint", str, "$")
    radius = parse_weight(_need(obj, "radius", (str, int), "$"), "$.radius")
    complete = parse_weight(obj.get("complete_radius", format_weight(radius)), "$.complete_radius")
    dim = obj.get("dimension")
    if dim is None:
        dim = chart.dimension
    gens = {}
    for k, a in obj.get("generators", {}).items():
        gens[k] = action_from_json(a, chart, k, f"$.generators.{k}")
    ball = BallChart(chart, chart.vid(base), radius, complete, int(dim), gens)
    for v in range(chart.n_vertices):
        if ball.distance_from_base(v) > radius:
            raise SchemaError(f"vertex {chart.vertex_ids[v]} lies outside the declared radius", "$.radius")
    return ball


def phi_from_json(obj: dict, X: ComplexChart, Y: ComplexChart):
    from .extension import PartialIsometry
    pairs = _need(obj, "pairs", list, "$")
    out = {}
    for i, p in enumerate(pairs):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p)):
            raise SchemaError("pair must be two vertex ids", f"$.pairs[{i}]")
        try:
            out[X.vid(p[0])] = Y.vid(p[1])
        except KeyError as err:
            raise SchemaError(f"unknown vertex {err}", f"$.pairs[{i}]") from None
    return PartialIsometry(X, Y, out)


def phi_to_json(partial) -> dict:
    return {"pairs": [[a, b] for a, b in partial.ids().items()]}


def load(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"invalid JSON: {err}", "$") from None
