import json
from fractions import Fraction

import pytest

from cubecrux import io as cio
from cubecrux.core import NonPositiveWeight
from cubecrux.extension import PartialIsometry
from cubecrux.generators import gen_grid, gen_line_ball, pentagon_ball, tree_ball

SQUARE = {
    "hyperplanes": [{"id": "a", "weight": "1"}, {"id": "b", "weight": "3/2"}],
    "vertices": [
        {"id": "00", "signs": {"a": "-", "b": "-"}},
        {"id": "10", "signs": {"a": "+", "b": "-"}},
        {"id": "01", "signs": {"a": "-", "b": "+"}},
        {"id": "11", "signs": {"a": "+", "b": "+"}},
    ],
}


def test_square_parses():
    c = cio.chart_from_json(SQUARE)
    assert c.n_vertices == 4 and c.weights == (Fraction(1), Fraction(3, 2))
    assert c.distance(c.vid("00"), c.vid("11")) == Fraction(5, 2)
    assert cio.chart_from_json(json.loads(cio.dumps(cio.chart_to_json(c)))) .masks == c.masks


def test_weights():
    assert cio.parse_weight("0.25") == Fraction(1, 4)
    assert cio.parse_weight(3) == 3
    assert cio.format_weight(Fraction(6, 4)) == "3/2"
    bad = json.loads(json.dumps(SQUARE))
    bad["hyperplanes"][0]["weight"] = "0"
    with pytest.raises(NonPositiveWeight):
        cio.chart_from_json(bad)
    with pytest.raises(cio.SchemaError):
        cio.parse_weight("x")


@pytest.mark.parametrize("mutate,path", [
    (lambda o: o["vertices"][1]["signs"].update(a="?"), "$.vertices[1].signs.a"),
    (lambda o: o["vertices"][2]["signs"].pop("b"), "$.vertices[2].signs"),
    (lambda o: o["hyperplanes"][0].pop("id"), "$.hyperplanes[0]"),
    (lambda o: o.pop("vertices"), "$"),
])
def test_schema_paths(mutate, path):
    obj = json.loads(json.dumps(SQUARE))
    mutate(obj)
    with pytest.raises(cio.SchemaError) as info:
        cio.chart_from_json(obj)
    assert info.value.path == path


@pytest.mark.parametrize("ball", [tree_ball(3), pentagon_ball(2), gen_line_ball(4, Fraction(1, 2))],
                         ids=["tree", "pentagon", "line"])
def test_ball_round_trip(ball):
    text = cio.dumps(cio.ball_to_json(ball))
    back = cio.ball_from_json(json.loads(text))
    assert cio.dumps(cio.ball_to_json(back)) == text


def test_tampered_coxeter_ball_rejected():
    obj = cio.ball_to_json(tree_ball(2))
    obj["vertices"] = obj["vertices"][:-1]
    with pytest.raises(cio.SchemaError):
        cio.ball_from_json(obj)


def test_dot_labels():
    c = cio.chart_from_json(SQUARE)
    dot = cio.to_dot(c)
    assert dot.startswith('graph "chart" {')
    assert dot.count(" -- ") == 4
    assert '[label="b (3/2)"]' in dot


def test_phi_round_trip():
    g = gen_grid([1, 1])
    part = cio.phi_from_json({"pairs": [["0,0", "1,1"], ["0,1", "1,0"]]}, g, g)
    assert isinstance(part, PartialIsometry)
    assert cio.phi_to_json(part) == {"pairs": [["0,0", "1,1"], ["0,1", "1,0"]]}
    with pytest.raises(cio.SchemaError):
        cio.phi_from_json({"pairs": [["0,0", "9,9"]]}, g, g)


def test_hash_is_stable():
    c = cio.chart_from_json(SQUARE)
    assert cio.chart_hash(c) == cio.digest(cio.dumps(cio.chart_to_json(c)))
    assert len(cio.chart_hash(c)) == 64
