import json
import random
from fractions import Fraction

import pytest

from helpers import gerbe_family
from gerbecalc.cohomology import cohomology_group
from gerbecalc.complex import SimplicialMap, build_complex, example_complex
from gerbecalc.deligne import connect
from gerbecalc.errors import FormatError
from gerbecalc.gerbe import random_gauge
from gerbecalc.lifting import FiniteGroup, random_bundle, standard_extensions
from gerbecalc.serialize import (
    bundle_from_json,
    bundle_to_json,
    complex_from_json,
    complex_to_json,
    deligne_from_json,
    deligne_to_json,
    dumps,
    extension_from_json,
    extension_to_json,
    gerbe_from_json,
    gerbe_to_json,
    map_from_json,
    map_to_json,
    rational_from_json,
    trivialization_from_json,
    trivialization_to_json,
)


def reload(doc):
    return json.loads(dumps(doc))


@pytest.mark.parametrize("name", ["sphere3", "rp2", "torus2", "rp2_x_s1"])
def test_complex_round_trip(name):
    k = example_complex(name)
    doc = complex_to_json(k)
    assert complex_from_json(reload(doc)) == k
    assert dumps(complex_to_json(complex_from_json(doc))) == dumps(doc)


@pytest.mark.parametrize("name", ["sphere3", "rp2_x_s1"])
def test_gerbe_and_deligne_round_trip(name):
    k = example_complex(name)
    for g in gerbe_family(k, random.Random(3)):
        assert gerbe_from_json(reload(gerbe_to_json(g))) == g
    d = connect(gerbe_family(k, random.Random(3))[1])
    assert deligne_from_json(reload(deligne_to_json(d))) == d
    h = random_gauge(k, random.Random(1))
    assert trivialization_from_json(reload(trivialization_to_json(h))) == h


def test_permuted_keys_are_reoriented():
    k = example_complex("sphere3")
    g = gerbe_family(k, random.Random(0))[1]
    doc = gerbe_to_json(g)
    key = next(iter(doc["data"]))
    a, b, c = key.split(",")
    entry = doc["data"].pop(key)
    neg = {"theta": {v: str(-Fraction(x)) for v, x in entry["theta"].items()},
           "winding": {",".join(reversed(e.split(","))): w for e, w in entry["winding"].items()}}
    doc["data"][f"{b},{a},{c}"] = neg
    assert gerbe_from_json(doc) == g


def test_group_extension_and_bundle_round_trip():
    V4 = FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    k = example_complex("torus2")
    for e in standard_extensions(V4):
        assert extension_from_json(reload(extension_to_json(e))) == e
    b = random_bundle(k, V4, random.Random(2))
    assert bundle_from_json(reload(bundle_to_json(b)), V4) == b


def test_map_round_trip():
    k = example_complex("sphere3")
    phi = SimplicialMap(k, k, (1, 0, 2, 3, 4))
    back = map_from_json(reload(map_to_json(phi)))
    assert back.vertex_map == phi.vertex_map and back.source == k


def test_string_labels():
    k = build_complex([("a", "b", "c"), ("b", "c", "d")])
    assert complex_from_json(reload(complex_to_json(k))) == k


@pytest.mark.parametrize("doc,key", [
    ({"vertices": [0, 1]}, "maximal_simplices"),
    ({"vertices": [0, 1], "maximal_simplices": [[0, 2]]}, "maximal_simplices"),
    ({"vertices": [0, [1]], "maximal_simplices": []}, "vertices[1]"),
    ({"vertices": [0, 1], "maximal_simplices": [[]]}, "maximal_simplices[0]"),
])
def test_complex_format_errors(doc, key):
    with pytest.raises(FormatError) as err:
        complex_from_json(doc)
    assert err.value.key == key


def test_gerbe_format_errors_name_the_key():
    k = example_complex("sphere3")
    base = {"complex": complex_to_json(k)}
    cases = [
        ({"0,1,2": {"theta": {"0": "1/x"}}}, "data.0,1,2.theta.0"),
        ({"0,1,9": {}}, "data.0,1,9"),
        ({"0,1": {}}, "data.0,1"),
        ({"0,1,2": {"winding": {"0,1": "1/2"}}}, "data.0,1,2.winding.0,1"),
        ({"0,1,2": {"colour": {}}}, "data.0,1,2.colour"),
        ({"0,1,2": {"theta": {"0": True}}}, "data.0,1,2.theta.0"),
    ]
    for data, key in cases:
        with pytest.raises(FormatError) as err:
            gerbe_from_json(dict(base, data=data))
        assert err.value.key == key
    with pytest.raises(FormatError) as err:
        gerbe_from_json({"data": {}})
    assert err.value.key == "complex"


def test_rationals():
    assert rational_from_json("3/6", "x") == Fraction(1, 2)
    assert rational_from_json("4", "x") == 4 and isinstance(rational_from_json("4", "x"), int)
    with pytest.raises(FormatError):
        rational_from_json("1/0", "x")
    with pytest.raises(FormatError):
        rational_from_json(0.5, "x")


def test_output_is_canonical():
    k = example_complex("rp2_x_s1")
    g = gerbe_family(k, random.Random(0))[1]
    text = dumps(gerbe_to_json(g))
    assert text == dumps(gerbe_to_json(gerbe_from_json(json.loads(text))))
    assert cohomology_group(k, 3) is cohomology_group(complex_from_json(json.loads(text)["complex"]), 3)
