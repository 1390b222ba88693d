import json
import math

import numpy as np
import pytest

from jra.instance import (
    Instance,
    InstanceError,
    NonConnectableError,
    dumps,
    generate,
    load,
    loads,
    save,
)


def test_generate_is_pure_in_seed():
    a = generate(30, seed=4)
    b = generate(30, seed=4)
    assert a == b
    assert dumps(a) == dumps(b)
    assert generate(30, seed=5) != a


def test_generate_respects_area():
    inst = generate(200, seed=1, area=4.0)
    assert inst.coords().min() >= 0.0
    assert inst.coords().max() <= 2.0


def test_node_roles():
    inst = generate(5, 0)
    assert inst.goal_item == 5 and inst.start_placeholder == 10
    assert inst.is_item(1) and inst.is_item(5) and not inst.is_item(6)
    assert inst.is_placeholder(6) and inst.is_placeholder(10) and not inst.is_placeholder(11)
    with pytest.raises(InstanceError):
        inst.coord(11)


def test_cost_is_euclidean_and_symmetric():
    inst = Instance([[0, 0], [1, 0]], [[3, 4], [1, 1]])
    assert inst.cost(1, 3) == 5.0
    assert inst.cost(3, 1) == 5.0
    assert inst.cost_matrix()[0, 0] == 5.0
    assert inst.cost_matrix()[1, 1] == 1.0


def test_same_side_pairs_rejected():
    inst = generate(3, 0)
    with pytest.raises(NonConnectableError):
        inst.cost(1, 2)
    with pytest.raises(NonConnectableError):
        inst.cost(4, 5)


def test_arrays_are_read_only():
    inst = generate(3, 0)
    with pytest.raises(ValueError):
        inst.items[0, 0] = 9.0


def test_json_round_trip_is_byte_stable(tmp_path):
    inst = generate(25, seed=9, area=2.0, fixed_pair=False)
    p = tmp_path / "i.json"
    save(inst, p)
    first = p.read_bytes()
    back = load(p)
    assert back == inst
    save(back, p)
    assert p.read_bytes() == first


def test_schema_fields():
    d = json.loads(dumps(generate(3, 0)))
    assert set(d) == {"n", "items", "placeholders", "fixed_pair", "area"}
    assert len(d["items"]) == 3 and len(d["items"][0]) == 2


def test_placeholder_count_mismatch():
    d = {"n": 3, "items": [[0, 0], [1, 1], [2, 2]], "placeholders": [[0, 1], [1, 0]]}
    with pytest.raises(InstanceError, match="placeholder count"):
        loads(json.dumps(d))


def test_nan_coordinate_rejected():
    text = '{"n": 2, "items": [[0, 0], [NaN, 1]], "placeholders": [[0, 1], [1, 0]]}'
    with pytest.raises(InstanceError, match="non-finite"):
        loads(text)
    with pytest.raises(InstanceError, match="non-finite"):
        Instance([[0, 0], [math.inf, 1]], [[0, 1], [1, 0]])


@pytest.mark.parametrize(
    "text",
    ["[1, 2]", "{", '{"n": 2}', '{"n": "2", "items": [], "placeholders": []}'],
)
def test_malformed_json(text):
    with pytest.raises(InstanceError):
        loads(text)


def test_too_small():
    with pytest.raises(InstanceError):
        generate(1)
    with pytest.raises(InstanceError):
        Instance(np.zeros((1, 2)), np.zeros((1, 2)))
