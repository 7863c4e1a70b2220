import json
import random

import pytest

from glal.errors import FormatError, InvalidModel, UnknownAgent, UnknownWorld
from glal.fuzz import random_model
from glal.model import (
    KripkeModel,
    PointedModel,
    common_closure,
    exact_profile,
    load,
    neighborhood,
    save,
    union_reach,
    validate,
)
from glal.scenarios import bit_channel, muddy


def test_neighborhood_muddy():
    m = muddy(3)
    assert neighborhood(m, "r", "100") == {"100", "000"}
    assert neighborhood(m, "g", "110") == {"110", "100"}


def test_neighborhood_contains_world():
    rng = random.Random(1)
    for _ in range(20):
        m = random_model(rng, 4, ["a", "b"], ["p"])
        for a in m.agents:
            classes = set()
            for w in m.worlds:
                cls = neighborhood(m, a, w)
                assert w in cls
                classes.add(cls)
            # classes partition the worlds
            seen = [w for cls in classes for w in cls]
            assert sorted(seen) == sorted(m.worlds)


def test_neighborhood_channel_eavesdropper():
    n = bit_channel("N")
    assert neighborhood(n, "e", "w1") == {"w1", "w2"}


def test_neighborhood_errors():
    m = muddy(2)
    with pytest.raises(UnknownAgent):
        neighborhood(m, "z", "00")
    with pytest.raises(UnknownWorld):
        neighborhood(m, "r", "0000")


def test_common_closure_connected_cube():
    m = muddy(3)
    for w in m.worlds:
        assert common_closure(m, ["r", "g", "b"], w) == set(m.worlds)


def test_common_closure_empty_coalition():
    m = muddy(3)
    assert common_closure(m, [], "101") == {"101"}


def test_common_closure_channel():
    np = bit_channel("Nprime")
    assert common_closure(np, ["r"], "w1") == {"w1", "w2"}


def test_union_reach_example():
    m = muddy(3)
    assert union_reach(m, ["r", "b"], "100") == {"100", "000", "101"}
    assert union_reach(m, [], "100") == set()
    assert union_reach(m, ["r"], "100") == neighborhood(m, "r", "100")


def test_common_closure_is_union_reach_fixpoint():
    rng = random.Random(5)
    for _ in range(20):
        m = random_model(rng, 5, ["a", "b"], ["p"])
        coalition = ["a", "b"]
        for w in m.worlds:
            reach = {w}
            while True:
                step = set(reach)
                for v in reach:
                    step |= union_reach(m, coalition, v)
                if step == reach:
                    break
                reach = step
            assert common_closure(m, coalition, w) == reach


def test_exact_profile():
    m = muddy(2)
    for w in m.worlds:
        assert exact_profile(m, w, w) == set(m.agents)
    np = bit_channel("Nprime")
    assert exact_profile(np, "v1", "w1") == {"s", "e"}
    n = bit_channel("N")
    assert exact_profile(n, "w1", "w2") == {"r", "e"}


def test_validate_clean_models():
    assert validate(muddy(3)) == []
    assert validate(bit_channel("Nprime")) == []


def test_validate_missing_reflexive():
    m = KripkeModel(("w1", "w2"), ("a",), (frozenset({("w1", "w2")}),), ())
    kinds = {(v.kind, v.witness) for v in validate(m)}
    assert ("reflexivity", ("w1", "w1")) in kinds
    assert ("symmetry", ("w1", "w2")) in kinds


def test_validate_missing_symmetry():
    m = KripkeModel(
        ("w1", "w2"),
        ("a",),
        (frozenset({("w1", "w1"), ("w2", "w2"), ("w1", "w2")}),),
        (),
    )
    assert ("symmetry", ("w1", "w2")) in {(v.kind, v.witness) for v in validate(m)}


def test_validate_intransitive():
    m = KripkeModel.from_pairs(
        ["w1", "w2", "w3"], ["a"], {"a": [("w1", "w2"), ("w2", "w3")]}
    )
    assert any(v.kind == "transitivity" for v in validate(m))


def test_validate_matches_bruteforce_scan():
    # independent oracle: scan all pairs/triples directly on the pair sets
    rng = random.Random(17)
    for _ in range(30):
        worlds = ["w1", "w2", "w3"]
        pairs = set()
        for u in worlds:
            for v in worlds:
                if rng.random() < 0.4:
                    pairs.add((u, v))
        m = KripkeModel(tuple(worlds), ("a",), (frozenset(pairs),), ())
        expected_clean = (
            all((w, w) in pairs for w in worlds)
            and all((v, u) in pairs for (u, v) in pairs)
            and all(
                (u, w) in pairs
                for (u, v) in pairs
                for (v2, w) in pairs
                if v2 == v
            )
        )
        assert (validate(m) == []) == expected_clean


def test_save_channel_partitions():
    obj = json.loads(save(bit_channel("N")))
    assert obj["relations"] == {
        "s": {"partition": [["w1"], ["w2"]]},
        "r": {"partition": [["w1", "w2"]]},
        "e": {"partition": [["w1", "w2"]]},
    }
    assert obj["valuation"] == {"bit0": ["w1"]}


def test_load_save_round_trip():
    for m in (muddy(3), bit_channel("N"), bit_channel("Nprime")):
        assert load(save(m)) == m


def test_load_save_round_trip_fuzz():
    rng = random.Random(23)
    for _ in range(25):
        m = random_model(rng, rng.randint(1, 5), ["a", "b"], ["p", "q"])
        assert load(save(m)) == m


def test_load_rejects_world_in_two_cells():
    text = json.dumps({
        "worlds": ["w1", "w2"],
        "agents": ["a"],
        "relations": {"a": {"partition": [["w1", "w2"], ["w2"]]}},
        "valuation": {},
    })
    with pytest.raises(FormatError):
        load(text)


def test_load_pairs_closes_symmetry_not_transitivity():
    good = json.dumps({
        "worlds": ["w1", "w2"],
        "agents": ["a"],
        "relations": {"a": {"pairs": [["w1", "w2"]]}},
        "valuation": {},
    })
    m = load(good)
    assert neighborhood(m, "a", "w2") == {"w1", "w2"}

    intransitive = json.dumps({
        "worlds": ["w1", "w2", "w3"],
        "agents": ["a"],
        "relations": {"a": {"pairs": [["w1", "w2"], ["w2", "w3"]]}},
        "valuation": {},
    })
    with pytest.raises(InvalidModel) as exc:
        load(intransitive)
    assert any(v.kind == "transitivity" for v in exc.value.violations)


def test_load_schema_errors():
    with pytest.raises(FormatError):
        load("not json")
    with pytest.raises(FormatError):
        load(json.dumps({"worlds": ["w"]}))
    with pytest.raises(FormatError):
        load(json.dumps({
            "worlds": ["w"], "agents": ["a"],
            "relations": {"b": {"partition": [["w"]]}}, "valuation": {},
        }))
    with pytest.raises(FormatError):
        load(json.dumps({
            "worlds": ["w"], "agents": ["a"],
            "relations": {}, "valuation": {"p": ["nope"]},
        }))


def test_missing_relation_defaults_to_identity():
    m = load(json.dumps({"worlds": ["w1", "w2"], "agents": ["a"], "valuation": {}}))
    assert neighborhood(m, "a", "w1") == {"w1"}


def test_pointed_model_checks_point():
    with pytest.raises(UnknownWorld):
        PointedModel(muddy(2), "99")


def test_save_is_deterministic():
    assert save(muddy(3)) == save(muddy(3))
    m1 = KripkeModel.from_partitions(["b", "a"], ["y", "x"], {}, {"p": ["b", "a"]})
    m2 = KripkeModel.from_partitions(["a", "b"], ["x", "y"], {}, {"p": ["a", "b"]})
    assert save(m1) == save(m2)
