import random

from glal.bisim import (
    distinguishing_formula_search,
    max_bisim,
    pointed_bisim,
    verify_bisim,
)
from glal.fuzz import duplicate_worlds, random_formula, random_model
from glal.model import KripkeModel, PointedModel
from glal.semantics import EvalContext, check
from glal.scenarios import bit_channel
from glal.syntax import depth, print_formula


def channel_points():
    n = bit_channel("N")
    np = bit_channel("Nprime")
    return PointedModel(n, "w1"), PointedModel(np, "w1")


def test_modal_bisim_channel():
    n, np = bit_channel("N"), bit_channel("Nprime")
    relation = max_bisim(n, np, "modal")
    assert relation == frozenset(
        {("w1", "v1"), ("w1", "w1"), ("w2", "v2"), ("w2", "w2")}
    )


def test_plusminus_separates_channel():
    n, np = bit_channel("N"), bit_channel("Nprime")
    assert max_bisim(n, np, "plusminus") == frozenset()
    result = pointed_bisim(*channel_points(), "plusminus")
    assert not result.related
    assert result.fail_reason.condition in ("Forth", "Back", "Reach")


def test_collective_relates_channel():
    result = pointed_bisim(*channel_points(), "collective", total=True)
    assert result.related
    assert verify_bisim(bit_channel("N"), bit_channel("Nprime"),
                        result.witness, "collective") == []


def test_self_bisim_contains_identity():
    rng = random.Random(3)
    for _ in range(15):
        m = random_model(rng, rng.randint(2, 5), ["a", "b"], ["p"])
        for kind in ("modal", "plusminus", "collective"):
            relation = max_bisim(m, m, kind)
            assert {(w, w) for w in m.worlds} <= relation


def test_witnesses_verify():
    n, np = bit_channel("N"), bit_channel("Nprime")
    for kind in ("modal", "collective"):
        relation = max_bisim(n, np, kind)
        assert verify_bisim(n, np, relation, kind) == []
    rng = random.Random(9)
    for _ in range(20):
        m = random_model(rng, 4, ["a", "b"], ["p"])
        ext, _ = duplicate_worlds(rng, m, copies=1)
        res = pointed_bisim(PointedModel(m, m.worlds[0]),
                            PointedModel(ext, m.worlds[0]), "plusminus")
        assert res.related
        assert verify_bisim(m, ext, res.witness, "plusminus") == []


def test_plusminus_implies_modal_and_collective():
    rng = random.Random(14)
    for _ in range(25):
        m = random_model(rng, rng.randint(2, 4), ["a", "b"], ["p"])
        ext, twins = duplicate_worlds(rng, m, copies=1)
        modal = max_bisim(m, ext, "modal")
        coll = max_bisim(m, ext, "collective")
        for w in m.worlds:
            res = pointed_bisim(PointedModel(m, w), PointedModel(ext, w), "plusminus")
            if res.related:
                assert (w, w) in modal and (w, w) in coll
                assert res.witness <= modal
                assert res.witness <= coll


def test_total_flag_detects_unmatched_world():
    left = KripkeModel.from_partitions(["w"], ["a"], {}, {"p": ["w"]})
    right = KripkeModel.from_partitions(
        ["w", "x"], ["a"], {"a": [["w"], ["x"]]}, {"p": ["w"], "q": ["x"]}
    )
    pointwise = pointed_bisim(PointedModel(left, "w"), PointedModel(right, "w"), "modal")
    assert pointwise.related
    total = pointed_bisim(PointedModel(left, "w"), PointedModel(right, "w"),
                          "modal", total=True)
    assert not total.related


def test_distinguishing_formula_on_channel():
    p, q = channel_points()
    f = distinguishing_formula_search(p, q, 5)
    assert f is not None
    assert depth(f) <= 5
    assert check(p, f) and not check(q, f)


def test_distinguishing_formula_identical_models():
    n = bit_channel("N")
    assert distinguishing_formula_search(
        PointedModel(n, "w1"), PointedModel(n, "w1"), 4
    ) is None


def test_distinguishing_epistemic_for_modal_inequivalent():
    a = KripkeModel.from_partitions(["u1", "u2"], ["a"], {"a": [["u1", "u2"]]},
                                    {"p": ["u1"]})
    b = KripkeModel.from_partitions(["u1", "u2"], ["a"], {"a": [["u1"], ["u2"]]},
                                    {"p": ["u1"]})
    f = distinguishing_formula_search(PointedModel(a, "u1"), PointedModel(b, "u1"), 3,
                                      operators="epistemic")
    assert f is not None, "modal-inequivalent pair must have an epistemic distinguisher"
    assert check(PointedModel(a, "u1"), f) and not check(PointedModel(b, "u1"), f)


def test_modal_related_pairs_agree_on_epistemic_formulas():
    rng = random.Random(21)
    ctx = EvalContext()
    for _ in range(10):
        m = random_model(rng, 4, ["a", "b"], ["p"])
        ext, _ = duplicate_worlds(rng, m, copies=1)
        relation = max_bisim(m, ext, "modal")
        for (w, w2) in sorted(relation):
            for _ in range(10):
                f = random_formula(rng, 4, ["p"], ["a", "b"], fragment="epistemic")
                assert check(PointedModel(m, w), f, context=ctx) == check(
                    PointedModel(ext, w2), f, context=ctx
                ), print_formula(f)
