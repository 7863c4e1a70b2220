import random

import pytest

from glal.errors import BoundExceeded
from glal.fuzz import random_formula
from glal.sat import (
    SatQuery,
    bell_number,
    estimated_candidates,
    partitions_as_cells,
    restricted_growth_strings,
    sat_bounded,
    valid_bounded,
)
from glal.semantics import check
from glal.syntax import parse


def test_restricted_growth_counts_match_bell_numbers():
    for n in range(1, 7):
        assert len(list(restricted_growth_strings(n))) == bell_number(n)


def test_partitions_as_cells_distinct():
    parts = list(partitions_as_cells(4))
    assert len(parts) == 15
    assert len(set(parts)) == 15
    for cells in parts:
        members = sorted(i for cell in cells for i in cell)
        assert members == [0, 1, 2, 3]


def test_moore_formula_satisfiable():
    result = sat_bounded(SatQuery(parse("p & !K{a} p"), max_worlds=4))
    assert result.satisfiable
    assert len(result.witness.model.worlds) == 2
    assert check(result.witness, parse("p & !K{a} p"))


def test_contradiction_unsat_at_every_bound():
    for bound in (1, 2, 3):
        result = sat_bounded(SatQuery(parse("p & !p"), max_worlds=bound))
        assert result.status == "unsat-up-to-bound"


def test_vacuous_announcement_satisfiable():
    result = sat_bounded(SatQuery(parse("[p]{a} K{a} p & !p"), max_worlds=3))
    assert result.satisfiable
    assert check(result.witness, parse("[p]{a} K{a} p & !p"))


def test_reduction_law_valid():
    result = valid_bounded(parse("[p]-{a,b} q <-> (p -> q)"), 4)
    assert result.valid


def test_axiom_t_counterexample_within_two_worlds():
    result = valid_bounded(parse("[p]{a} q -> q"), 2)
    assert result.status == "counterexample"
    cex = result.counterexample
    assert check(cex, parse("[p]{a} q")) and not check(cex, parse("q"))


def test_tautology_valid():
    assert valid_bounded(parse("true"), 2).valid


def test_axiom_b_counterexample():
    moore = "(p & !K{a} p)"
    probe = parse(f"{moore} & !([p]{{a}} <p>{{a}} {moore})")
    result = sat_bounded(SatQuery(probe, max_worlds=4))
    assert result.satisfiable
    assert len(result.witness.model.worlds) <= 4
    assert check(result.witness, probe)


def test_witness_is_deterministic():
    q = SatQuery(parse("p & !K{a} p"), max_worlds=3)
    first = sat_bounded(q)
    second = sat_bounded(q)
    assert first.witness == second.witness
    assert first.models_examined == second.models_examined


def test_max_worlds_cap():
    with pytest.raises(BoundExceeded):
        SatQuery(parse("p"), max_worlds=7)
    with pytest.warns(UserWarning):
        SatQuery(parse("p"), max_worlds=7, allow_large=True)


def test_budget_estimate_guard():
    with pytest.raises(BoundExceeded):
        sat_bounded(SatQuery(parse("p & K{a} K{b} K{c} q"), max_worlds=6, budget=1000))
    assert estimated_candidates(3, 2, 2) == 1 * 4 + 4 * 16 + 25 * 64


def test_iso_pruning_soundness():
    rng = random.Random(123)
    agreements = 0
    for _ in range(200):
        n_agents = rng.randint(1, 2)
        agents = ("a", "b")[:n_agents]
        atoms = ("p", "q")[: rng.randint(1, 2)]
        f = random_formula(rng, 3, atoms, agents)
        pruned = sat_bounded(SatQuery(f, max_worlds=3, agents=agents, atoms=atoms))
        full = sat_bounded(SatQuery(f, max_worlds=3, agents=agents, atoms=atoms,
                                    prune_isomorphic=False))
        assert pruned.status == full.status
        assert pruned.models_examined == full.models_examined  # counts candidates
        agreements += 1
    assert agreements == 200


def test_bound_raise_keeps_status_stable_on_epistemic_fragment():
    rng = random.Random(321)
    for _ in range(40):
        f = random_formula(rng, 3, ["p"], ["a"], fragment="epistemic")
        low = sat_bounded(SatQuery(f, max_worlds=2))
        high = sat_bounded(SatQuery(f, max_worlds=3))
        if low.satisfiable:
            assert high.satisfiable


def test_vocabulary_defaults_from_formula():
    q = SatQuery(parse("K{a} (p | q)"), max_worlds=2)
    assert q.vocabulary() == (("a",), ("p", "q"))
    q2 = SatQuery(parse("true"), max_worlds=2)
    assert q2.vocabulary() == ((), ())
    assert sat_bounded(q2).satisfiable
