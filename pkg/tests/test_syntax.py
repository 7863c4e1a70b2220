import random

import pytest

from glal.errors import FormulaSyntaxError, NotPalFragment, UnknownOperator
from glal.fuzz import random_formula
from glal.syntax import (
    EVERYONE,
    And,
    AnnGlobal,
    AnnLocal,
    Atom,
    BOT,
    Coalition,
    Common,
    DiaLocal,
    Distributed,
    Dual,
    Everybody,
    Iff,
    Implies,
    Know,
    KnowWhether,
    Not,
    Or,
    PalAnn,
    TOP,
    agents,
    atoms,
    children,
    depth,
    expand_derived,
    parse,
    print_formula,
    size,
    translate_pal,
)


def test_parse_know():
    assert parse("K{a} p") == Know("a", Atom("p"))


def test_parse_father_announcement():
    f = parse("[m_r | m_g | m_b]-{r,g,b} E{r,g,b} (m_r | m_g | m_b)")
    chain = Or(Or(Atom("m_r"), Atom("m_g")), Atom("m_b"))
    assert f == AnnLocal(chain, Coalition.of("r", "g", "b"),
                         Everybody(Coalition.of("r", "g", "b"), chain))


def test_parse_missing_continuation():
    with pytest.raises(FormulaSyntaxError):
        parse("[p]+{}")


def test_empty_coalition_is_legal_syntax():
    assert parse("[p]+{} q") == AnnGlobal(Atom("p"), Coalition(frozenset()), Atom("q"))


def test_singleton_announcement_is_local():
    f = parse("[p]{a} q")
    assert f == AnnLocal(Atom("p"), Coalition.of("a"), Atom("q"))


def test_bare_announcement_rejects_multi_agent():
    with pytest.raises(FormulaSyntaxError):
        parse("[p]{a,b} q")
    with pytest.raises(FormulaSyntaxError):
        parse("[p]{*} q")


def test_bare_singleton_diamond():
    assert parse("<p>{a} q") == DiaLocal(Atom("p"), Coalition.of("a"), Atom("q"))
    with pytest.raises(FormulaSyntaxError):
        parse("<p> q")  # diamonds have no public-announcement form


def test_k_needs_exactly_one_agent():
    with pytest.raises(FormulaSyntaxError):
        parse("K{a,b} p")
    with pytest.raises(FormulaSyntaxError):
        parse("Kw{} p")


def test_unknown_operator():
    with pytest.raises(UnknownOperator):
        parse("Q{a} p")


def test_error_positions():
    try:
        parse("p &\n& q")
    except FormulaSyntaxError as exc:
        assert exc.line == 2 and exc.column == 1
    else:
        pytest.fail("expected a syntax error")


def test_trailing_input_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse("p q")


def test_operator_head_must_be_glued():
    # "K {a}" is an atom K followed by a stray brace.
    with pytest.raises(FormulaSyntaxError):
        parse("K {a} p")


def test_pal_box():
    assert parse("[p] q") == PalAnn(Atom("p"), Atom("q"))


def test_precedence():
    f = parse("!p & q | r -> s <-> t")
    assert f == Iff(Implies(Or(And(Not(Atom("p")), Atom("q")), Atom("r")), Atom("s")),
                    Atom("t"))


def test_implication_right_associative():
    assert parse("p -> q -> r") == Implies(Atom("p"), Implies(Atom("q"), Atom("r")))


def test_box_binds_tighter_than_and():
    assert parse("K{a} p & q") == And(Know("a", Atom("p")), Atom("q"))


def test_print_examples():
    assert print_formula(Know("a", Atom("p"))) == "K{a} (p)"
    assert (
        print_formula(AnnGlobal(Atom("p"), Coalition.of("a", "b"),
                                Common(Coalition.of("a", "b"), Atom("p"))))
        == "[p]+{a,b} (C{a,b} (p))"
    )
    assert print_formula(Not(BOT)) == "!(false)"


def test_everyone_marker_round_trip():
    f = AnnGlobal(Atom("p"), EVERYONE, Atom("q"))
    assert print_formula(f) == "[p]+{*} (q)"
    assert parse(print_formula(f)) == f


def test_round_trip_fuzz():
    rng = random.Random(2024)
    for _ in range(300):
        f = random_formula(rng, 6, ["p", "q", "m_r"], ["a", "b", "c"])
        assert parse(print_formula(f)) == f


def test_size_strictly_decreasing():
    rng = random.Random(7)
    for _ in range(100):
        f = random_formula(rng, 5, ["p"], ["a", "b"])
        for sub in children(f):
            assert size(sub) < size(f)


def test_atoms_and_agents_collectors():
    f = parse("[m_r]-{r,g} K{b} (m_g & true)")
    assert atoms(f) == frozenset({"m_r", "m_g"})
    assert agents(f) == frozenset({"r", "g", "b"})


CORE = (Atom, type(TOP), type(BOT), Not, And, Common, Distributed, AnnLocal, AnnGlobal)


def _core_only(f):
    if not isinstance(f, CORE):
        return False
    return all(_core_only(c) for c in children(f))


def test_expand_derived_examples():
    assert expand_derived(Know("a", Atom("p"))) == Common(Coalition.of("a"), Atom("p"))
    assert expand_derived(Everybody(Coalition.of("a", "b"), Atom("p"))) == And(
        Common(Coalition.of("a"), Atom("p")), Common(Coalition.of("b"), Atom("p"))
    )
    assert expand_derived(TOP) == TOP
    assert expand_derived(Everybody(Coalition(frozenset()), Atom("p"))) == TOP


def test_expand_derived_core_only():
    rng = random.Random(13)
    for _ in range(200):
        f = random_formula(rng, 5, ["p", "q"], ["a", "b"])
        assert _core_only(expand_derived(f))


def test_expand_derived_idempotent_on_core():
    rng = random.Random(3)
    for _ in range(50):
        f = expand_derived(random_formula(rng, 4, ["p"], ["a", "b"]))
        assert expand_derived(f) == f


def test_translate_pal_clauses():
    assert translate_pal(PalAnn(Atom("p"), Know("a", Atom("p")))) == AnnGlobal(
        Atom("p"), EVERYONE, Know("a", Atom("p"))
    )
    assert translate_pal(Atom("p")) == Atom("p")
    nested = PalAnn(PalAnn(Atom("p"), Atom("q")), Atom("r"))
    assert translate_pal(nested) == AnnGlobal(
        AnnGlobal(Atom("p"), EVERYONE, Atom("q")), EVERYONE, Atom("r")
    )


def test_translate_pal_identity_on_announcement_free():
    rng = random.Random(6)
    for _ in range(100):
        f = random_formula(rng, 4, ["p", "q"], ["a", "b"], fragment="epistemic")
        assert translate_pal(f) == f


def test_translate_pal_rejects_refinement_operators():
    with pytest.raises(NotPalFragment):
        translate_pal(AnnLocal(Atom("p"), Coalition.of("a"), Atom("q")))
    with pytest.raises(NotPalFragment):
        translate_pal(Not(DiaLocal(Atom("p"), Coalition.of("a"), Atom("q"))))


def test_derived_operators_parse():
    f = parse("Kw{a} p & M{b} q & D{a,b} r")
    assert f == And(
        And(KnowWhether("a", Atom("p")), Dual("b", Atom("q"))),
        Distributed(Coalition.of("a", "b"), Atom("r")),
    )


def test_depth_of_channel_distinguisher():
    assert depth(parse("[bit0]{r} K{e} Kw{r} bit0")) == 4
