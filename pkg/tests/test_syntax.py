import random

import pytest
from hypothesis import given, settings, strategies as st

from islkit import syntax
from islkit.errors import FixpointGrammarError, ModeError, ParseError
from islkit.gen import random_formula
from islkit.syntax import (And, Arrow, Bot, Box, Fix, Imp, Or, Star, Top, Var,
                           classify, closure, complexity, count_nu,
                           desugar_box, parse, render, substitute)

p, q, r = Var("p"), Var("q"), Var("r")


class TestParse:
    def test_box_sugar_in_arrow_mode(self):
        assert parse("p -> #p", "arrow") == Imp(p, Arrow(Top, p))

    def test_negation_sugar(self):
        assert parse("~p", "box") == Imp(p, Bot)

    def test_arrow_illegal_in_box_mode(self):
        with pytest.raises(ParseError):
            parse("p ~> q", "box")

    def test_box_mode_box_is_primitive(self):
        assert parse("#p", "box") == Box(p)

    def test_iff_sugar(self):
        assert parse("p <-> q", "arrow") == And(Imp(p, q), Imp(q, p))

    def test_arrow_iff_sugar(self):
        assert parse("p <~> q", "arrow") == And(Arrow(p, q), Arrow(q, p))

    def test_iff_non_associative(self):
        with pytest.raises(ParseError):
            parse("p <-> q <-> r", "arrow")

    def test_shared_level_right_assoc(self):
        assert parse("p -> q ~> r", "arrow") == Imp(p, Arrow(q, r))
        assert parse("p ~> q -> r", "arrow") == Arrow(p, Imp(q, r))

    def test_precedence(self):
        assert parse("p & q | r", "arrow") == Or(And(p, q), r)
        assert parse("~p & q", "arrow") == And(Imp(p, Bot), q)
        assert parse("#p & q", "arrow") == And(Arrow(Top, p), q)

    def test_keywords_are_not_variables(self):
        assert parse("top", "arrow") is Top
        assert parse("bot", "arrow") is Bot

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse("p & ", "arrow")
        assert "position" in str(exc.value)

    def test_fix_requires_fp_mode(self):
        with pytest.raises(ParseError):
            parse("fix(#*)", "arrow")
        f = parse("fix(#*)", "arrow-fp")
        assert f == Fix(Arrow(Top, Star))

    def test_unguarded_star_rejected(self):
        with pytest.raises(FixpointGrammarError):
            parse("fix(* & p)", "arrow-fp")

    def test_unbound_star_rejected(self):
        with pytest.raises(FixpointGrammarError):
            parse("#*", "arrow-fp")


class TestRender:
    def test_negation_resugars(self):
        assert render(Imp(p, Bot), "arrow") == "~p"

    def test_box_resugars_in_arrow_mode(self):
        assert render(Arrow(Top, p), "arrow") == "#p"

    def test_minimal_parens(self):
        assert render(And(p, Or(q, r)), "arrow") == "p & (q | r)"
        assert render(Or(And(p, q), r), "arrow") == "p & q | r"

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            render(Arrow(p, q), "box")
        with pytest.raises(ModeError):
            render(Box(p), "arrow")

    @pytest.mark.parametrize("mode", ["arrow", "box", "arrow-fp"])
    def test_round_trip_random(self, mode):
        rng = random.Random(7)
        parse_mode = mode if mode != "arrow-fp" else "arrow"
        for _ in range(1000):
            f = random_formula(rng, rng.randint(1, 12), ("p", "q", "r"),
                               parse_mode)
            assert parse(render(f, parse_mode), parse_mode) == f


@st.composite
def formulas(draw, mode="arrow"):
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    return random_formula(rng, draw(st.integers(1, 10)), ("p", "q"), mode)


class TestClassify:
    def test_modalized_under_arrow(self):
        assert classify(parse("p ~> r", "arrow"), "r").modalized is True

    def test_bare_positive_occurrence(self):
        c = classify(parse("r | #r", "arrow"), "r")
        assert c.modalized is False
        assert c.semipositive is True

    def test_negative_unguarded(self):
        assert classify(parse("r -> p", "arrow"), "r").semipositive is False

    def test_closed(self):
        assert classify(parse("#bot -> bot", "arrow")).closed is True
        assert classify(p).closed is False

    def test_both_sides_of_arrow_guard(self):
        c = classify(parse("(r -> p) ~> r", "arrow"), "r")
        assert c.modalized is True


class TestClosure:
    def test_adequate_box(self):
        got = closure([parse("#p", "box")], "adequate")
        assert got == [Bot, Top, p, Box(p)]

    def test_adequateplus_counts_imp_partner(self):
        got = closure([parse("p ~> q", "arrow")], "adequateplus")
        assert got == [Bot, Top, p, q, Imp(p, q), Arrow(p, q)]

    def test_sub_singleton(self):
        assert closure([p], "sub") == [p]

    @given(formulas())
    @settings(max_examples=60, deadline=None)
    def test_monotone_idempotent(self, f):
        for kind in ("sub", "subplus", "adequate", "adequateplus"):
            c1 = closure([f], kind)
            assert f in c1
            assert closure(c1, kind) == c1


class TestComplexity:
    def test_atoms(self):
        assert complexity(p) == 0
        assert complexity(Top) == 0
        assert complexity(Bot) == 0

    def test_nesting(self):
        assert complexity(parse("p -> (q ~> r)", "arrow")) == 2

    def test_box_counts_via_expansion(self):
        assert complexity(parse("#p", "arrow")) == 1
        assert complexity(parse("#p", "box")) == 1

    def test_fix_unsupported(self):
        with pytest.raises(ValueError):
            complexity(parse("fix(#*)", "arrow-fp"))

    @given(formulas(), formulas())
    @settings(max_examples=60, deadline=None)
    def test_substitution_bound(self, f, g):
        assert (complexity(substitute(f, "p", g))
                <= complexity(f) + complexity(g))


class TestCounts:
    def test_arrow_count(self):
        assert count_nu(parse("p ~> q", "arrow"), "arrow").nu == 3

    def test_derived_by_hand_enumeration(self):
        # Sub((p->q) & p) = {p, q, p->q, (p->q)&p}: two variables, one
        # implication, no arrows
        assert count_nu(parse("(p -> q) & p", "arrow"), "arrow").nu == 3

    def test_arrowplus_adds_partner(self):
        assert count_nu(parse("p ~> q", "arrow"), "arrowplus").nu == 4

    def test_box_mode_counts_boxes(self):
        c = count_nu(parse("#p -> p", "box"), "box")
        assert (c.variables, c.implications, c.modal) == (1, 1, 1)

    @given(formulas())
    @settings(max_examples=80, deadline=None)
    def test_plus_count_bound(self, f):
        plus = count_nu(f, "arrowplus")
        plain = count_nu(f, "arrow")
        assert plus.nu <= plain.nu + plain.modal

    def test_triv_image_matches_plus_count(self):
        # the trivialized image of a formula has exactly the sub-plus count
        from islkit import translate
        rng = random.Random(11)
        for _ in range(200):
            f = random_formula(rng, rng.randint(1, 10), ("p", "q"), "arrow")
            g = translate.apply_translation(f, translate.TRIV)
            assert count_nu(g, "arrow").nu == count_nu(f, "arrowplus").nu


class TestSubstitute:
    def test_basic(self):
        assert substitute(parse("p ~> r", "arrow"), "r", q) == Arrow(p, q)

    def test_identity_outside_domain(self):
        f = parse("#r -> p", "arrow")
        assert substitute(f, "z", Top) == f

    def test_inside_box(self):
        assert (substitute(parse("#r -> p", "arrow"), "r", Top)
                == parse("#top -> p", "arrow"))

    def test_star_refused(self):
        with pytest.raises(ValueError):
            substitute(p, "*", Top)

    def test_fix_body_star_untouched(self):
        f = parse("fix(p ~> *)", "arrow-fp")
        assert substitute(f, "p", q) == Fix(Arrow(q, Star))


class TestDesugarBox:
    def test_single(self):
        assert desugar_box(parse("#p", "box")) == Arrow(Top, p)

    def test_nested(self):
        assert desugar_box(parse("##bot", "box")) == Arrow(Top, Arrow(Top, Bot))

    def test_no_boxes(self):
        f = parse("p & q", "arrow")
        assert desugar_box(f) is f


def test_canonical_order_is_total_and_stable():
    fs = [Top, Bot, p, q, Imp(p, q), Arrow(p, q), And(p, q)]
    once = syntax.canonical_sorted(fs)
    assert once == syntax.canonical_sorted(reversed(fs))
    assert once[0] is Bot and once[1] is Top


def test_interning_gives_identity():
    assert parse("p -> q", "arrow") is parse("p -> q", "arrow")
