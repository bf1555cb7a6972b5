import random

import pytest

from islkit import config, decide, syntax, translate
from islkit.decide import ISL_A, ISL_A_PLUS, ISL_BOX, derivable
from islkit.errors import FixpointGrammarError, ModeError
from islkit.gen import random_formula
from islkit.syntax import parse
from islkit.translate import (BL, LB, RED, TRIV, TRIV_LB, apply_translation,
                              compose, eliminate_fixpoints)

WIDE = config.Budgets(max_types=48)


class TestClauses:
    def test_triv(self):
        assert (apply_translation(parse("p ~> q", "arrow"), TRIV)
                == parse("top ~> (p -> q)", "arrow"))

    def test_lb(self):
        assert (apply_translation(parse("p ~> q", "arrow"), LB)
                == parse("#(p -> q)", "box"))

    def test_bl(self):
        assert (apply_translation(parse("#p", "box"), BL)
                == parse("top ~> p", "arrow"))

    def test_red_equals_desugaring(self):
        rng = random.Random(1)
        for _ in range(50):
            f = random_formula(rng, 8, ("p", "q"), "box")
            assert apply_translation(f, RED) == syntax.desugar_box(f)

    def test_homomorphic_on_propositional_part(self):
        f = parse("p & (q | ~p)", "arrow")
        assert apply_translation(f, TRIV) == f

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            apply_translation(parse("#p", "box"), TRIV)

    def test_compose_matches_named_composite(self):
        composite = compose(TRIV, BL)
        assert composite.clause == TRIV_LB.clause
        assert composite.source == "box" and composite.target == "arrow"


class TestInterpretations:
    def test_triv_soundness(self):
        # theorems of the plus logic trivialize to theorems of the base logic
        rng = random.Random(5)
        found = 0
        while found < 25:
            f = random_formula(rng, rng.randint(1, 5), ("p", "q"), "arrow")
            if not derivable(f, ISL_A_PLUS, WIDE).derivable:
                continue
            found += 1
            assert derivable(apply_translation(f, TRIV), ISL_A, WIDE).derivable

    def test_lb_soundness(self):
        rng = random.Random(6)
        found = 0
        while found < 25:
            f = random_formula(rng, rng.randint(1, 5), ("p", "q"), "arrow")
            if not derivable(f, ISL_A_PLUS, WIDE).derivable:
                continue
            found += 1
            assert derivable(apply_translation(f, LB), ISL_BOX, WIDE).derivable

    def test_bl_soundness(self):
        rng = random.Random(7)
        found = 0
        while found < 25:
            f = random_formula(rng, rng.randint(1, 5), ("p", "q"), "box")
            if not derivable(f, ISL_BOX, WIDE).derivable:
                continue
            found += 1
            assert derivable(apply_translation(f, BL), ISL_A_PLUS, WIDE).derivable

    def test_emb_soundness(self):
        rng = random.Random(8)
        found = 0
        while found < 25:
            f = random_formula(rng, rng.randint(1, 5), ("p", "q"), "arrow")
            if not derivable(f, ISL_A, WIDE).derivable:
                continue
            found += 1
            assert derivable(f, ISL_A_PLUS, WIDE).derivable


class TestSynonymy:
    def test_bl_after_lb_is_identity_in_plus(self):
        # the arrow clause and its round trip through the box language agree
        arrow = parse("p0 ~> p1", "arrow")
        image = apply_translation(apply_translation(arrow, LB), BL)
        assert decide.entails_equiv([arrow], image, ISL_A_PLUS, "equiv", WIDE)

    def test_lb_after_bl_is_identity_in_box(self):
        boxed = parse("#p0", "box")
        image = apply_translation(apply_translation(boxed, BL), LB)
        assert decide.entails_equiv([boxed], image, ISL_BOX, "equiv", WIDE)

    def test_emb_after_triv_is_identity_in_plus(self):
        arrow = parse("p0 ~> p1", "arrow")
        image = apply_translation(arrow, TRIV)
        assert decide.entails_equiv([arrow], image, ISL_A_PLUS, "equiv", WIDE)

    def test_red_supports_the_same_interpretation(self):
        rng = random.Random(9)
        for _ in range(25):
            f = random_formula(rng, rng.randint(1, 4), ("p", "q"), "box")
            assert (derivable(apply_translation(f, RED), ISL_A, WIDE).derivable
                    == derivable(apply_translation(f, TRIV_LB), ISL_A, WIDE).derivable)


class TestFixpointElimination:
    def test_spec_instance(self):
        f = parse("fix(#(* -> p))", "arrow-fp")
        assert eliminate_fixpoints(f) == parse("#(top -> p)", "arrow")

    def test_simple(self):
        assert eliminate_fixpoints(parse("fix(#*)", "arrow-fp")) == parse("#top", "arrow")

    def test_no_binder_is_identity(self):
        f = parse("p & q", "arrow")
        assert eliminate_fixpoints(f) is f

    def test_nested_innermost_first(self):
        f = parse("fix(fix(#*) ~> *)", "arrow-fp")
        assert eliminate_fixpoints(f) == parse("#top ~> top", "arrow")

    def test_grammar_violation(self):
        with pytest.raises(FixpointGrammarError):
            eliminate_fixpoints(syntax.Fix(syntax.Star))

    def test_fixpoint_equation_holds_in_kernel(self):
        rng = random.Random(10)
        from islkit.gen import random_modalized
        for _ in range(12):
            body = random_modalized(rng, rng.randint(2, 6), ("p",), "r", "arrow")
            fixed = syntax.substitute(body, "r", syntax.Top)
            eq = syntax.Iff(fixed, syntax.substitute(body, "r", fixed))
            assert derivable(eq, ISL_A, WIDE).derivable, syntax.render(body)
