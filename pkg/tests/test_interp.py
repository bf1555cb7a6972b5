import random

import pytest

from islkit import config, decide, interp, kripke, syntax
from islkit.decide import ISL_A, ISL_A_PLUS, ISL_BOX
from islkit.errors import BudgetExceededError, IslkitError
from islkit.gen import random_formula
from islkit.interp import (agreement_basis, enum_representatives,
                           post_interpolant, pre_interpolant,
                           semantic_quantifier_check, theta_split,
                           verify_interpolant)
from islkit.kripke import KripkeModel
from islkit.syntax import Bot, Top, Var, parse

WIDE = config.Budgets(max_types=48)
p = Var("p")


def equiv(f, g, logic="isl-a"):
    return decide.entails_equiv([f], g, logic, "equiv", WIDE)


class TestEnumeration:
    def test_empty_vars_depth_zero(self):
        reps = enum_representatives((), 0, ISL_BOX).representatives
        assert set(reps) == {Bot, Top}

    def test_one_var_depth_zero(self):
        reps = enum_representatives(("p",), 0, ISL_A).representatives
        assert set(reps) == {Bot, Top, p}

    def test_empty_vars_depth_one(self):
        reps = enum_representatives((), 1, ISL_A).representatives
        assert set(reps) == {Bot, Top, parse("#bot", "arrow")}

    def test_degrees_of_falsity_at_depth_two(self):
        reps = enum_representatives((), 2, ISL_A).representatives
        assert set(reps) == {Bot, Top, parse("#bot", "arrow"),
                             parse("##bot", "arrow")}

    def test_antichain_clean(self):
        reps = enum_representatives(("p",), 1, ISL_A).representatives
        for i, a in enumerate(reps):
            for b in reps[i + 1:]:
                assert not equiv(a, b), (a, b)

    def test_every_member_within_complexity(self):
        reps = enum_representatives(("p",), 1, ISL_A).representatives
        assert all(syntax.complexity(f) <= 1 for f in reps)
        assert all(syntax.pv(f) <= {"p"} for f in reps)

    def test_budget_vars(self):
        with pytest.raises(BudgetExceededError):
            enum_representatives(("p", "q"), 1, ISL_A)

    def test_box_language(self):
        reps = enum_representatives((), 1, ISL_BOX).representatives
        assert set(reps) == {Bot, Top, parse("#bot", "box")}


class TestAgreementBasis:
    def test_contains_previous_level(self):
        c1 = set(enum_representatives(("p",), 1, ISL_A).representatives)
        basis = set(agreement_basis(("p",), 2, ISL_A))
        assert c1 <= basis

    def test_every_depth_two_formula_agrees_through_basis(self):
        # if two nodes agree on the basis they agree on every complexity-2
        # formula; spot-check with random formulas on random model pairs
        from islkit.gen import random_model
        rng = random.Random(8)
        basis = agreement_basis(("p",), 2, ISL_A)
        checked = 0
        while checked < 200:
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            for k in K.nodes:
                for m in M.nodes:
                    if all(kripke.forces(K, k, g) == kripke.forces(M, m, g)
                           for g in basis):
                        f = random_formula(rng, rng.randint(1, 6), ("p",), "arrow")
                        if syntax.complexity(f) <= 2:
                            assert (kripke.forces(K, k, f)
                                    == kripke.forces(M, m, f)), syntax.render(f)
                            checked += 1


class TestThetaSplit:
    def single(self, val):
        return KripkeModel(["p"], ["w0"], [("w0", "w0")], [], {"w0": val})

    def test_p_node_depth_zero(self):
        plus, minus = theta_split(self.single(("p",)), "w0", ("p",), 0, ISL_A)
        assert equiv(plus, p)
        assert equiv(minus, Bot)

    def test_non_p_node_depth_zero(self):
        plus, minus = theta_split(self.single(()), "w0", ("p",), 0, ISL_A)
        assert equiv(plus, Top)
        assert equiv(minus, p)

    def test_empty_pool_conventions(self):
        plus, minus = theta_split(self.single(()), "w0", (), 0, ISL_A)
        # over no variables the pool is {bot, top}; the conventions give
        # top for the meet side and bot for the join side
        assert equiv(plus, Top)
        assert equiv(minus, Bot)


FIXED_SUITE = [
    ("q", "exists", "top"), ("q", "forall", "bot"),
    ("p & q", "exists", "p"), ("p & q", "forall", "bot"),
    ("q -> p", "exists", "top"), ("q -> p", "forall", "p"),
    ("#q", "exists", "top"), ("#q", "forall", "#bot"),
    ("p ~> q", "exists", "top"), ("p ~> q", "forall", "p ~> bot"),
]


class TestInterpolants:
    @pytest.mark.parametrize("text,kind,expect", FIXED_SUITE)
    def test_fixed_suite_isl_a(self, text, kind, expect):
        f = parse(text, "arrow")
        fn = post_interpolant if kind == "exists" else pre_interpolant
        report = fn(f, ("q",), ISL_A)
        assert report.ok
        assert equiv(report.theta, parse(expect, "arrow"))

    def test_forall_p_defines_bot(self):
        report = pre_interpolant(p, ("p",), ISL_A)
        assert report.ok and equiv(report.theta, Bot)

    def test_not_quantified_is_fixed(self):
        report = post_interpolant(p, ("q",), ISL_A)
        assert report.ok and equiv(report.theta, p)

    def test_complexity_bounds(self):
        for text, kind, _ in FIXED_SUITE:
            f = parse(text, "arrow")
            fn = post_interpolant if kind == "exists" else pre_interpolant
            report = fn(f, ("q",), ISL_A)
            cap = 2 * report.nu + 2 if kind == "exists" else 2 * report.nu + 1
            assert syntax.complexity(report.theta) <= cap

    def test_monotone_adequacy(self):
        for text, kind, _ in FIXED_SUITE:
            f = parse(text, "arrow")
            if kind == "exists":
                rep = post_interpolant(f, ("q",), ISL_A)
                assert decide.entails_equiv([f], rep.theta, ISL_A, "entails", WIDE)
            else:
                rep = pre_interpolant(f, ("q",), ISL_A)
                assert decide.entails_equiv([rep.theta], f, ISL_A, "entails", WIDE)

    @pytest.mark.parametrize("logic", [ISL_A_PLUS, ISL_BOX])
    def test_retraction_routes(self, logic):
        mode = logic.mode
        suite = [("p & q", "exists", "p"), ("q -> p", "forall", "p"),
                 ("#q", "exists", "top"), ("#q", "forall", "#bot")]
        for text, kind, expect in suite:
            f = parse(text, mode)
            fn = post_interpolant if kind == "exists" else pre_interpolant
            report = fn(f, ("q",), logic)
            assert report.ok, (text, kind, logic.name)
            assert decide.entails_equiv([report.theta], parse(expect, mode),
                                        logic, "equiv", WIDE)

    def test_uniqueness_across_bounds(self):
        f = parse("p & q", "arrow")
        r1 = post_interpolant(f, ("q",), ISL_A, bound=1)
        r2 = post_interpolant(f, ("q",), ISL_A, bound=2)
        assert r1.ok and r2.ok
        assert equiv(r1.theta, r2.theta)

    def test_exists_definable_from_forall(self):
        # the double-negation style definition through a fresh variable; the
        # nested steps range over two free variables, so give them budget and
        # compute at the (verified) small bound
        wide = config.Budgets(max_types=48, enum_vars=2)
        for text in ["p & q", "q -> p"]:
            f = parse(text, "arrow")
            direct = post_interpolant(f, ("q",), ISL_A).theta
            inner = pre_interpolant(syntax.Imp(f, Var("r")), ("q",), ISL_A,
                                    wide, bound=1).theta
            outer = pre_interpolant(syntax.Imp(inner, Var("r")), ("r",), ISL_A,
                                    wide, bound=1).theta
            assert equiv(direct, outer), text


class TestVerify:
    def test_passing_report(self):
        f = parse("p & q", "arrow")
        sample = enum_representatives(("p",), 1, ISL_A).representatives
        report = verify_interpolant(f, ("q",), p, "exists", ISL_A, sample)
        assert report.ok and report.counterexample is None

    def test_universal_property_failure(self):
        f = parse("p & q", "arrow")
        report = verify_interpolant(f, ("q",), Top, "exists", ISL_A, [p])
        assert not report.checks["universal_property"]
        assert report.counterexample is p

    def test_variable_condition_failure(self):
        f = parse("p & q", "arrow")
        report = verify_interpolant(f, ("q",), parse("p & (q -> q)", "arrow"),
                                    "exists", ISL_A, [])
        assert not report.checks["variable_condition"]

    def test_sample_with_quantified_variable_rejected(self):
        with pytest.raises(ValueError):
            verify_interpolant(p, ("q",), p, "exists", ISL_A, [Var("q")])


class TestSemanticQuantifier:
    def single(self, val, vars=("p",)):
        return KripkeModel(vars, ["w0"], [("w0", "w0")], [], {"w0": val})

    def test_exists_q_q_holds(self):
        m = self.single(())
        assert semantic_quantifier_check(m, "w0", "q", Var("q"), ISL_A, 2) == "holds"

    def test_exists_bot_holds_in_failure_direction(self):
        m = self.single(())
        assert semantic_quantifier_check(m, "w0", "q", Bot, ISL_A, 2) == "holds"

    def test_conjunction_with_base_fact(self):
        yes = self.single(("p",))
        no = self.single(())
        f = parse("p & q", "arrow")
        assert semantic_quantifier_check(yes, "w0", "q", f, ISL_A, 2) == "holds"
        assert semantic_quantifier_check(no, "w0", "q", f, ISL_A, 2) == "holds"

    def test_variable_clash_rejected(self):
        with pytest.raises(IslkitError):
            semantic_quantifier_check(self.single(()), "w0", "p", p, ISL_A, 2)
