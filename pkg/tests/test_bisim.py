import random

import pytest

from islkit import bisim, config, decide, kripke, syntax
from islkit.bisim import amalgamate, bounded_bisim, full_bisim, theory_equiv
from islkit.errors import IslkitError
from islkit.gen import random_formula, random_model, vary_model
from islkit.kripke import KripkeModel
from islkit.syntax import Var, parse

WIDE = config.Budgets(max_types=48)


def node(val, vars=("p",), name="w0", root=False):
    return KripkeModel(vars, [name], [(name, name)], [], {name: val},
                       root=name if root else None)


class TestBoundedBisim:
    def test_agreeing_isolated_nodes(self):
        K, M = node(("p",)), node(("p",))
        layers = bounded_bisim(K, M, ("p",), 3)
        assert all(("w0", "w0") in layers.relation(a) for a in range(4))

    def test_atom_disagreement(self):
        K, M = node(("p",)), node(())
        layers = bounded_bisim(K, M, ("p",), 2)
        assert layers.relation(0) == frozenset()

    def test_spec_zig_failure(self):
        # x0 below a p-node vs a single non-p node: layer 0 yes, layer 1 no
        K = KripkeModel(["p"], ["x0", "x1"],
                        [("x0", "x0"), ("x1", "x1"), ("x0", "x1")], [],
                        {"x0": [], "x1": ["p"]})
        M = node(())
        layers = bounded_bisim(K, M, ("p",), 1)
        assert ("x0", "w0") in layers.relation(0)
        assert ("x0", "w0") not in layers.relation(1)

    def test_downward_closed(self):
        rng = random.Random(0)
        for _ in range(20):
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            layers = bounded_bisim(K, M, ("p",), 3)
            for a in range(3):
                assert layers.relation(a + 1) <= layers.relation(a)


class TestFullBisim:
    def test_identity_on_self(self):
        rng = random.Random(1)
        for _ in range(10):
            K = random_model(rng, 3, ("p",))
            rel = full_bisim(K, K, ("p",))
            assert all((x, x) in rel for x in K.nodes)

    def test_contained_in_every_layer(self):
        rng = random.Random(2)
        for _ in range(10):
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            rel = full_bisim(K, M, ("p",))
            layers = bounded_bisim(K, M, ("p",), 4)
            for a in range(5):
                assert rel <= layers.relation(a)

    def test_zig_failing_pair_absent(self):
        K = KripkeModel(["p"], ["x0", "x1"],
                        [("x0", "x0"), ("x1", "x1"), ("x0", "x1")], [],
                        {"x0": [], "x1": ["p"]})
        M = node(())
        assert ("x0", "w0") not in full_bisim(K, M, ("p",))


class TestFormulaTransfer:
    def test_layer_n_transfers_complexity_n(self):
        rng = random.Random(3)
        checked = 0
        while checked < 60:
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            layers = bounded_bisim(K, M, ("p",), 2)
            f = random_formula(rng, rng.randint(1, 5), ("p",), "arrow")
            n = syntax.complexity(f)
            if n > 2:
                continue
            for k, m in layers.relation(n):
                assert kripke.forces(K, k, f) == kripke.forces(M, m, f)
                checked += 1


class TestTheoryEquiv:
    def test_identical_models_same_node(self):
        K = node(("p",))
        assert theory_equiv(K, "w0", K, "w0", ("p",), 1, "isl-a")

    def test_zig_failing_pair_disagrees_at_depth_one(self):
        K = KripkeModel(["p"], ["x0", "x1"],
                        [("x0", "x0"), ("x1", "x1"), ("x0", "x1")], [],
                        {"x0": [], "x1": ["p"]})
        M = node(())
        assert theory_equiv(K, "x0", M, "w0", ("p",), 0, "isl-a")
        assert not theory_equiv(K, "x0", M, "w0", ("p",), 1, "isl-a")

    def test_depth_zero_is_atom_agreement(self):
        rng = random.Random(4)
        for _ in range(20):
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            for k in K.nodes:
                for m in M.nodes:
                    assert (theory_equiv(K, k, M, m, ("p",), 0, "isl-a")
                            == (K.val[k] == M.val[m]))


class TestCorrespondence:
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_layer_membership_iff_theory_equality(self, n):
        rng = random.Random(5 + n)
        trials = 0
        while trials < 25:
            K = random_model(rng, 3, ("p",))
            M = random_model(rng, 3, ("p",))
            layers = bounded_bisim(K, M, ("p",), n)
            for k in K.nodes:
                for m in M.nodes:
                    same = theory_equiv(K, k, M, m, ("p",), n, "isl-a")
                    assert same == ((k, m) in layers.relation(n)), (n, k, m)
            trials += 1


def amalgamation_trial(rng, logic):
    cls = decide.get_logic(logic).frame_class
    K = random_model(rng, 3, ("p", "q"), cls, rooted=True)
    M = vary_model(rng, K, add_vars=("r",), drop_vars=("q",))
    f = random_formula(rng, rng.randint(1, 4), ("p", "q"), "arrow")
    X = decide.AdequateSet.of(
        [f, Var("p")], decide.get_logic(logic))
    return K, M, X


class TestAmalgamate:
    def test_single_p_node(self):
        K = node(("p",), root=True)
        M = node(("p",), name="m0", root=True)
        X = decide.AdequateSet.of([Var("p")], decide.ISL_A)
        N, root = amalgamate(K, M, X, "isl-a")
        assert kripke.node_theory(N, root, X.formulas) == [syntax.Top, Var("p")]

    def test_degenerate_identity(self):
        rng = random.Random(6)
        for _ in range(5):
            K = random_model(rng, 3, ("p",), rooted=True)
            X = decide.AdequateSet.of(
                [random_formula(rng, 3, ("p",), "arrow"), Var("p")], decide.ISL_A)
            N, root = amalgamate(K, K, X, "isl-a")
            assert (kripke.node_theory(N, root, X.formulas)
                    == kripke.node_theory(K, K.root, X.formulas))

    def test_missing_shared_variable_errors(self):
        K = node(("p",), root=True)
        M = node(("p",), name="m0", root=True)
        X = decide.AdequateSet([syntax.Bot, syntax.Top], "arrow")
        with pytest.raises(IslkitError):
            amalgamate(K, M, X, "isl-a")

    def test_precondition_failure_errors(self):
        K = KripkeModel(["p"], ["k0", "k1"],
                        [("k0", "k0"), ("k1", "k1"), ("k0", "k1")], [],
                        {"k0": [], "k1": ["p"]}, root="k0")
        M = node((), name="m0", root=True)
        X = decide.AdequateSet.of([Var("p")], decide.ISL_A)
        with pytest.raises(IslkitError):
            amalgamate(K, M, X, "isl-a")

    @pytest.mark.parametrize("logic", ["isl-a", "isl-a-plus"])
    def test_randomized_conclusions(self, logic):
        rng = random.Random(7)
        frame_class = decide.get_logic(logic).frame_class
        done = 0
        while done < 12:
            K, M, X = amalgamation_trial(rng, logic)
            N, root = amalgamate(K, M, X, logic, WIDE)
            assert kripke.validate_model(N, frame_class) == []
            assert (kripke.node_theory(N, root, X.formulas)
                    == kripke.node_theory(K, K.root, X.formulas))
            shared = tuple(sorted(set(M.vars)))
            assert (root, M.root) in full_bisim(N, M, shared)
            # irreflexivity inherited from the second component
            assert all(a != b or False for a, b in N.sub if a == b)
            assert not any((a, a) in N.sub for a in N.nodes)
            done += 1
