"""Bounded and full bisimulations, their correspondence with bounded-complexity
theories, and the witnessing-triple amalgamation used for uniform interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import config, decide, kripke, syntax
from .errors import IslkitError, KernelConsistencyError
from .kripke import KripkeModel
from .syntax import Formula

Pair = tuple


@dataclass(frozen=True)
class BisimLayers:
    """Layers Z_0..Z_n of the maximal downward-closed bounded bisimulation."""

    pvars: tuple[str, ...]
    layers: tuple[frozenset, ...]

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def relation(self, alpha: int) -> frozenset:
        if alpha > self.depth:
            raise IslkitError(f"layer {alpha} not computed (depth {self.depth})")
        return self.layers[alpha]

    def related(self, k, alpha: int, m) -> bool:
        return (k, m) in self.relation(alpha)


def _atom_agreement(K: KripkeModel, M: KripkeModel, pvars) -> set:
    pvars = set(pvars)
    return {(k, m) for k in K.nodes for m in M.nodes
            if K.val[k] & pvars == M.val[m] & pvars}


def _zigzag_ok(K: KripkeModel, M: KripkeModel, pair, prev: set) -> bool:
    k, m = pair
    for rel_k, rel_m in ((K._up, M._up), (K._succ, M._succ)):
        for k2 in rel_k[k]:
            if not any((k2, m2) in prev for m2 in rel_m[m]):
                return False
        for m2 in rel_m[m]:
            if not any((k2, m2) in prev for k2 in rel_k[k]):
                return False
    return True


def bounded_bisim(K: KripkeModel, M: KripkeModel, pvars: Iterable[str],
                  n: int) -> BisimLayers:
    """The maximal layered relation: layer 0 is atom agreement on ``pvars``;
    each next layer keeps the pairs whose pre- and sub-successors zig and zag
    into the previous layer."""
    pvars = tuple(sorted(set(pvars)))
    _check_pvars(K, M, pvars)
    layers = [frozenset(_atom_agreement(K, M, pvars))]
    for _ in range(n):
        prev = set(layers[-1])
        layers.append(frozenset(p for p in prev if _zigzag_ok(K, M, p, prev)))
    return BisimLayers(pvars, tuple(layers))


def full_bisim(K: KripkeModel, M: KripkeModel, pvars: Iterable[str]) -> frozenset:
    """Greatest fixpoint of the unlayered zig/zag refinement from atom
    agreement: the maximal bisimulation for ``pvars``."""
    pvars = tuple(sorted(set(pvars)))
    _check_pvars(K, M, pvars)
    rel = _atom_agreement(K, M, pvars)
    while True:
        refined = {p for p in rel if _zigzag_ok(K, M, p, rel)}
        if refined == rel:
            return frozenset(rel)
        rel = refined


def _check_pvars(K, M, pvars):
    missing = set(pvars) - (set(K.vars) & set(M.vars))
    if missing:
        raise IslkitError(f"variables {sorted(missing)} not shared by both models")


def theory_equiv(K: KripkeModel, k, M: KripkeModel, m, pvars: Iterable[str],
                 n: int, logic, budgets: Optional[config.Budgets] = None) -> bool:
    """Do ``k`` and ``m`` force the same formulas over ``pvars`` of complexity
    at most ``n``?  Decided over the agreement basis, whose pointwise agreement
    coincides with agreement on the full class."""
    from . import interp   # local import; interp uses this module's bisimulations
    reps = interp.agreement_basis(pvars, n, logic, budgets)
    return all(kripke.forces(K, k, f) == kripke.forces(M, m, f) for f in reps)


# ---------------------------------------------------------------------------
# Amalgamation
# ---------------------------------------------------------------------------

def amalgamate(K: KripkeModel, M: KripkeModel, X, logic,
               budgets: Optional[config.Budgets] = None):
    """Join a model onto the bisimilar part of another through the pre-Henkin
    structure of an adequate set.

    ``K`` (rooted) speaks the adequate set's variables; ``M`` (rooted) shares
    exactly the overlap variables and may add its own.  Provided the roots are
    bounded-bisimilar over the shared variables to depth twice the adequate
    set's nu-count plus one, the result is a model whose root has the same
    X-theory as ``K``'s root while remaining fully bisimilar to ``M``'s root
    over ``M``'s variables.  Nodes are pairs of a surviving type and an
    ``M``-node admitting a witnessing triple.
    """
    logic = decide.get_logic(logic)
    if logic.mode != syntax.ARROW:
        raise IslkitError("amalgamation is defined for the arrow-language logics")
    if K.root is None or M.root is None:
        raise IslkitError("both models must carry a root")
    if not isinstance(X, decide.AdequateSet):
        X = decide.AdequateSet.of(list(X), logic)
    for m, which in ((K, "first"), (M, "second")):
        bad = kripke.validate_model(m, logic.frame_class)
        if bad:
            raise IslkitError(f"{which} model invalid for {logic.name}: {bad[0]}")
    pvars = tuple(sorted(set(K.vars) & set(M.vars)))
    x_vars = set().union(*(syntax.pv(f) for f in X.formulas)) if len(X) else set()
    if not x_vars <= set(K.vars):
        raise IslkitError("the adequate set mentions variables outside the first model")
    missing = [p for p in pvars if syntax.Var(p) not in X.index]
    if missing:
        raise IslkitError(
            f"shared variables {missing} are not members of the adequate set; "
            "the construction requires them")

    nu = syntax.count_nu_set(X.formulas, "arrow").nu
    layers = bounded_bisim(K, M, pvars, 2 * nu + 1)
    if not layers.related(K.root, 2 * nu + 1, M.root):
        raise IslkitError(
            f"roots are not {2 * nu + 1}-bisimilar over {list(pvars)}; "
            "the amalgamation precondition fails")

    H = decide.pre_henkin(X, logic, budgets)
    surv = set(H.survivors)
    theory_mask = {}
    for k in K.nodes:
        mask = X.mask_of(kripke.node_theory(K, k, X.formulas))
        if mask not in surv:
            raise KernelConsistencyError(
                "a node theory is not a surviving type; kernel and semantics disagree")
        theory_mask[k] = mask
    depth_of = {t: decide.depth(H, t) for t in set(theory_mask.values())}
    for t, d in depth_of.items():
        if 2 * d + 1 > layers.depth:
            raise KernelConsistencyError("depth bound exceeds computed layers")

    pairs = []
    witness_of = {}
    for t in H.survivors:
        ks = [k for k in K.nodes if theory_mask[k] == t]
        if not ks:
            continue
        d = depth_of[t]
        z_odd = layers.relation(2 * d + 1)
        z_even = layers.relation(2 * d)
        for m in M.nodes:
            found = None
            for kp in ks:                      # k' with Th_X(k') = t
                for k in ks:                   # k  with Th_X(k)  = t
                    if (kp, k) not in K.pre:
                        continue
                    if (k, m) not in z_even:
                        continue
                    for mp in M.nodes:
                        if (mp, m) in M.pre and (kp, mp) in z_odd:
                            found = (kp, k, mp)
                            break
                    if found:
                        break
                if found:
                    break
            if found:
                pairs.append((t, m))
                witness_of[(t, m)] = found

    node_name = {pair: f"{H.node_of[pair[0]]}.{pair[1]}" for pair in pairs}
    h_sub = {(a, b) for a in H.survivors for b in H.survivors
             if decide.successor_relation(a, b, X, logic, strict=False)}
    pre = [(node_name[p], node_name[q]) for p in pairs for q in pairs
           if (p[0] | q[0] == q[0]) and (p[1], q[1]) in M.pre]
    sub = [(node_name[p], node_name[q]) for p in pairs for q in pairs
           if (p[0], q[0]) in h_sub and (p[1], q[1]) in M.sub]
    all_vars = tuple(sorted(set(K.vars) | set(M.vars)))
    val = {}
    for (t, m) in pairs:
        from_type = {X.formulas[i].name for i in X.var_indices if t >> i & 1}
        val[node_name[(t, m)]] = from_type | set(M.val[m])
    root_pair = (theory_mask[K.root], M.root)
    if root_pair not in witness_of:
        raise KernelConsistencyError("the root pair admits no witnessing triple")
    N = KripkeModel(all_vars, [node_name[p] for p in pairs], pre, sub, val,
                    root=node_name[root_pair])
    return N, node_name[root_pair]
