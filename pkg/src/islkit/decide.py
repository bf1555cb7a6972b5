"""The decision kernel: type elimination over locally saturated candidate types.

Derivability in the three strong-Löb systems is decided by a greatest-fixpoint
pruning of candidate types (locally saturated subsets of an adequate set).  A
candidate type is deleted while it claims some implication or modal formula is
false without a surviving one-step witness; at the fixpoint, membership in a
survivor coincides with forcing at that survivor in the induced model, which is
re-checked against the independent forcing evaluator after every run.

Types are represented as bit masks over the adequate set's canonical index, so
the canonical order on types is plain integer order on masks.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import config, kripke, syntax
from .errors import BudgetExceededError, IslkitError, KernelConsistencyError, ModeError
from .kripke import CLASS_BRILLIANT, CLASS_ISL, CLASS_PREORDER, KripkeModel
from .syntax import Formula


@dataclass(frozen=True)
class Logic:
    """One of the three systems; fixes language, closure kind and frame class."""

    name: str
    mode: str            # syntax.ARROW or syntax.BOX
    closure_kind: str    # "adequate" or "adequateplus"
    frame_class: str     # kripke.CLASS_ISL or kripke.CLASS_BRILLIANT

    def __str__(self):
        return self.name


ISL_A = Logic("isl-a", syntax.ARROW, "adequate", CLASS_ISL)
ISL_A_PLUS = Logic("isl-a-plus", syntax.ARROW, "adequateplus", CLASS_BRILLIANT)
ISL_BOX = Logic("isl-box", syntax.BOX, "adequate", CLASS_BRILLIANT)
LOGICS = {l.name: l for l in (ISL_A, ISL_A_PLUS, ISL_BOX)}
LOGICS["isl-a+"] = ISL_A_PLUS


def get_logic(name) -> Logic:
    if isinstance(name, Logic):
        return name
    try:
        return LOGICS[name]
    except KeyError:
        raise ValueError(f"unknown logic {name!r}") from None


class AdequateSet:
    """A closure-stable, canonically indexed formula set containing bot and top."""

    def __init__(self, formulas: Sequence[Formula], language: str):
        self.formulas = tuple(formulas)
        self.language = language
        self.index = {f: i for i, f in enumerate(self.formulas)}
        if syntax.Bot not in self.index or syntax.Top not in self.index:
            raise IslkitError("adequate sets must contain bot and top")
        self.bot_i = self.index[syntax.Bot]
        self.top_i = self.index[syntax.Top]
        self.var_indices = tuple(i for i, f in enumerate(self.formulas)
                                 if f.kind == "var")
        self.conjs = tuple((self.index[f], self.index[f.left], self.index[f.right])
                           for f in self.formulas if f.kind == "and")
        self.disjs = tuple((self.index[f], self.index[f.left], self.index[f.right])
                           for f in self.formulas if f.kind == "or")
        self.imps = tuple((self.index[f], self.index[f.left], self.index[f.right])
                          for f in self.formulas if f.kind == "imp")
        self.arrows = tuple((self.index[f], self.index[f.left], self.index[f.right])
                            for f in self.formulas if f.kind == "arrow")
        self.boxes = tuple((self.index[f], self.index[f.left])
                           for f in self.formulas if f.kind == "box")
        # sub+ partners (psi -> chi) of (psi ~> chi); present iff plus-closed
        self.arrow_partner = {}
        for i, li, ri in self.arrows:
            partner = syntax.Imp(self.formulas[li], self.formulas[ri])
            if partner in self.index:
                self.arrow_partner[i] = self.index[partner]
        # assignment order: subformulas first (they are strictly smaller)
        self.topo = tuple(sorted(range(len(self.formulas)),
                                 key=lambda i: (syntax.size(self.formulas[i]),
                                                syntax.sort_key(self.formulas[i]))))
        self.variables = tuple(sorted({v for f in self.formulas
                                       for v in syntax.pv(f)}))

    @classmethod
    def of(cls, fs: Iterable[Formula], logic: Logic) -> "AdequateSet":
        fs = list(fs)
        for f in fs:
            syntax.check_mode(f, logic.mode)
        closed = syntax.closure(fs, logic.closure_kind)
        return cls(closed, "box" if logic.mode == syntax.BOX else "arrow")

    def __len__(self):
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def mask_of(self, fs: Iterable[Formula]) -> int:
        mask = 0
        for f in fs:
            try:
                mask |= 1 << self.index[f]
            except KeyError:
                raise IslkitError(f"{f!r} is not in the adequate set") from None
        return mask

    def type_formulas(self, mask: int) -> tuple[Formula, ...]:
        return tuple(f for i, f in enumerate(self.formulas) if mask >> i & 1)


def local_types(X: AdequateSet, budgets: Optional[config.Budgets] = None) -> list[int]:
    """All locally saturated subsets of ``X``, as ascending bit masks.

    Local saturation: contains top, omits bot, conjunction/disjunction
    membership is determined by the parts, and membership is closed under
    modus ponens within ``X``.
    """
    budgets = budgets or config.DEFAULT
    if len(X) > budgets.max_types:
        raise BudgetExceededError(
            f"adequate set has {len(X)} formulas; budget is {budgets.max_types}")
    out: list[int] = []
    order = X.topo
    formulas = X.formulas

    def assign(pos: int, mask: int) -> None:
        if pos == len(order):
            out.append(mask)
            return
        i = order[pos]
        f = formulas[i]
        if f.kind == "bot":
            choices = (0,)
        elif f.kind == "top":
            choices = (1,)
        elif f.kind == "and":
            li, ri = X.index[f.left], X.index[f.right]
            choices = ((mask >> li & 1) & (mask >> ri & 1),)
        elif f.kind == "or":
            li, ri = X.index[f.left], X.index[f.right]
            choices = ((mask >> li & 1) | (mask >> ri & 1),)
        elif f.kind == "imp":
            li, ri = X.index[f.left], X.index[f.right]
            if (mask >> li & 1) and not (mask >> ri & 1):
                choices = (0,)   # modus ponens closure
            else:
                choices = (0, 1)
        else:
            choices = (0, 1)
        for c in choices:
            assign(pos + 1, mask | (c << i))

    assign(0, 0)
    return sorted(out)


def successor_relation(t, u, X: AdequateSet, logic: Logic, strict: bool = True) -> bool:
    """The structural successor rule between candidate types over ``X``.

    Strict mode additionally requires proper containment (Henkin models);
    non-strict mode is the pre-Henkin variant.
    """
    logic = get_logic(logic)
    t = t if isinstance(t, int) else X.mask_of(t)
    u = u if isinstance(u, int) else X.mask_of(u)
    if t | u != u:
        return False
    if strict and t == u:
        return False
    return _modal_condition(t, u, X, logic)


def _modal_condition(t: int, u: int, X: AdequateSet, logic: Logic) -> bool:
    if logic is ISL_BOX:
        for i, bi in X.boxes:
            if t >> i & 1 and not u >> bi & 1:
                return False
        return True
    if logic is ISL_A_PLUS:
        for i, li, ri in X.arrows:
            if t >> i & 1:
                j = X.arrow_partner.get(i)
                if j is None:
                    raise IslkitError("adequate set is not plus-closed; "
                                      "isl-a-plus needs the arrow's implication partner")
                if not u >> j & 1:
                    return False
        return True
    for i, li, ri in X.arrows:
        if t >> i & 1 and u >> li & 1 and not u >> ri & 1:
            return False
    return True


@dataclass
class HenkinStructure:
    """The elimination fixpoint: surviving types with their induced model."""

    adequate: AdequateSet
    logic: Logic
    survivors: tuple[int, ...]          # ascending masks
    strict: bool
    model: KripkeModel
    node_of: dict[int, str] = field(repr=False, default_factory=dict)

    def theories(self) -> list[tuple[Formula, ...]]:
        return [self.adequate.type_formulas(t) for t in self.survivors]


_VECTOR_MIN = 700   # switch defect scans to numpy past this many types


def eliminate(X: AdequateSet, logic: Logic,
              budgets: Optional[config.Budgets] = None) -> HenkinStructure:
    """Run type elimination to its greatest fixpoint and package the survivors.

    A type with a false implication (or arrow/box) needs a surviving one-step
    witness; the converse direction cannot produce a defect because candidate
    types are modus-ponens closed and the successor rule carries each arrow's
    obligation, so only the false direction is scanned.  The truth lemma is
    re-checked against the independent forcing evaluator before returning.
    """
    logic = get_logic(logic)
    survivors = local_types(X, budgets)
    if len(survivors) >= _VECTOR_MIN and len(X) <= 63:
        survivors = _run_rounds_vector(X, logic, survivors)
    else:
        survivors = _run_rounds(X, logic, survivors)
    structure = _package(X, logic, tuple(survivors), strict=True)
    _assert_truth_lemma(structure)
    return structure


def _run_rounds(X: AdequateSet, logic: Logic, survivors: list[int]) -> list[int]:
    alive = set(survivors)
    witness: dict = {}

    def refutes_at(entry, u: int) -> bool:
        if logic is ISL_BOX:
            return not u >> entry[1] & 1
        return bool(u >> entry[1] & 1) and not u >> entry[2] & 1

    def has_defect(t: int) -> bool:
        for i, li, ri in X.imps:
            if t >> i & 1:
                continue
            w = witness.get((t, i))
            if w is not None and w in alive:
                continue
            for u in survivors:
                if t | u == u and u >> li & 1 and not u >> ri & 1:
                    witness[(t, i)] = u
                    break
            else:
                return True
        modal = X.boxes if logic is ISL_BOX else X.arrows
        for entry in modal:
            i = entry[0]
            if t >> i & 1:
                continue
            w = witness.get((t, i))
            if w is not None and w in alive:
                continue
            for u in survivors:
                if t != u and t | u == u and _modal_condition(t, u, X, logic) \
                        and refutes_at(entry, u):
                    witness[(t, i)] = u
                    break
            else:
                return True
        return False

    while True:
        dead = [t for t in survivors if has_defect(t)]
        if not dead:
            break
        deadset = set(dead)
        survivors = [t for t in survivors if t not in deadset]
        alive -= deadset
    return survivors


def _run_rounds_vector(X: AdequateSet, logic: Logic,
                       survivors: list[int]) -> list[int]:
    # Same fixpoint as _run_rounds, with the witness scans done on uint64
    # arrays.  Requirements are (formula index, witness pattern, modal flag);
    # the modal flag additionally demands properness and the successor
    # condition for every arrow/box the candidate type contains.
    modal_entries = X.boxes if logic is ISL_BOX else X.arrows
    requirements = [(i, (li, ri), False) for i, li, ri in X.imps]
    for entry in modal_entries:
        requirements.append((entry[0], entry, True))

    def witness_pattern(arr, entry, is_modal):
        if not is_modal:
            li, ri = entry
            return ((arr >> np.uint64(li)) & 1).astype(bool) \
                & ~((arr >> np.uint64(ri)) & 1).astype(bool)
        if logic is ISL_BOX:
            return ~((arr >> np.uint64(entry[1])) & 1).astype(bool)
        return ((arr >> np.uint64(entry[1])) & 1).astype(bool) \
            & ~((arr >> np.uint64(entry[2])) & 1).astype(bool)

    def modal_bad_columns(warr):
        # bad[a][j]: candidate j violates the successor condition for the
        # a-th arrow/box when that arrow/box belongs to the source type
        bad = []
        if logic is ISL_BOX:
            for i, bi in X.boxes:
                bad.append((i, ~((warr >> np.uint64(bi)) & 1).astype(bool)))
        elif logic is ISL_A_PLUS:
            for i, li, ri in X.arrows:
                j = X.arrow_partner[i]
                bad.append((i, ~((warr >> np.uint64(j)) & 1).astype(bool)))
        else:
            for i, li, ri in X.arrows:
                bad.append((i, ((warr >> np.uint64(li)) & 1).astype(bool)
                            & ~((warr >> np.uint64(ri)) & 1).astype(bool)))
        return bad

    while True:
        arr = np.array(survivors, dtype=np.uint64)
        notarr = ~arr
        defect = np.zeros(len(arr), dtype=bool)
        for i, entry, is_modal in requirements:
            has_i = ((arr >> np.uint64(i)) & 1).astype(bool)
            need = np.nonzero(~has_i & ~defect)[0]
            if need.size == 0:
                continue
            patt = witness_pattern(arr, entry, is_modal)
            warr = arr[patt]
            if warr.size == 0:
                defect[need] = True
                continue
            notw = notarr[patt]
            bad = modal_bad_columns(warr) if is_modal else ()
            for k in need:
                t = arr[k]
                viable = (t & notw) == 0
                if is_modal:
                    viable &= warr != t
                    for a_i, bad_col in bad:
                        if t >> np.uint64(a_i) & np.uint64(1):
                            viable &= ~bad_col
                if not viable.any():
                    defect[k] = True
        if not defect.any():
            return survivors
        survivors = [int(t) for t in arr[~defect]]
        if len(survivors) < _VECTOR_MIN:
            return _run_rounds(X, logic, survivors)


def _package(X: AdequateSet, logic: Logic, survivors: tuple[int, ...],
             strict: bool) -> HenkinStructure:
    node_of = {t: f"t{k}" for k, t in enumerate(survivors)}
    nodes = [node_of[t] for t in survivors]
    pre = [(node_of[t], node_of[u]) for t in survivors for u in survivors
           if t | u == u]
    sub = [(node_of[t], node_of[u]) for t in survivors for u in survivors
           if successor_relation(t, u, X, logic, strict=strict)]
    val = {node_of[t]: {X.formulas[i].name for i in X.var_indices if t >> i & 1}
           for t in survivors}
    model = KripkeModel(X.variables, nodes, pre, sub, val)
    return HenkinStructure(X, logic, survivors, strict, model, node_of)


def _assert_truth_lemma(h: HenkinStructure) -> None:
    """Membership must equal forcing for every survivor and adequate formula."""
    X, model = h.adequate, h.model
    if len(h.survivors) <= 400:
        for t in h.survivors:
            node = h.node_of[t]
            for i, f in enumerate(X.formulas):
                if kripke.forces(model, node, f) != bool(t >> i & 1):
                    raise KernelConsistencyError(
                        f"truth lemma fails at type {t:#x} for {f!r}")
    else:
        _assert_truth_lemma_masks(h)
    if len(h.survivors) <= 200:
        cls = CLASS_PREORDER if not h.strict else h.logic.frame_class
        bad = kripke.validate_model(model, cls)
        if bad:
            raise KernelConsistencyError(f"survivor model invalid: {bad[0]}")


def _assert_truth_lemma_masks(h: HenkinStructure) -> None:
    # Bitmask evaluation over survivor indices; used past the size threshold
    # where per-node recursion is too slow.
    X = h.adequate
    survivors = h.survivors
    n = len(survivors)
    pos = {t: k for k, t in enumerate(survivors)}
    up = [0] * n
    succ = [0] * n
    for k, t in enumerate(survivors):
        for j, u in enumerate(survivors):
            if t | u == u:
                up[k] |= 1 << j
            if successor_relation(t, u, X, h.logic, strict=h.strict):
                succ[k] |= 1 << j
    full = (1 << n) - 1
    truth: dict[Formula, int] = {}

    def ev(f: Formula) -> int:
        if f in truth:
            return truth[f]
        if f.kind == "var":
            out = 0
            for k, t in enumerate(survivors):
                if t >> X.index[f] & 1:
                    out |= 1 << k
        elif f.kind == "top":
            out = full
        elif f.kind == "bot":
            out = 0
        elif f.kind == "and":
            out = ev(f.left) & ev(f.right)
        elif f.kind == "or":
            out = ev(f.left) | ev(f.right)
        elif f.kind in ("imp", "arrow", "box"):
            if f.kind == "imp":
                rel, good = up, ev(f.left) & ~ev(f.right) & full
            elif f.kind == "arrow":
                rel, good = succ, ev(f.left) & ~ev(f.right) & full
            else:
                rel, good = succ, ~ev(f.left) & full
            out = 0
            for k in range(n):
                if rel[k] & good == 0:
                    out |= 1 << k
        else:
            raise KernelConsistencyError(f"unexpected {f.kind!r} in adequate set")
        truth[f] = out
        return out

    for i, f in enumerate(X.formulas):
        tv = ev(f)
        for k, t in enumerate(survivors):
            if bool(tv >> k & 1) != bool(t >> i & 1):
                raise KernelConsistencyError(
                    f"truth lemma fails at type {t:#x} for {f!r}")


def pre_henkin(X: AdequateSet, logic: Logic,
               budgets: Optional[config.Budgets] = None) -> HenkinStructure:
    """The elimination fixpoint re-equipped with the non-strict successor rule."""
    logic = get_logic(logic)
    base = eliminate(X, logic, budgets)
    structure = _package(X, logic, base.survivors, strict=False)
    _assert_truth_lemma(structure)
    return structure


def depth(h: HenkinStructure, t) -> int:
    """Length of the longest strictly increasing containment chain above ``t``."""
    mask = t if isinstance(t, int) else h.adequate.mask_of(t)
    if mask not in set(h.survivors):
        raise IslkitError("type does not survive in this structure")

    @functools.lru_cache(maxsize=None)
    def d(m: int) -> int:
        above = [u for u in h.survivors if m | u == u and u != m]
        return 1 + max((d(u) for u in above), default=-1)

    return d(mask)


@dataclass
class Verdict:
    """Outcome of a derivability query; refutations carry a countermodel."""

    derivable: bool
    countermodel: Optional[KripkeModel] = None
    root: Optional[str] = None
    henkin: Optional[HenkinStructure] = field(default=None, repr=False)

    def __bool__(self):
        return self.derivable


_derivable_cache: dict = {}


def derivable(f: Formula, logic: Logic,
              budgets: Optional[config.Budgets] = None) -> Verdict:
    """Decide the formula in the given logic via the elimination kernel.

    Derivable iff the formula belongs to every surviving type of the adequate
    set it generates; otherwise the survivor model refutes it at the
    canonically least survivor lacking it.
    """
    logic = get_logic(logic)
    key = (f, logic.name)
    if key in _derivable_cache:
        return _derivable_cache[key]
    syntax.check_mode(f, logic.mode)
    X = AdequateSet.of([f], logic)
    h = eliminate(X, logic, budgets)
    i = X.index[f]
    missing = [t for t in h.survivors if not t >> i & 1]
    if missing:
        out = Verdict(False, h.model, h.node_of[missing[0]], h)
    else:
        out = Verdict(True, henkin=h)
    _derivable_cache[key] = out   # verdicts do not depend on the budget
    return out


def entails_equiv(gamma: Iterable[Formula], f: Formula, logic: Logic,
                  kind: str = "entails",
                  budgets: Optional[config.Budgets] = None) -> bool:
    """Finite-premise derivability, reduced to a single implication.

    ``entails`` decides ``/\\gamma -> f``; ``equiv`` decides both implications.
    A shared small-model sweep refutes cheaply before the kernel runs; this
    only ever short-circuits the negative answer, so the verdict is always the
    kernel's.
    """
    logic = get_logic(logic)
    if kind not in ("entails", "equiv"):
        raise ValueError(f"unknown kind {kind!r}")
    gamma = list(gamma)
    if kind == "equiv":
        if not gamma:
            raise ValueError("equiv needs exactly the formulas to compare")
        g = syntax.Iff(syntax.big_and(gamma), f)
    else:
        g = syntax.Imp(syntax.big_and(gamma), f)
    if (g, logic.name) not in _derivable_cache and _quick_refute(g, logic) is not None:
        return False
    return derivable(g, logic, budgets).derivable


def _quick_refute(f: Formula, logic: Logic):
    vars = tuple(sorted(syntax.pv(f)))
    if len(vars) > 2:
        return None
    for m, x in _probe_points(vars, logic.frame_class):
        if not kripke.forces(m, x, f):
            return m, x
    return None


@functools.lru_cache(maxsize=None)
def _probe_points(vars: tuple[str, ...], cls: str):
    """A deterministic library of small models used to refute quickly."""
    out = []
    for m in itertools.islice(kripke.enumerate_models(vars, 2, cls), 0, None):
        out.extend((m, x) for x in m.nodes)
    for m in itertools.islice(kripke.enumerate_models(vars, 3, cls), 0, 4000):
        if len(m.nodes) == 3:
            out.extend((m, x) for x in m.nodes)
    return tuple(out)


def brute_force_search(f: Formula, logic: Logic, max_nodes: int = 3,
                       budgets: Optional[config.Budgets] = None):
    """First enumerated (model, node) of the logic's frame class refuting ``f``,
    or None.  Independent of the elimination kernel."""
    logic = get_logic(logic)
    budgets = budgets or config.DEFAULT
    syntax.check_mode(f, logic.mode)
    vars = tuple(sorted(syntax.pv(f)))
    for m in kripke.enumerate_models(vars, max_nodes, logic.frame_class,
                                     budget_nodes=budgets.max_nodes):
        for x in m.nodes:
            if not kripke.forces(m, x, f):
                return m, x
    return None
