"""Uniform interpolation: enumeration of bounded-complexity classes up to
provable equivalence, definitional post-/pre-interpolants with a-posteriori
verification, the retraction route for the two stronger logics, and a bounded
check of the semantic quantifier characterisation.

Enumeration is the central cost.  Candidates are bucketed by their truth
vector over a fixed library of small models before the kernel confirms
equivalence, new conjuncts/disjuncts are absorbed incrementally, and every
computed interpolant is certified by ``verify_interpolant`` rather than
trusted, so budget-capped bounds below the definitional one are safe.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from . import bisim, config, decide, kripke, syntax, translate
from .decide import ISL_A, ISL_A_PLUS, ISL_BOX, Logic, get_logic
from .errors import BudgetExceededError, IslkitError, KernelConsistencyError
from .kripke import KripkeModel
from .syntax import Formula


@dataclass(frozen=True)
class ClassEnumeration:
    """Canonical representatives, up to provable equivalence, of the formulas
    over ``pvars`` with complexity at most ``bound``."""

    pvars: tuple[str, ...]
    bound: int
    logic_name: str
    representatives: tuple[Formula, ...]

    def __len__(self):
        return len(self.representatives)


_enum_cache: dict = {}
_FP_3NODE_LIMIT = 220


class _Dedup:
    """Equivalence-class store: truth vectors over a small-model library in
    front of the kernel.

    A fresh vector proves a fresh class without a kernel call; only vector
    collisions are confirmed through the kernel.  Meet/join candidate vectors
    are composed pointwise from their arguments' vectors, and candidates
    absorbed by a provable order relation between the arguments never reach
    the bucket check at all.
    """

    def __init__(self, logic: Logic, pvars: tuple[str, ...],
                 budgets: config.Budgets):
        self.logic = logic
        self.budgets = budgets
        self.kernel_budgets = dataclasses.replace(
            budgets, max_types=max(budgets.max_types, 48))
        self.probes = _probe_library(pvars, logic.frame_class)
        self.reps: list[Formula] = []
        self.vec: dict[Formula, int] = {}
        self.buckets: dict[int, list[Formula]] = {}
        self._le: dict = {}

    def vector(self, f: Formula) -> int:
        v = self.vec.get(f)
        if v is None:
            v = 0
            for k, (m, x) in enumerate(self.probes):
                if kripke.forces(m, x, f):
                    v |= 1 << k
            self.vec[f] = v
        return v

    def equivalent(self, f: Formula, g: Formula) -> bool:
        return decide.entails_equiv([f], g, self.logic, "equiv",
                                    self.kernel_budgets)

    def le(self, a: Formula, b: Formula) -> bool:
        """Provable order between stored formulas, with a vector pre-check."""
        key = (a, b)
        out = self._le.get(key)
        if out is None:
            if self.vector(a) & ~self.vector(b):
                out = False     # refuted on a probe model
            else:
                out = decide.entails_equiv([a], b, self.logic, "entails",
                                           self.kernel_budgets)
            self._le[key] = out
        return out

    def canonical(self, f: Formula) -> Optional[Formula]:
        """The stored representative equivalent to ``f``, if any."""
        for r in self.buckets.get(self.vector(f), ()):
            if self.equivalent(f, r):
                return r
        return None

    def _add_vec(self, f: Formula, v: int) -> bool:
        bucket = self.buckets.get(v)
        if bucket:
            for r in bucket:
                if self.equivalent(f, r):
                    return False
            bucket.append(f)
        else:
            self.buckets[v] = [f]
        self.reps.append(f)
        return True

    def add(self, f: Formula) -> bool:
        """Record ``f`` unless an equivalent representative exists."""
        return self._add_vec(f, self.vector(f))

    def add_lattice(self, a: Formula, b: Formula, op: str) -> bool:
        """Offer a meet or join of two stored representatives."""
        if op == "and":
            if self.le(a, b):
                return False     # a & b is a
            if self.le(b, a):
                return False
            f = syntax.And(a, b)
            v = self.vector(a) & self.vector(b)
        else:
            if self.le(a, b):
                return False     # a | b is b
            if self.le(b, a):
                return False
            f = syntax.Or(a, b)
            v = self.vector(a) | self.vector(b)
        self.vec[f] = v
        return self._add_vec(f, v)


_probe_cache: dict = {}


def _kernel_budgets(budgets: config.Budgets) -> config.Budgets:
    # Equivalence instances between enumerated representatives routinely
    # exceed the end-user adequate-set cap; give the kernel headroom.
    return dataclasses.replace(budgets, max_types=max(budgets.max_types, 48))


def _probe_library(pvars: tuple[str, ...], cls: str):
    key = (pvars, cls)
    cached = _probe_cache.get(key)
    if cached is None:
        out = []
        for m in kripke.enumerate_models(pvars, 2, cls):
            out.extend((m, x) for x in m.nodes)
        three = (m for m in kripke.enumerate_models(pvars, 3, cls)
                 if len(m.nodes) == 3)
        for m in itertools.islice(three, _FP_3NODE_LIMIT):
            out.extend((m, x) for x in m.nodes)
        cached = tuple(out)
        _probe_cache[key] = cached
    return cached


def enum_representatives(pvars: Iterable[str], n: int, logic,
                         budgets: Optional[config.Budgets] = None) -> ClassEnumeration:
    """Layered generation: implications and modal combinations of the previous
    layer's representatives, then saturation under conjunction/disjunction,
    deduplicating through the kernel at every step."""
    logic = get_logic(logic)
    budgets = budgets or config.DEFAULT
    pvars = syntax.variable_set(pvars)
    key = (pvars, n, logic.name)
    if key in _enum_cache:
        return _enum_cache[key]
    if len(pvars) > budgets.enum_vars:
        raise BudgetExceededError(
            f"{len(pvars)} variables exceed the enumeration budget {budgets.enum_vars}")
    if n > budgets.enum_depth:
        raise BudgetExceededError(
            f"depth {n} exceeds the enumeration budget {budgets.enum_depth}")

    store = _Dedup(logic, pvars, budgets)
    for f in [syntax.Bot, syntax.Top] + [syntax.Var(p) for p in pvars]:
        store.add(f)
    _saturate_lattice(store, budgets)
    for _ in range(n):
        base = list(store.reps)
        for a in base:
            if logic is ISL_BOX:
                _check_cap(store, budgets)
                store.add(syntax.Box(a))
            for b in base:
                _check_cap(store, budgets)
                store.add(syntax.Imp(a, b))
                if logic is not ISL_BOX:
                    _check_cap(store, budgets)
                    store.add(syntax.Arrow(a, b))
        _saturate_lattice(store, budgets)
    out = ClassEnumeration(pvars, n, logic.name, tuple(store.reps))
    _enum_cache[key] = out
    return out


def _check_cap(store: _Dedup, budgets: config.Budgets) -> None:
    if len(store.reps) >= budgets.enum_reps:
        raise BudgetExceededError(
            f"more than {budgets.enum_reps} representatives",
            partial=tuple(store.reps))


_basis_cache: dict = {}


def agreement_basis(pvars: Iterable[str], n: int, logic,
                    budgets: Optional[config.Budgets] = None) -> tuple[Formula, ...]:
    """A finite set on which pointwise agreement coincides with agreement on
    the whole complexity-``n`` class.

    Forcing of conjunctions and disjunctions is pointwise, and an implication
    or arrow between arbitrary bounded classes is equivalent to one between
    their canonical representatives, so the previous level's exact class list
    plus this level's implication/arrow (or box) combinations generate every
    class of level ``n`` under the lattice connectives.  The full class
    lattice can be exponentially larger; agreement questions never need it.
    """
    logic = get_logic(logic)
    budgets = budgets or config.DEFAULT
    pvars = syntax.variable_set(pvars)
    key = (pvars, n, logic.name)
    if key in _basis_cache:
        return _basis_cache[key]
    if n == 0:
        out = enum_representatives(pvars, 0, logic, budgets).representatives
        _basis_cache[key] = out
        return out
    prev = enum_representatives(pvars, n - 1, logic, budgets).representatives
    store = _Dedup(logic, pvars, budgets)
    for f in prev:
        store.add(f)
    for a in prev:
        if logic is ISL_BOX:
            _check_cap(store, budgets)
            store.add(syntax.Box(a))
        for b in prev:
            _check_cap(store, budgets)
            store.add(syntax.Imp(a, b))
            if logic is not ISL_BOX:
                _check_cap(store, budgets)
                store.add(syntax.Arrow(a, b))
    out = tuple(store.reps)
    _basis_cache[key] = out
    return out


def _saturate_lattice(store: _Dedup, budgets: config.Budgets) -> None:
    """Close the current representatives under conjunction and disjunction."""
    frontier = list(store.reps)
    tried: set = set()
    while frontier:
        new = []
        snapshot = list(store.reps)
        for a in frontier:
            for b in snapshot:
                if a is b:
                    continue
                pair = (a, b) if syntax.sort_key(a) <= syntax.sort_key(b) else (b, a)
                if pair in tried:
                    continue
                tried.add(pair)
                for op in ("and", "or"):
                    _check_cap(store, budgets)
                    if store.add_lattice(pair[0], pair[1], op):
                        new.append(store.reps[-1])
        frontier = new


def _candidate_pool(pvars, n: int, logic, budgets) -> tuple[tuple[Formula, ...], bool]:
    """The exact class list where that is known to be affordable (no
    variables, depth zero, or one variable at depth one), else the agreement
    basis, an equivalent core for meets, joins and agreement questions."""
    if len(pvars) == 0 or n == 0 or (len(pvars) == 1 and n <= 1):
        try:
            return enum_representatives(pvars, n, logic, budgets).representatives, True
        except BudgetExceededError:
            pass
    return agreement_basis(pvars, n, logic, budgets), False


def theta_split(m: KripkeModel, x, pvars: Iterable[str], n: int, logic,
                budgets: Optional[config.Budgets] = None) -> tuple[Formula, Formula]:
    """Canonical conjunction of the forced representatives and canonical
    disjunction of the unforced ones, at the given node.

    Conjunction and disjunction distribute over the split, so splitting over
    the agreement basis yields formulas provably equivalent to the split over
    the entire class."""
    reps, _ = _candidate_pool(pvars, n, logic, budgets)
    forced = [f for f in reps if kripke.forces(m, x, f)]
    unforced = [f for f in reps if not kripke.forces(m, x, f)]
    return syntax.big_and(forced), syntax.big_or(unforced)


# ---------------------------------------------------------------------------
# Interpolants
# ---------------------------------------------------------------------------

@dataclass
class InterpolantReport:
    """A computed (or audited) interpolant together with its check record."""

    formula: Formula
    qvars: tuple[str, ...]
    kind: str                     # "exists" or "forall"
    logic_name: str
    theta: Formula
    nu: int
    full_bound: int               # the definitional complexity bound
    bound_used: Optional[int]     # enumeration bound actually used (None: audit only)
    checks: dict
    counterexample: Optional[Formula] = None
    samples_checked: int = 0

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _nu_for(f: Formula, logic: Logic) -> int:
    if logic is ISL_A:
        return syntax.count_nu(f, "arrow").nu
    if logic is ISL_A_PLUS:
        return syntax.count_nu(f, "arrowplus").nu
    return syntax.count_nu(f, "box").nu


def post_interpolant(f: Formula, qvars: Iterable[str], logic,
                     budgets: Optional[config.Budgets] = None,
                     bound: Optional[int] = None) -> InterpolantReport:
    """The strongest qvars-free consequence of ``f`` (its existential
    quantification), as a verified report."""
    return _interpolant(f, qvars, logic, "exists", budgets, bound)


def pre_interpolant(f: Formula, qvars: Iterable[str], logic,
                    budgets: Optional[config.Budgets] = None,
                    bound: Optional[int] = None) -> InterpolantReport:
    """The weakest qvars-free antecedent of ``f`` (its universal
    quantification), as a verified report."""
    return _interpolant(f, qvars, logic, "forall", budgets, bound)


def _interpolant(f, qvars, logic, kind, budgets, bound) -> InterpolantReport:
    logic = get_logic(logic)
    budgets = budgets or config.DEFAULT
    qvars = syntax.variable_set(qvars)
    syntax.check_mode(f, logic.mode)

    # Routing: the two stronger logics go through the arrow kernel.
    if logic is ISL_A:
        g, back = f, None
    elif logic is ISL_A_PLUS:
        g, back = translate.apply_translation(f, translate.TRIV), None
    else:
        g, back = translate.apply_translation(f, translate.RED), translate.LB

    nu = syntax.count_nu(g, "arrow").nu
    full_bound = 2 * nu + 2 if kind == "exists" else 2 * nu + 1
    pvars = syntax.variable_set(syntax.pv(g) - set(qvars))
    b = bound if bound is not None else min(full_bound, budgets.enum_depth)

    kb = _kernel_budgets(budgets)
    pool, exact = _candidate_pool(pvars, b, ISL_A, budgets)
    report = None
    for widen in (False, True):
        candidates = pool if not widen else _widen_pool(pool, kind)
        if kind == "exists":
            selected = [chi for chi in candidates
                        if decide.entails_equiv([g], chi, ISL_A, "entails", kb)]
            theta = _fold_meet(selected, kb)
        else:
            selected = [chi for chi in candidates
                        if decide.entails_equiv([chi], g, ISL_A, "entails", kb)]
            theta = _fold_join(selected, kb)
        theta = _canonicalize(theta, ISL_A, pvars, b, budgets)
        if back is not None:
            theta = translate.apply_translation(theta, back)
            theta = _canonicalize(theta, ISL_BOX, pvars,
                                  min(b, budgets.enum_depth), budgets)
        sample = _default_sample(pvars, min(b, budgets.enum_depth), logic, budgets)
        report = verify_interpolant(f, qvars, theta, kind, logic, sample, budgets)
        report.bound_used = b
        if report.ok:
            return report
        if exact and not widen:
            break   # an exact pool cannot be improved by widening
    if b >= full_bound and exact:
        raise KernelConsistencyError(
            "interpolant computed at the definitional bound failed verification")
    raise BudgetExceededError(
        f"bound {b} (definitional {full_bound}) failed verification; "
        "raise the bound", partial=report)


def _widen_pool(pool, kind: str) -> list[Formula]:
    """Add pairwise joins (for meets of consequences) or meets (dually): a
    basis pool omits lattice combinations, and a disjunctive consequence need
    not be implied by any single basis consequence."""
    combine = syntax.Or if kind == "exists" else syntax.And
    out = list(pool)
    for i, a in enumerate(pool):
        for bformula in pool[i + 1:]:
            out.append(combine(a, bformula))
    return out


def _fold_meet(selected, kb) -> Formula:
    theta = syntax.Top
    for chi in selected:
        if decide.entails_equiv([theta], chi, ISL_A, "entails", kb):
            continue                       # absorbed
        if decide.entails_equiv([chi], theta, ISL_A, "entails", kb):
            theta = chi
        else:
            theta = syntax.And(theta, chi)
    return theta


def _fold_join(selected, kb) -> Formula:
    theta = syntax.Bot
    for chi in selected:
        if decide.entails_equiv([chi], theta, ISL_A, "entails", kb):
            continue
        if decide.entails_equiv([theta], chi, ISL_A, "entails", kb):
            theta = chi
        else:
            theta = syntax.Or(theta, chi)
    return theta


def _canonicalize(theta: Formula, logic: Logic, pvars, b: int,
                  budgets: config.Budgets) -> Formula:
    try:
        pool, _ = _candidate_pool(pvars, b, logic, budgets)
    except BudgetExceededError:
        return theta
    if theta in pool:
        return theta
    kb = _kernel_budgets(budgets)
    for r in pool:
        if decide.entails_equiv([theta], r, logic, "equiv", kb):
            return r
    return theta


def _default_sample(pvars, depth: int, logic: Logic,
                    budgets: config.Budgets) -> tuple[Formula, ...]:
    try:
        return _candidate_pool(pvars, depth, logic, budgets)[0]
    except BudgetExceededError:
        return tuple(syntax.Var(p) for p in pvars) + (syntax.Bot, syntax.Top)


def verify_interpolant(f: Formula, qvars: Iterable[str], theta: Formula,
                       kind: str, logic, sample: Iterable[Formula],
                       budgets: Optional[config.Budgets] = None) -> InterpolantReport:
    """Audit an alleged interpolant: variable condition, base implication, the
    universal property over the sample, and the complexity bound.  Failures are
    report data, not errors."""
    logic = get_logic(logic)
    qvars = syntax.variable_set(qvars)
    if kind not in ("exists", "forall"):
        raise ValueError(f"unknown kind {kind!r}")
    sample = list(sample)
    for psi in sample:
        if syntax.pv(psi) & set(qvars):
            raise ValueError(f"sample formula {psi!r} mentions quantified variables")

    nu = _nu_for(f, logic)
    kb = _kernel_budgets(budgets or config.DEFAULT)
    full_bound = 2 * nu + 2 if kind == "exists" else 2 * nu + 1
    checks = {"variable_condition": syntax.pv(theta) <= (syntax.pv(f) - set(qvars))}
    if kind == "exists":
        checks["base_implication"] = decide.entails_equiv([f], theta, logic, "entails", kb)
    else:
        checks["base_implication"] = decide.entails_equiv([theta], f, logic, "entails", kb)
    counterexample = None
    universal_ok = True
    for psi in sample:
        if kind == "exists":
            lhs = decide.entails_equiv([f], psi, logic, "entails", kb)
            rhs = decide.entails_equiv([theta], psi, logic, "entails", kb)
        else:
            lhs = decide.entails_equiv([psi], f, logic, "entails", kb)
            rhs = decide.entails_equiv([psi], theta, logic, "entails", kb)
        if lhs != rhs:
            universal_ok = False
            counterexample = psi
            break
    checks["universal_property"] = universal_ok
    checks["complexity_bound"] = syntax.complexity(theta) <= full_bound
    return InterpolantReport(
        formula=f, qvars=qvars, kind=kind, logic_name=logic.name, theta=theta,
        nu=nu, full_bound=full_bound, bound_used=None, checks=checks,
        counterexample=counterexample, samples_checked=len(sample))


# ---------------------------------------------------------------------------
# Semantic quantifiers
# ---------------------------------------------------------------------------

def semantic_quantifier_check(m: KripkeModel, x, q: str, f: Formula, logic,
                              max_nodes: int = 3,
                              budgets: Optional[config.Budgets] = None) -> str:
    """Bounded check of the bisimulation-extension reading of the existential
    quantifier: compare forcing of the post-interpolant at ``x`` against a
    search for a q-extension bisimilar to ``x`` that forces ``f``.

    Returns "holds", "fails", or "unknown" when forcing claims a witness that
    the bounded search cannot exhibit.
    """
    logic = get_logic(logic)
    budgets = budgets or config.DEFAULT
    if q in m.vars:
        raise IslkitError(f"{q!r} already occurs in the model")
    if not syntax.pv(f) <= set(m.vars) | {q}:
        raise IslkitError("formula mentions variables outside the model plus q")
    theta = post_interpolant(f, (q,), logic, budgets).theta
    forced = kripke.forces(m, x, theta)
    found = _find_extension(m, x, q, f, logic, max_nodes, budgets)
    if forced:
        return "holds" if found else "unknown"
    return "fails" if found else "holds"


def _find_extension(m, x, q, f, logic, max_nodes, budgets) -> bool:
    ext_vars = tuple(sorted(set(m.vars) | {q}))
    base = tuple(m.vars)
    for candidate in kripke.enumerate_models(ext_vars, max_nodes,
                                             logic.frame_class,
                                             budget_nodes=budgets.max_nodes):
        rel = bisim.full_bisim(m, candidate, base)
        for n in candidate.nodes:
            if (x, n) in rel and kripke.forces(candidate, n, f):
                return True
    return False
