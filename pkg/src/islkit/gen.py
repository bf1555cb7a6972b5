"""Seeded random generators for formulas and models, shared by the test suite
and the experiment scripts.  Everything is deterministic given the Random
instance."""

from __future__ import annotations

import random
from typing import Iterable, Optional, Sequence

from . import kripke, syntax
from .kripke import KripkeModel
from .syntax import Formula


def random_formula(rng: random.Random, size: int, vars: Sequence[str],
                   mode: str = syntax.ARROW) -> Formula:
    """A random formula with at most ``size`` connective/atom nodes."""
    if size <= 1:
        pool = [syntax.Top, syntax.Bot] + [syntax.Var(v) for v in vars]
        return rng.choice(pool)
    if mode == syntax.BOX:
        kinds = ("and", "or", "imp", "box", "box")
    else:
        kinds = ("and", "or", "imp", "arrow", "arrow")
    kind = rng.choice(kinds)
    if kind == "box":
        return syntax.Box(random_formula(rng, size - 1, vars, mode))
    lsize = rng.randint(1, max(1, size - 2))
    left = random_formula(rng, lsize, vars, mode)
    right = random_formula(rng, size - 1 - lsize, vars, mode)
    ctor = {"and": syntax.And, "or": syntax.Or,
            "imp": syntax.Imp, "arrow": syntax.Arrow}[kind]
    return ctor(left, right)


def random_modalized(rng: random.Random, size: int, vars: Sequence[str],
                     r: str, mode: str = syntax.ARROW) -> Formula:
    """A random formula in which ``r`` occurs only under an arrow/box."""
    while True:
        f = random_formula(rng, size, tuple(vars) + (r,), mode)
        cls = syntax.classify(f, r)
        if cls.modalized and r in syntax.pv(f):
            return f


def random_semipositive(rng: random.Random, size: int, vars: Sequence[str],
                        r: str, mode: str = syntax.ARROW) -> Formula:
    """A random formula semi-positive but not modalized in ``r``."""
    while True:
        f = random_formula(rng, size, tuple(vars) + (r,), mode)
        cls = syntax.classify(f, r)
        if cls.semipositive and not cls.modalized:
            return f


def random_model(rng: random.Random, max_nodes: int, vars: Sequence[str],
                 cls: str = kripke.CLASS_ISL, rooted: bool = False) -> KripkeModel:
    """A random valid model of the class; ``rooted`` forces a least node w0."""
    n = rng.randint(1, max_nodes)
    nodes = [f"w{i}" for i in range(n)]
    level = {i: (0 if (rooted and i == 0) else rng.randint(0, 2)) for i in range(n)}
    pre = {(i, i) for i in range(n)}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if rooted and i == 0:
                pre.add((i, j))
            elif level[i] < level[j] and rng.random() < 0.7:
                pre.add((i, j))
    _close_transitive(pre, n)
    strict = [(i, j) for (i, j) in pre if i != j]
    sub = {p for p in strict if rng.random() < 0.5}
    _saturate_sub(pre, sub, n, brilliant=(cls == kripke.CLASS_BRILLIANT))
    val = {}
    for i in range(n):
        val[i] = set()
    for v in vars:
        chosen = {i for i in range(n) if rng.random() < 0.5}
        for i in list(chosen):
            for j in range(n):
                if (i, j) in pre:
                    chosen.add(j)
        for i in chosen:
            val[i].add(v)
    m = KripkeModel(tuple(sorted(vars)), nodes,
                    [(nodes[i], nodes[j]) for i, j in sorted(pre)],
                    [(nodes[i], nodes[j]) for i, j in sorted(sub)],
                    {nodes[i]: val[i] for i in range(n)},
                    root=nodes[0] if rooted else None)
    assert not kripke.validate_model(m, cls), kripke.validate_model(m, cls)
    return m


def _close_transitive(pre: set, n: int) -> None:
    changed = True
    while changed:
        changed = False
        for i, j in list(pre):
            for k in range(n):
                if (j, k) in pre and (i, k) not in pre:
                    pre.add((i, k))
                    changed = True


def _saturate_sub(pre: set, sub: set, n: int, brilliant: bool) -> None:
    changed = True
    while changed:
        changed = False
        for i, j in list(pre):
            for k in range(n):
                if (j, k) in sub and (i, k) not in sub:
                    sub.add((i, k))
                    changed = True
        if brilliant:
            for i, j in list(sub):
                for k in range(n):
                    if (j, k) in pre and (i, k) not in sub:
                        sub.add((i, k))
                        changed = True


def vary_model(rng: random.Random, m: KripkeModel,
               add_vars: Sequence[str] = (), drop_vars: Sequence[str] = ()) -> KripkeModel:
    """A copy of ``m`` with some variables dropped and fresh ones valued
    randomly (monotonically); the frame is untouched, so every node stays
    bisimilar to its original over the kept variables."""
    keep = [v for v in m.vars if v not in set(drop_vars)]
    vars = tuple(sorted(set(keep) | set(add_vars)))
    idx = {x: i for i, x in enumerate(m.nodes)}
    val = {x: {v for v in m.val[x] if v in keep} for x in m.nodes}
    for v in add_vars:
        chosen = {x for x in m.nodes if rng.random() < 0.5}
        for x in list(chosen):
            for y in m.nodes:
                if (x, y) in m.pre:
                    chosen.add(y)
        for x in chosen:
            val[x].add(v)
    return KripkeModel(vars, m.nodes, m.pre, m.sub, val, root=m.root)
