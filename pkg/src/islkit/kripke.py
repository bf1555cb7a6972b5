"""Finite Kripke models: validation, forcing, theories, exhaustive enumeration.

A model carries a preorder ``pre`` (the intuitionistic order, a weak partial
order), a modal relation ``sub`` for the Lewis arrow, and a monotone valuation.
Relations are stored exactly as given; nothing is closed implicitly, so
validation is bit-exact against input files.  ``close_model`` saturates a raw
relation tuple on request.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from . import syntax
from .errors import BudgetExceededError, IslkitError
from .syntax import Formula

CLASS_ISL = "isl"
CLASS_BRILLIANT = "brilliant"
CLASS_PREORDER = "preorder-only"
CLASSES = (CLASS_ISL, CLASS_BRILLIANT, CLASS_PREORDER)


class KripkeModel:
    """Immutable finite model.  Nodes are opaque ids ordered by their position
    in the ``nodes`` tuple."""

    __slots__ = ("vars", "nodes", "pre", "sub", "val", "root",
                 "_index", "_up", "_succ", "_cache")

    def __init__(self, vars: Iterable[str], nodes: Iterable, pre: Iterable,
                 sub: Iterable, val: dict, root=None):
        self.vars = tuple(vars)
        self.nodes = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise IslkitError("duplicate node ids")
        self.pre = frozenset((a, b) for a, b in pre)
        self.sub = frozenset((a, b) for a, b in sub)
        self.val = {x: frozenset(val.get(x, ())) for x in self.nodes}
        self.root = root
        self._index = {x: i for i, x in enumerate(self.nodes)}
        self._up = {x: tuple(y for y in self.nodes if (x, y) in self.pre)
                    for x in self.nodes}
        self._succ = {x: tuple(y for y in self.nodes if (x, y) in self.sub)
                      for x in self.nodes}
        self._cache: dict = {}

    def node_index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise IslkitError(f"unknown node {x!r}") from None

    def __repr__(self):
        return (f"KripkeModel(|K|={len(self.nodes)}, vars={list(self.vars)}, "
                f"root={self.root!r})")


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple

    def __str__(self):
        return f"{self.condition} at {self.witness}"


def validate_model(m: KripkeModel, cls: str = CLASS_ISL) -> list[Violation]:
    """Every violated frame/valuation condition, each with a witnessing tuple.

    ``isl`` checks the base frame conditions; ``brilliant`` additionally checks
    sub;pre-composition closure; ``preorder-only`` skips irreflexivity of sub
    (pre-Henkin structures carry reflexive modal points).
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown model class {cls!r}")
    out: list[Violation] = []
    nodes = m.nodes
    node_set = set(nodes)
    for rel, name in ((m.pre, "pre"), (m.sub, "sub")):
        for a, b in sorted(rel, key=_pair_key(m)):
            if a not in node_set or b not in node_set:
                out.append(Violation(f"{name} mentions unknown node", (a, b)))
    for x in nodes:
        if (x, x) not in m.pre:
            out.append(Violation("pre not reflexive", (x,)))
    for x, y in sorted(m.pre, key=_pair_key(m)):
        if (y, x) in m.pre and x != y:
            out.append(Violation("pre not antisymmetric", (x, y)))
        for z in nodes:
            if (y, z) in m.pre and (x, z) not in m.pre:
                out.append(Violation("pre not transitive", (x, y, z)))
    if cls != CLASS_PREORDER:
        for x in nodes:
            if (x, x) in m.sub:
                out.append(Violation("irreflexivity", (x,)))
    for x, y in sorted(m.sub, key=_pair_key(m)):
        if (x, y) not in m.pre:
            out.append(Violation("strong (sub not below pre)", (x, y)))
    for x, y in sorted(m.pre, key=_pair_key(m)):
        for z in nodes:
            if (y, z) in m.sub and (x, z) not in m.sub:
                out.append(Violation("sub-p (pre;sub not in sub)", (x, y, z)))
    if cls == CLASS_BRILLIANT:
        for x, y in sorted(m.sub, key=_pair_key(m)):
            for z in nodes:
                if (y, z) in m.pre and (x, z) not in m.sub:
                    out.append(Violation("brilliancy (sub;pre not in sub)", (x, y, z)))
    for x, y in sorted(m.pre, key=_pair_key(m)):
        for p in m.val[x]:
            if p not in m.val[y]:
                out.append(Violation("valuation not monotone", (x, y, p)))
    for x in nodes:
        for p in m.val[x]:
            if p not in m.vars:
                out.append(Violation("valuation uses unknown variable", (x, p)))
    return out


def _pair_key(m: KripkeModel):
    return lambda ab: (m._index.get(ab[0], -1), m._index.get(ab[1], -1))


def close_model(m: KripkeModel, brilliant: bool = False) -> KripkeModel:
    """Reflexive-transitive closure of pre and sub-p (optionally brilliancy)
    saturation of sub; the valuation is not touched."""
    pre = set(m.pre) | {(x, x) for x in m.nodes}
    changed = True
    while changed:
        changed = False
        for x, y in list(pre):
            for z in m.nodes:
                if (y, z) in pre and (x, z) not in pre:
                    pre.add((x, z))
                    changed = True
    sub = set(m.sub)
    changed = True
    while changed:
        changed = False
        for x, y in list(pre):
            for z in m.nodes:
                if (y, z) in sub and (x, z) not in sub:
                    sub.add((x, z))
                    changed = True
        if brilliant:
            for x, y in list(sub):
                for z in m.nodes:
                    if (y, z) in pre and (x, z) not in sub:
                        sub.add((x, z))
                        changed = True
    return KripkeModel(m.vars, m.nodes, pre, sub, m.val, m.root)


def forces(m: KripkeModel, x, f: Formula) -> bool:
    """The forcing relation; boxes quantify over sub like ``top ~>``.

    Results are memoized on the model, which is sound because models are
    immutable after construction.
    """
    m.node_index(x)
    unknown = syntax.pv(f) - set(m.vars)
    if unknown:
        raise IslkitError(f"unknown variables {sorted(unknown)}")
    return _forces(m, x, f)


def _forces(m: KripkeModel, x, f: Formula) -> bool:
    key = (x, f)
    cached = m._cache.get(key)
    if cached is not None:
        return cached
    kind = f.kind
    if kind == "var":
        out = f.name in m.val[x]
    elif kind == "top":
        out = True
    elif kind == "bot":
        out = False
    elif kind == "and":
        out = _forces(m, x, f.left) and _forces(m, x, f.right)
    elif kind == "or":
        out = _forces(m, x, f.left) or _forces(m, x, f.right)
    elif kind == "imp":
        out = all(not _forces(m, y, f.left) or _forces(m, y, f.right)
                  for y in m._up[x])
    elif kind == "arrow":
        out = all(not _forces(m, y, f.left) or _forces(m, y, f.right)
                  for y in m._succ[x])
    elif kind == "box":
        out = all(_forces(m, y, f.left) for y in m._succ[x])
    else:
        raise IslkitError(f"cannot evaluate {kind!r} nodes")
    m._cache[key] = out
    return out


def node_theory(m: KripkeModel, x, X: Iterable[Formula]) -> list[Formula]:
    """The members of ``X`` forced at ``x``, in ``X``'s order."""
    return [f for f in X if forces(m, x, f)]


# ---------------------------------------------------------------------------
# Exhaustive enumeration (the brute-force oracle substrate)
# ---------------------------------------------------------------------------

def enumerate_models(vars: Iterable[str], max_nodes: int,
                     cls: str = CLASS_ISL,
                     budget_nodes: int = 4) -> Iterator[KripkeModel]:
    """Every model of the class with 1..max_nodes nodes, in deterministic
    order.  Renamed copies are allowed; every emitted model validates."""
    if cls not in (CLASS_ISL, CLASS_BRILLIANT):
        raise ValueError(f"enumeration class must be isl or brilliant, not {cls!r}")
    if max_nodes > budget_nodes:
        raise BudgetExceededError(
            f"max_nodes {max_nodes} exceeds budget {budget_nodes}")
    vars = tuple(sorted(set(vars)))
    for n in range(1, max_nodes + 1):
        nodes = tuple(f"w{i}" for i in range(n))
        for pre in _partial_orders(n):
            strict = [(i, j) for i in range(n) for j in range(n)
                      if i != j and (i, j) in pre]
            for sub in _sub_relations(pre, strict, n, cls == CLASS_BRILLIANT):
                for val in _monotone_valuations(pre, n, vars):
                    yield KripkeModel(
                        vars, nodes,
                        [(nodes[i], nodes[j]) for i, j in sorted(pre)],
                        [(nodes[i], nodes[j]) for i, j in sorted(sub)],
                        {nodes[i]: val[i] for i in range(n)})


def _partial_orders(n: int) -> Iterator[frozenset]:
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    diag = [(i, i) for i in range(n)]
    for bits in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
        rel.update(diag)
        if any((j, i) in rel for i, j in rel if i != j):
            continue
        if any((i, k) not in rel
               for i, j in rel for k in range(n) if (j, k) in rel):
            continue
        yield frozenset(rel)


def _sub_relations(pre, strict, n, brilliant) -> Iterator[frozenset]:
    for bits in range(1 << len(strict)):
        sub = frozenset(strict[k] for k in range(len(strict)) if bits >> k & 1)
        ok = True
        for x in range(n):
            for y in range(n):
                if (x, y) not in pre:
                    continue
                for z in range(n):
                    if (y, z) in sub and (x, z) not in sub:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok and brilliant:
            for x, y in sub:
                for z in range(n):
                    if (y, z) in pre and (x, z) not in sub:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            yield sub


def _monotone_valuations(pre, n, vars) -> Iterator[dict]:
    upsets = []
    for bits in range(1 << n):
        sel = {i for i in range(n) if bits >> i & 1}
        if all(j in sel for i in sel for j in range(n) if (i, j) in pre):
            upsets.append(sel)
    for combo in itertools.product(upsets, repeat=len(vars)):
        yield {i: frozenset(v for v, sel in zip(vars, combo) if i in sel)
               for i in range(n)}


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def to_json_dict(m: KripkeModel) -> dict:
    out = {
        "vars": list(m.vars),
        "nodes": list(m.nodes),
        "pre": [[a, b] for a, b in sorted(m.pre, key=_pair_key(m))],
        "sub": [[a, b] for a, b in sorted(m.sub, key=_pair_key(m))],
        "val": {str(x): sorted(m.val[x]) for x in m.nodes},
    }
    if m.root is not None:
        out["root"] = m.root
    return out


def from_json_dict(data: dict) -> KripkeModel:
    return KripkeModel(
        data["vars"], data["nodes"],
        [tuple(p) for p in data["pre"]],
        [tuple(p) for p in data["sub"]],
        {x: data["val"].get(str(x), data["val"].get(x, [])) for x in data["nodes"]},
        data.get("root"))


def load(path: str) -> KripkeModel:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))


def dump(m: KripkeModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(m), fh, indent=2, default=str)
        fh.write("\n")


def to_dot(m: KripkeModel) -> str:
    """DOT text: solid edges for sub, dashed for pre (transitively reduced for
    display; self-loops omitted)."""
    lines = ["digraph model {"]
    for x in m.nodes:
        label = ",".join(sorted(m.val[x])) or "·"
        shape = ' shape=doublecircle' if x == m.root else ""
        lines.append(f'  "{x}" [label="{x}\\n{label}"{shape}];')
    for rel, style in ((m.sub, "solid"), (m.pre, "dashed")):
        proper = {(a, b) for a, b in rel if a != b}
        reduced = {(a, b) for a, b in proper
                   if not any((a, c) in proper and (c, b) in proper
                              for c in m.nodes if c not in (a, b))}
        for a, b in sorted(reduced, key=_pair_key(m)):
            if style == "dashed" and (a, b) in m.sub:
                continue
            lines.append(f'  "{a}" -> "{b}" [style={style}];')
    lines.append("}")
    return "\n".join(lines)
