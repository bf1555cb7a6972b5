"""Compositional translations between the arrow and box languages, and
elimination of the single-variable fixpoint binder."""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax
from .errors import FixpointGrammarError, ModeError
from .syntax import ARROW, ARROW_FP, BOX, Formula


@dataclass(frozen=True)
class TranslationMap:
    """A compositional translation, given by its clause for the modal
    connective over the placeholders p0, p1."""

    name: str
    source: str           # language mode of inputs
    target: str           # language mode of outputs
    clause: Formula       # image of p0 ~> p1 (arrow source) or #p0 (box source)


def _c(text: str, mode: str) -> Formula:
    return syntax.parse(text, mode)


ID = TranslationMap("id", ARROW, ARROW, _c("p0 ~> p1", ARROW))
TRIV = TranslationMap("triv", ARROW, ARROW, _c("top ~> (p0 -> p1)", ARROW))
LB = TranslationMap("lb", ARROW, BOX, _c("#(p0 -> p1)", BOX))
BL = TranslationMap("bl", BOX, ARROW, _c("top ~> p0", ARROW))
RED = TranslationMap("red", BOX, ARROW, _c("top ~> p0", ARROW))
TRIV_LB = TranslationMap("triv.lb", BOX, ARROW, _c("top ~> (top -> p0)", ARROW))

MAPS = {t.name: t for t in (ID, TRIV, LB, BL, RED, TRIV_LB)}


def get_map(name) -> TranslationMap:
    if isinstance(name, TranslationMap):
        return name
    try:
        return MAPS[name]
    except KeyError:
        raise ValueError(f"unknown translation map {name!r}") from None


def compose(outer: TranslationMap, inner: TranslationMap) -> TranslationMap:
    """Eager composition: ``inner`` first, then ``outer``; the result is a
    single map whose clause is the outer image of the inner clause."""
    if inner.target != outer.source:
        raise ModeError(f"cannot compose {outer.name} after {inner.name}: "
                        f"{inner.name} targets {inner.target}")
    return TranslationMap(f"{outer.name}.{inner.name}", inner.source,
                          outer.target, apply_translation(inner.clause, outer))


def apply_translation(f: Formula, t) -> Formula:
    """Homomorphic image of ``f`` under the map: commutes with variables and
    the non-modal connectives, and rewrites the modal connective by its clause."""
    t = get_map(t)
    syntax.check_mode(f, t.source)

    def go(h: Formula) -> Formula:
        if h.kind == "arrow":
            return syntax.apply_substitution(
                t.clause, {"p0": go(h.left), "p1": go(h.right)})
        if h.kind == "box":
            return syntax.apply_substitution(t.clause, {"p0": go(h.left)})
        if h.left is None:
            return h
        if h.right is None:
            raise ModeError(f"cannot translate {h.kind!r} nodes")
        ctor = {"and": syntax.And, "or": syntax.Or, "imp": syntax.Imp}[h.kind]
        return ctor(go(h.left), go(h.right))

    out = go(f)
    syntax.check_mode(out, t.target)
    return out


def eliminate_fixpoints(f: Formula) -> Formula:
    """Innermost-first replacement of each fix body's stars by top, following
    the provable identity between a guarded fixpoint and its top-instance."""
    syntax.validate_fixpoint_grammar(f)

    def go(h: Formula) -> Formula:
        if h.kind == "fix":
            return _plug_star(go(h.left))
        if h.left is None:
            return h
        if h.right is None:
            return syntax._mk(h.kind, h.name, go(h.left), None)
        return syntax._mk(h.kind, h.name, go(h.left), go(h.right))

    out = go(f)
    syntax.check_mode(out, ARROW)
    return out


def _plug_star(h: Formula) -> Formula:
    if h.kind == "star":
        return syntax.Top
    if h.kind == "fix":
        raise FixpointGrammarError("nested fix left unbound")  # unreachable
    if h.left is None:
        return h
    if h.right is None:
        return syntax._mk(h.kind, h.name, _plug_star(h.left), None)
    return syntax._mk(h.kind, h.name, _plug_star(h.left), _plug_star(h.right))
