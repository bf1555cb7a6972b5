"""Formula trees for the arrow language, the box language and the fixpoint extension.

Formulas are immutable and hash-consed: structurally equal trees are the same
object, so equality and hashing are identity-based and sets of formulas behave
deterministically.  The box connective is primitive only in box mode; in arrow
mode ``#phi`` is stored desugared as ``top ~> phi`` and re-sugared by the
renderer.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import FixpointGrammarError, ModeError, ParseError

ARROW = "arrow"
BOX = "box"
ARROW_FP = "arrow-fp"
MODES = (ARROW, BOX, ARROW_FP)

# Constructor ranks fix the canonical order on formulas.
_RANK = {"bot": 0, "top": 1, "var": 2, "star": 3, "and": 4, "or": 5,
         "imp": 6, "arrow": 7, "box": 8, "fix": 9}

KEYWORDS = frozenset({"top", "bot", "fix"})
_VAR_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")


@dataclass(frozen=True, eq=False, repr=False)
class Formula:
    """One node of a formula tree; build instances via the module constructors."""

    kind: str
    name: str = ""
    left: Optional["Formula"] = None
    right: Optional["Formula"] = None

    def __repr__(self) -> str:
        try:
            return f"Formula({render(self, mode_of(self))!r})"
        except ModeError:
            return f"Formula<{self.kind}>"


@functools.lru_cache(maxsize=None)
def _mk(kind: str, name: str, left, right) -> Formula:
    return Formula(kind, name, left, right)


Top = _mk("top", "", None, None)
Bot = _mk("bot", "", None, None)
Star = _mk("star", "", None, None)


def Var(name: str) -> Formula:
    return _mk("var", name, None, None)


def And(left: Formula, right: Formula) -> Formula:
    return _mk("and", "", left, right)


def Or(left: Formula, right: Formula) -> Formula:
    return _mk("or", "", left, right)


def Imp(left: Formula, right: Formula) -> Formula:
    return _mk("imp", "", left, right)


def Arrow(left: Formula, right: Formula) -> Formula:
    return _mk("arrow", "", left, right)


def Box(body: Formula) -> Formula:
    """Primitive box (box mode only).  Arrow-mode boxes are Arrow(Top, body)."""
    return _mk("box", "", body, None)


def Fix(body: Formula) -> Formula:
    return _mk("fix", "", body, None)


def Neg(f: Formula) -> Formula:
    return Imp(f, Bot)


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Imp(left, right), Imp(right, left))


def box_in(mode: str, body: Formula) -> Formula:
    """The mode's box: primitive in box mode, ``top ~> body`` otherwise."""
    return Box(body) if mode == BOX else Arrow(Top, body)


def children(f: Formula) -> tuple[Formula, ...]:
    if f.left is None:
        return ()
    if f.right is None:
        return (f.left,)
    return (f.left, f.right)


@functools.lru_cache(maxsize=None)
def sort_key(f: Formula):
    """Canonical total order: constructor rank, children recursively, variable name."""
    if f.kind == "var":
        return (_RANK["var"], f.name)
    return (_RANK[f.kind],) + tuple(sort_key(c) for c in children(f))


def canonical_sorted(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(set(fs), key=sort_key)


@functools.lru_cache(maxsize=None)
def pv(f: Formula) -> frozenset[str]:
    """Propositional variables occurring in ``f`` (the bound star is not a variable)."""
    if f.kind == "var":
        return frozenset((f.name,))
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= pv(c)
    return out


@functools.lru_cache(maxsize=None)
def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def mode_of(f: Formula) -> str:
    """The least permissive mode the constructors of ``f`` admit."""
    kinds = {g.kind for g in subformulas(f)}
    if "fix" in kinds or "star" in kinds:
        if "box" in kinds:
            raise ModeError("formula mixes box and fixpoint constructors")
        return ARROW_FP
    if "box" in kinds:
        if "arrow" in kinds:
            raise ModeError("formula mixes box and arrow constructors")
        return BOX
    return ARROW


def check_mode(f: Formula, mode: str) -> None:
    """Raise ModeError unless every constructor in ``f`` is legal for ``mode``."""
    if mode not in MODES:
        raise ModeError(f"unknown mode {mode!r}")
    for g in subformulas(f):
        if g.kind == "arrow" and mode == BOX:
            raise ModeError("Lewis arrow is illegal in box mode")
        if g.kind == "box" and mode in (ARROW, ARROW_FP):
            raise ModeError("primitive box is illegal in arrow mode; use top ~> phi")
        if g.kind in ("fix", "star") and mode != ARROW_FP:
            raise ModeError(f"fixpoint constructor {g.kind!r} requires arrow-fp mode")


@functools.lru_cache(maxsize=None)
def subformulas(f: Formula) -> frozenset[Formula]:
    out = frozenset((f,))
    for c in children(f):
        out |= subformulas(c)
    return out


@functools.lru_cache(maxsize=None)
def subformulas_plus(f: Formula) -> frozenset[Formula]:
    """Sub+ closure: ``psi -> chi`` also counts as a part of ``psi ~> chi``."""
    out = frozenset((f,))
    for c in children(f):
        out |= subformulas_plus(c)
    if f.kind == "arrow":
        out |= frozenset((Imp(f.left, f.right),))
    return out


CLOSURE_KINDS = ("sub", "subplus", "adequate", "adequateplus")


def closure(fs: Iterable[Formula], kind: str = "adequate") -> list[Formula]:
    """Deterministically ordered (plus-)subformula closure; adequate kinds add bot/top."""
    if kind not in CLOSURE_KINDS:
        raise ValueError(f"unknown closure kind {kind!r}")
    collect = subformulas_plus if kind in ("subplus", "adequateplus") else subformulas
    out: set[Formula] = set()
    for f in fs:
        out |= collect(f)
    if kind in ("adequate", "adequateplus"):
        out |= {Bot, Top}
    return canonical_sorted(out)


def complexity(f: Formula) -> int:
    """Nesting depth of ->/~> (boxes count via their top ~> expansion)."""
    if f.kind in ("var", "top", "bot"):
        return 0
    if f.kind in ("and", "or"):
        return max(complexity(f.left), complexity(f.right))
    if f.kind in ("imp", "arrow"):
        return max(complexity(f.left), complexity(f.right)) + 1
    if f.kind == "box":
        return complexity(f.left) + 1
    raise ValueError(f"complexity is undefined for {f.kind!r} nodes")


@dataclass(frozen=True)
class NuCounts:
    """Per-shape tallies behind the interpolant bound: variables, implications,
    Lewis implications (or boxes, in box mode), and their sum ``nu``."""

    variables: int
    implications: int
    modal: int

    @property
    def nu(self) -> int:
        return self.variables + self.implications + self.modal


COUNT_MODES = ("arrow", "arrowplus", "box")


def count_nu(f: Formula, mode: str = "arrow") -> NuCounts:
    if mode not in COUNT_MODES:
        raise ValueError(f"unknown count mode {mode!r}")
    check_mode(f, BOX if mode == "box" else ARROW)
    if mode == "arrowplus":
        subs = subformulas_plus(f)
    else:
        subs = subformulas(f)
    return count_nu_set(subs, "box" if mode == "box" else "arrow")


def count_nu_set(fs: Iterable[Formula], language: str = "arrow") -> NuCounts:
    """The nu count over an explicit set (used for adequate sets)."""
    fs = set(fs)
    modal_kind = "box" if language == "box" else "arrow"
    return NuCounts(
        variables=sum(1 for g in fs if g.kind == "var"),
        implications=sum(1 for g in fs if g.kind == "imp"),
        modal=sum(1 for g in fs if g.kind == modal_kind),
    )


@dataclass(frozen=True)
class Classification:
    closed: bool
    modalized: Optional[bool] = None
    semipositive: Optional[bool] = None


def classify(f: Formula, v: Optional[str] = None) -> Classification:
    """Closedness plus, when ``v`` is given, guardedness flags for ``v``.

    ``modalized``: every occurrence of ``v`` lies under an arrow or box.
    ``semipositive``: every occurrence is positive or lies under an arrow/box.
    """
    closed = not pv(f)
    if v is None:
        return Classification(closed=closed)
    return Classification(
        closed=closed,
        modalized=not _occurs_unguarded(f, v),
        semipositive=not _occurs_neg_unguarded(f, v, positive=True),
    )


def _occurs_unguarded(f: Formula, v: str) -> bool:
    if f.kind == "var":
        return f.name == v
    if f.kind in ("arrow", "box"):
        return False
    return any(_occurs_unguarded(c, v) for c in children(f))


def _occurs_neg_unguarded(f: Formula, v: str, positive: bool) -> bool:
    if f.kind == "var":
        return f.name == v and not positive
    if f.kind in ("arrow", "box"):
        return False
    if f.kind == "imp":
        return (_occurs_neg_unguarded(f.left, v, not positive)
                or _occurs_neg_unguarded(f.right, v, positive))
    return any(_occurs_neg_unguarded(c, v, positive) for c in children(f))


def substitute(f: Formula, v: str, g: Formula) -> Formula:
    """Capture-free textual substitution of ``g`` for the variable ``v``."""
    if v == "*":
        raise ValueError("the bound fixpoint variable cannot be substituted for")

    @functools.lru_cache(maxsize=None)
    def go(h: Formula) -> Formula:
        if h.kind == "var":
            return g if h.name == v else h
        if h.left is None:
            return h
        if h.right is None:
            return _mk(h.kind, h.name, go(h.left), None)
        return _mk(h.kind, h.name, go(h.left), go(h.right))

    return go(f)


def apply_substitution(f: Formula, sigma: dict) -> Formula:
    """Simultaneous substitution; identity outside the domain of ``sigma``."""
    if "*" in sigma:
        raise ValueError("the bound fixpoint variable cannot be substituted for")

    def go(h: Formula) -> Formula:
        if h.kind == "var":
            return sigma.get(h.name, h)
        if h.left is None:
            return h
        if h.right is None:
            return _mk(h.kind, h.name, go(h.left), None)
        return _mk(h.kind, h.name, go(h.left), go(h.right))

    return go(f)


def desugar_box(f: Formula) -> Formula:
    """Replace every primitive box by ``top ~>``; the result is pure arrow language."""
    if f.kind == "box":
        return Arrow(Top, desugar_box(f.left))
    if f.left is None:
        return f
    if f.right is None:
        return _mk(f.kind, f.name, desugar_box(f.left), None)
    return _mk(f.kind, f.name, desugar_box(f.left), desugar_box(f.right))


def fresh_variable(avoid: Iterable[str], prefix: str = "q_") -> str:
    taken = set(avoid)
    n = 0
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def validate_fixpoint_grammar(f: Formula) -> None:
    """Enforce the binder grammar: stars bound by the nearest fix, and only in
    positions strictly beneath an arrow within that fix body."""

    def go(h: Formula, star_depth: int, guarded: bool) -> None:
        # star_depth > 0 means a fix binder is in scope; guarded means an arrow
        # has been crossed since that binder.
        if h.kind == "star":
            if star_depth == 0:
                raise FixpointGrammarError("star occurs outside any fix binder")
            if not guarded:
                raise FixpointGrammarError("star occurs unguarded in a fix body")
            return
        if h.kind == "fix":
            go(h.left, star_depth + 1, False)
            return
        if h.kind == "arrow":
            go(h.left, star_depth, True)
            go(h.right, star_depth, True)
            return
        for c in children(h):
            go(c, star_depth, guarded)

    go(f, 0, False)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<iff><->)|(?P<aiff><~>)|(?P<imp>->)|(?P<arrow>~>)|(?P<neg>~)"
    r"|(?P<box>\#)|(?P<and>&)|(?P<or>\|)|(?P<lpar>\()|(?P<rpar>\))"
    r"|(?P<star>\*)|(?P<name>[a-z][a-zA-Z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[at]!r}", at)
        kind = m.lastgroup
        assert kind is not None
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, mode: str):
        if mode not in MODES:
            raise ModeError(f"unknown mode {mode!r}")
        self.tokens = _tokenize(text)
        self.mode = mode
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {what}", tok[2])
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def iff(self) -> Formula:
        left = self.imp()
        kind, _, pos = self.peek()
        if kind == "iff":
            self.take()
            right = self.imp()
            self._no_more_iff()
            return Iff(left, right)
        if kind == "aiff":
            if self.mode == BOX:
                raise ParseError("'<~>' is illegal in box mode", pos)
            self.take()
            right = self.imp()
            self._no_more_iff()
            return And(Arrow(left, right), Arrow(right, left))
        return left

    def _no_more_iff(self):
        kind, _, pos = self.peek()
        if kind in ("iff", "aiff"):
            raise ParseError("'<->'/'<~>' are non-associative; add parentheses", pos)

    def imp(self) -> Formula:
        left = self.disj()
        kind, _, pos = self.peek()
        if kind == "imp":
            self.take()
            return Imp(left, self.imp())
        if kind == "arrow":
            if self.mode == BOX:
                raise ParseError("Lewis arrow '~>' is illegal in box mode", pos)
            self.take()
            return Arrow(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "or":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.prefix()
        while self.peek()[0] == "and":
            self.take()
            f = And(f, self.prefix())
        return f

    def prefix(self) -> Formula:
        kind, _, pos = self.peek()
        if kind == "neg":
            self.take()
            return Neg(self.prefix())
        if kind == "box":
            self.take()
            return box_in(self.mode, self.prefix())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "lpar":
            f = self.iff()
            self.expect("rpar", "')'")
            return f
        if kind == "star":
            if self.mode != ARROW_FP:
                raise ParseError("'*' requires arrow-fp mode", pos)
            return Star
        if kind == "name":
            if value == "top":
                return Top
            if value == "bot":
                return Bot
            if value == "fix":
                if self.mode != ARROW_FP:
                    raise ParseError("'fix' requires arrow-fp mode", pos)
                self.expect("lpar", "'(' after fix")
                body = self.iff()
                self.expect("rpar", "')'")
                return Fix(body)
            return Var(value)
        raise ParseError("expected a formula", pos)


def parse(text: str, mode: str = ARROW) -> Formula:
    """Parse ``text`` in the given language mode; sugars are expanded."""
    f = _Parser(text, mode).parse()
    if mode == ARROW_FP:
        validate_fixpoint_grammar(f)
    return f


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_LEVEL_IFF, _LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_PREFIX = 1, 2, 3, 4, 5


def render(f: Formula, mode: Optional[str] = None) -> str:
    """Minimal-parenthesis text; ``parse(render(f), mode)`` is ``f`` again."""
    if mode is None:
        mode = mode_of(f)
    check_mode(f, mode)
    return _render(f, mode, 0)


def _render(f: Formula, mode: str, level: int) -> str:
    if f.kind == "var":
        return f.name
    if f.kind == "top":
        return "top"
    if f.kind == "bot":
        return "bot"
    if f.kind == "star":
        return "*"
    if f.kind == "fix":
        return f"fix({_render(f.left, mode, 0)})"
    if f.kind == "box":
        return "#" + _render(f.left, mode, _LEVEL_PREFIX)
    if f.kind == "imp" and f.right is Bot:
        return "~" + _render(f.left, mode, _LEVEL_PREFIX)
    if f.kind == "arrow" and f.left is Top and mode != BOX:
        return "#" + _render(f.right, mode, _LEVEL_PREFIX)
    if f.kind in ("imp", "arrow"):
        op = "->" if f.kind == "imp" else "~>"
        text = (f"{_render(f.left, mode, _LEVEL_OR)} {op} "
                f"{_render(f.right, mode, _LEVEL_IMP)}")
        return f"({text})" if level > _LEVEL_IMP else text
    if f.kind == "or":
        text = f"{_render(f.left, mode, _LEVEL_OR)} | {_render(f.right, mode, _LEVEL_AND)}"
        return f"({text})" if level > _LEVEL_OR else text
    if f.kind == "and":
        text = f"{_render(f.left, mode, _LEVEL_AND)} & {_render(f.right, mode, _LEVEL_PREFIX)}"
        return f"({text})" if level > _LEVEL_AND else text
    raise ModeError(f"cannot render {f.kind!r} node")


def big_and(fs: Iterable[Formula]) -> Formula:
    """Right-nested conjunction in canonical order; empty conjunction is top."""
    items = canonical_sorted(fs)
    if not items:
        return Top
    out = items[-1]
    for g in reversed(items[:-1]):
        out = And(g, out)
    return out


def big_or(fs: Iterable[Formula]) -> Formula:
    """Right-nested disjunction in canonical order; empty disjunction is bot."""
    items = canonical_sorted(fs)
    if not items:
        return Bot
    out = items[-1]
    for g in reversed(items[:-1]):
        out = Or(g, out)
    return out


def variable_set(names: Iterable[str]) -> tuple[str, ...]:
    """A duplicate-free, deterministically ordered variable tuple."""
    out = sorted(set(names))
    for n in out:
        if n in KEYWORDS or not _VAR_RE.fullmatch(n):
            raise ValueError(f"illegal variable name {n!r}")
    return tuple(out)
