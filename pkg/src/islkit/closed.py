"""The closed-fragment normalizer: every variable-free formula reduces to a
degree of falsity (an iterated box over bot, with infinity standing for top).

Degrees are plain ints with ``math.inf`` on top, which gives the required
arithmetic (min/max, successor, infinity absorbing) for free.
"""

from __future__ import annotations

import math
from typing import Union

from . import syntax
from .syntax import ARROW, Formula

INF = math.inf
Degree = Union[int, float]


def normalize_closed(f: Formula) -> Degree:
    """Bottom-up evaluation of a closed formula to its degree of falsity."""
    if syntax.pv(f):
        raise ValueError(f"formula is not closed: variables {sorted(syntax.pv(f))}")
    return _norm(f)


def _norm(f: Formula) -> Degree:
    kind = f.kind
    if kind == "bot":
        return 0
    if kind == "top":
        return INF
    if kind == "and":
        return min(_norm(f.left), _norm(f.right))
    if kind == "or":
        return max(_norm(f.left), _norm(f.right))
    if kind == "imp":
        a, b = _norm(f.left), _norm(f.right)
        return INF if a <= b else b
    if kind == "arrow":
        a, b = _norm(f.left), _norm(f.right)
        return INF if a <= b else b + 1
    if kind == "box":
        b = _norm(f.left)
        return INF if b == INF else b + 1
    raise ValueError(f"cannot normalize {kind!r} nodes")


def degree_to_formula(d: Degree, mode: str = ARROW) -> Formula:
    """The canonical formula of a degree: bot under that many boxes, top for
    infinity."""
    if d == INF:
        return syntax.Top
    if d != int(d) or d < 0:
        raise ValueError(f"degree must be a natural number or infinity, not {d!r}")
    out = syntax.Bot
    for _ in range(int(d)):
        out = syntax.box_in(mode, out)
    return out


def degree_str(d: Degree) -> str:
    return "inf" if d == INF else str(int(d))
