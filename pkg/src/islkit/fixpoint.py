"""Explicit fixed points, fixed-point equation checking, strong uniqueness and
the top-Beth construction.

For a body guarded (or merely semi-positive) in the fixpoint variable, the
top-instance is the fixed point; no derivation replay is needed because every
produced equation is verified through the decision kernel.
"""

from __future__ import annotations

from typing import Optional

from . import decide, syntax
from .errors import KernelConsistencyError
from .syntax import Formula


def explicit_fixpoint(chi: Formula, r: str) -> Formula:
    """The top-instance ``chi[r := top]``; requires ``r`` guarded or
    semi-positive in ``chi``."""
    cls = syntax.classify(chi, r)
    if not (cls.modalized or cls.semipositive):
        raise ValueError(
            f"variable {r!r} occurs unguarded and non-semi-positively")
    return syntax.substitute(chi, r, syntax.Top)


def check_fixpoint(chi: Formula, r: str, candidate: Formula, logic,
                   budgets=None) -> bool:
    """Kernel verdict on ``candidate <-> chi[r := candidate]``."""
    instance = syntax.Iff(candidate, syntax.substitute(chi, r, candidate))
    return decide.derivable(instance, logic, budgets).derivable


def uniqueness_instance(chi: Formula, r: str, f: Formula, g: Formula) -> Formula:
    """The strong-uniqueness scheme instance for (chi, f, g)."""
    return syntax.Imp(
        syntax.And(syntax.Iff(f, syntax.substitute(chi, r, f)),
                   syntax.Iff(g, syntax.substitute(chi, r, g))),
        syntax.Iff(f, g))


def uniqueness_check(chi: Formula, r: str, f: Formula, g: Formula, logic,
                     budgets=None) -> bool:
    """Kernel verdict on the strong-uniqueness instance; ``chi`` must be
    guarded in ``r``."""
    if not syntax.classify(chi, r).modalized:
        raise ValueError(f"variable {r!r} is not modalized in the body")
    return decide.derivable(uniqueness_instance(chi, r, f, g), logic, budgets).derivable


def beth_explicit(f: Formula, p: str, logic, budgets=None) -> Optional[Formula]:
    """The top-Beth rule: if ``f`` implicitly defines ``p``, return the
    explicit definition ``f[p := top]``; otherwise None.

    The premise is joint-consistency style: ``f`` and a renamed copy force the
    two definienda to agree.  When it holds, the returned definition is
    re-verified through the kernel.
    """
    q = syntax.fresh_variable(syntax.pv(f) | {p})
    premise = syntax.Imp(
        syntax.And(f, syntax.substitute(f, p, syntax.Var(q))),
        syntax.Iff(syntax.Var(p), syntax.Var(q)))
    if not decide.derivable(premise, logic, budgets).derivable:
        return None
    explicit = syntax.substitute(f, p, syntax.Top)
    conclusion = syntax.Imp(f, syntax.Iff(syntax.Var(p), explicit))
    if not decide.derivable(conclusion, logic, budgets).derivable:
        raise KernelConsistencyError(
            "Beth premise held but the explicit definition failed")
    return explicit
