"""Resource budgets for the kernel and enumerations."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Budgets:
    """Caps keeping the exponential procedures at desk scale.

    max_types: largest adequate set the elimination kernel accepts.
    max_nodes: largest node count for exhaustive model enumeration.
    enum_vars / enum_depth: default caps for class enumeration up to
        provable equivalence.
    enum_reps: abort class enumeration past this many representatives.
    """

    max_types: int = 20
    max_nodes: int = 4
    enum_vars: int = 1
    enum_depth: int = 2
    enum_reps: int = 600


DEFAULT = Budgets()


def from_env(base: Budgets = DEFAULT) -> Budgets:
    """Apply ISLKIT_MAX_TYPES / ISLKIT_MAX_NODES environment overrides."""
    out = base
    if "ISLKIT_MAX_TYPES" in os.environ:
        out = replace(out, max_types=int(os.environ["ISLKIT_MAX_TYPES"]))
    if "ISLKIT_MAX_NODES" in os.environ:
        out = replace(out, max_nodes=int(os.environ["ISLKIT_MAX_NODES"]))
    return out
