"""islkit: the intuitionistic strong-Löb modal logics, end to end.

Parsing and printing, finite Kripke semantics, a complete decision procedure
with countermodels, fixed-point calculus, closed-fragment normal forms,
inter-logic translations, bounded bisimulations and uniform interpolation for
the systems over the arrow and box languages.
"""

from .closed import INF, degree_to_formula, normalize_closed
from .config import Budgets
from .decide import (ISL_A, ISL_A_PLUS, ISL_BOX, AdequateSet, HenkinStructure,
                     Logic, Verdict, brute_force_search, depth, derivable,
                     eliminate, entails_equiv, get_logic, local_types,
                     pre_henkin, successor_relation)
from .errors import (BudgetExceededError, FixpointGrammarError, IslkitError,
                     KernelConsistencyError, ModeError, ParseError)
from .kripke import (KripkeModel, enumerate_models, forces, node_theory,
                     to_dot, to_json_dict, validate_model)
from .syntax import (ARROW, ARROW_FP, BOX, Formula, classify, closure,
                     complexity, count_nu, desugar_box, parse, render,
                     substitute)
from .translate import apply_translation, eliminate_fixpoints, get_map

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
